use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cyclelab::montecarlo::Functional;
use cyclelab::sampler::Law;
use cyclelab_cli::config::{parse_functional, parse_sampler, OutputFormat};
use cyclelab_cli::{run, Command, PartialConfig};

#[derive(Parser)]
#[command(
    name = "cyclelab",
    version,
    about = "Cycle statistics of products of random permutations"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Empirical law of (#_1, …, #_k) of the product against the Poisson reference
    Sample(Flags),
    /// Monte Carlo moments of the product
    Moments(Flags),
    /// Moments or TV along a grid of sizes
    Convergence(Flags),
    /// Exact rational moments and probabilities for two factors
    Exact(Flags),
    /// Exhaustive lemma and bound sweeps
    VerifyLemmas(Flags),
    /// Hypothesis-violating families and their lower bounds
    Counterexample(Flags),
}

#[derive(Args)]
struct Flags {
    /// TOML config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// uniform | ewens:<theta> | sqrt_fixed:<f|sqrt> | matching_heavy:<fraction> (repeatable)
    #[arg(long = "sampler", value_parser = parse_sampler)]
    samplers: Vec<Law>,
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated sizes
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,
    /// Comma-separated cycle lengths
    #[arg(long, value_delimiter = ',')]
    v_vec: Option<Vec<usize>>,
    #[arg(long)]
    k: Option<usize>,
    /// joint_cycle_product:<v,…> | h3:<k> | h4 (repeatable)
    #[arg(long = "functional", value_parser = parse_functional)]
    functionals: Vec<Functional>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    truncation: Option<usize>,
    #[arg(long)]
    pair_max_n: Option<usize>,
    #[arg(long)]
    single_max_n: Option<usize>,
    /// Output file; stdout when absent
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl Flags {
    fn into_partial(self, command: Command) -> PartialConfig {
        PartialConfig {
            command: Some(command),
            seed: self.seed,
            samplers: (!self.samplers.is_empty()).then_some(self.samplers),
            n: self.n,
            n_grid: self.n_grid,
            v_vec: self.v_vec,
            k: self.k,
            functionals: (!self.functionals.is_empty()).then_some(self.functionals),
            samples: self.samples,
            truncation: self.truncation,
            pair_max_n: self.pair_max_n,
            single_max_n: self.single_max_n,
            output: self.output,
            format: self.format.map(|f| match f {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Json => OutputFormat::Json,
            }),
        }
    }
}

const USAGE_ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = match cli.command {
        Sub::Sample(f) => (Command::Sample, f),
        Sub::Moments(f) => (Command::Moments, f),
        Sub::Convergence(f) => (Command::Convergence, f),
        Sub::Exact(f) => (Command::Exact, f),
        Sub::VerifyLemmas(f) => (Command::VerifyLemmas, f),
        Sub::Counterexample(f) => (Command::Counterexample, f),
    };
    let base = match &flags.config {
        None => PartialConfig::default(),
        Some(path) => match std::fs::read_to_string(path)
            .map_err(|e| format!("{}: {e}", path.display()))
            .and_then(|text| PartialConfig::from_toml(&text).map_err(|e| e.to_string()))
        {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(USAGE_ERROR);
            }
        },
    };
    if base.command.is_some_and(|c| c != command) {
        eprintln!(
            "error: invalid config field `command`: file says {}, invoked as {command}",
            base.command.unwrap()
        );
        return ExitCode::from(USAGE_ERROR);
    }
    let cfg = match base.overlay(flags.into_partial(command)).resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE_ERROR);
        }
    };
    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE_ERROR);
        }
    };
    let format = cfg.format.into();
    let written = match &cfg.output {
        Some(path) => outcome.report.write(format, path),
        None => outcome.report.render(format).map(|text| print!("{text}")),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(USAGE_ERROR);
    }
    if outcome.violation {
        eprintln!("lemma violations found");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
