use std::fmt;
use std::path::PathBuf;

use cyclelab::montecarlo::Functional;
use cyclelab::rational::parse_rational;
use cyclelab::report::Format;
use cyclelab::sampler::{FixedCount, Law};
use serde::{Deserialize, Serialize};

pub const DEFAULT_TRUNCATION: usize = 8;
pub const DEFAULT_PAIR_MAX_N: usize = 5;
pub const DEFAULT_SINGLE_MAX_N: usize = 7;
/// Largest `n` the exact pair oracle accepts.
pub const EXACT_MAX_N: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Sample,
    Moments,
    Convergence,
    Exact,
    VerifyLemmas,
    Counterexample,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Command::Sample => "sample",
            Command::Moments => "moments",
            Command::Convergence => "convergence",
            Command::Exact => "exact",
            Command::VerifyLemmas => "verify-lemmas",
            Command::Counterexample => "counterexample",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Format {
        match f {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        }
    }
}

/// A config as written in a file or assembled from flags; nothing is
/// validated yet.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub command: Option<Command>,
    pub seed: Option<u64>,
    pub samplers: Option<Vec<Law>>,
    pub n: Option<usize>,
    pub n_grid: Option<Vec<usize>>,
    pub v_vec: Option<Vec<usize>>,
    pub k: Option<usize>,
    pub functionals: Option<Vec<Functional>>,
    pub samples: Option<usize>,
    pub truncation: Option<usize>,
    pub pair_max_n: Option<usize>,
    pub single_max_n: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

/// A validated configuration with defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub seed: u64,
    pub samplers: Vec<Law>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_vec: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub functionals: Vec<Functional>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    pub truncation: usize,
    pub pair_max_n: usize,
    pub single_max_n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub field: &'static str,
    pub reason: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config field `{}`: {}", self.field, self.reason)
    }
}

impl std::error::Error for ConfigError {}

fn bad(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError {
        field,
        reason: reason.into(),
    }
}

fn from_core(e: cyclelab::Error) -> ConfigError {
    match e {
        cyclelab::Error::InvalidParameter { field, reason } => bad(field, reason),
        other => bad("samplers", other.to_string()),
    }
}

impl PartialConfig {
    pub fn from_toml(text: &str) -> Result<PartialConfig, ConfigError> {
        toml::from_str(text).map_err(|e| bad("config", e.message().to_string()))
    }

    /// Fields set in `other` win.
    pub fn overlay(self, other: PartialConfig) -> PartialConfig {
        PartialConfig {
            command: other.command.or(self.command),
            seed: other.seed.or(self.seed),
            samplers: other.samplers.or(self.samplers),
            n: other.n.or(self.n),
            n_grid: other.n_grid.or(self.n_grid),
            v_vec: other.v_vec.or(self.v_vec),
            k: other.k.or(self.k),
            functionals: other.functionals.or(self.functionals),
            samples: other.samples.or(self.samples),
            truncation: other.truncation.or(self.truncation),
            pair_max_n: other.pair_max_n.or(self.pair_max_n),
            single_max_n: other.single_max_n.or(self.single_max_n),
            output: other.output.or(self.output),
            format: other.format.or(self.format),
        }
    }

    pub fn resolve(self) -> Result<ExperimentConfig, ConfigError> {
        let command = self.command.ok_or_else(|| bad("command", "missing"))?;
        let seed = self
            .seed
            .ok_or_else(|| bad("seed", "missing; a fixed seed is mandatory"))?;
        let mut functionals = self.functionals.unwrap_or_default();
        if functionals.is_empty() && matches!(command, Command::Moments) {
            if let Some(v) = &self.v_vec {
                functionals.push(Functional::JointCycleProduct { v_vec: v.clone() });
            }
        }
        let cfg = ExperimentConfig {
            command,
            seed,
            samplers: self.samplers.unwrap_or_default(),
            n: self.n,
            n_grid: self.n_grid,
            v_vec: self.v_vec,
            k: self.k,
            functionals,
            samples: self.samples,
            truncation: self.truncation.unwrap_or(DEFAULT_TRUNCATION),
            pair_max_n: self.pair_max_n.unwrap_or(DEFAULT_PAIR_MAX_N),
            single_max_n: self.single_max_n.unwrap_or(DEFAULT_SINGLE_MAX_N),
            output: self.output,
            format: self.format.unwrap_or(OutputFormat::Csv),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses and validates a TOML config in one step.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    PartialConfig::from_toml(text)?.resolve()
}

impl ExperimentConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// The resolved config as recorded in reports. The output destination
    /// is left out so a rerun to another path gives identical bytes.
    pub fn provenance(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("config serialises");
        if let Some(map) = v.as_object_mut() {
            map.remove("output");
        }
        v
    }

    fn need_n(&self) -> Result<usize, ConfigError> {
        match self.n {
            None => Err(bad("n", format!("required by `{}`", self.command))),
            Some(0) => Err(bad("n", "must be >= 1")),
            Some(n) => Ok(n),
        }
    }

    pub fn n_value(&self) -> usize {
        self.n.expect("validated")
    }

    fn need_samples(&self) -> Result<usize, ConfigError> {
        let s = self
            .samples
            .ok_or_else(|| bad("samples", format!("required by `{}`", self.command)))?;
        if s < cyclelab::montecarlo::MIN_SAMPLES {
            return Err(bad(
                "samples",
                format!("must be >= {}, got {s}", cyclelab::montecarlo::MIN_SAMPLES),
            ));
        }
        Ok(s)
    }

    fn need_samplers(&self, exactly: Option<usize>) -> Result<(), ConfigError> {
        match exactly {
            Some(m) if self.samplers.len() != m => Err(bad(
                "samplers",
                format!("`{}` needs exactly {m}, got {}", self.command, self.samplers.len()),
            )),
            None if self.samplers.is_empty() => Err(bad("samplers", format!("`{}` needs at least one", self.command))),
            _ => Ok(()),
        }
    }

    fn check_laws_at(&self, n: usize) -> Result<(), ConfigError> {
        self.samplers.iter().try_for_each(|l| l.validate(n)).map_err(from_core)
    }

    fn check_functionals(&self) -> Result<(), ConfigError> {
        self.functionals
            .iter()
            .try_for_each(Functional::validate)
            .map_err(from_core)
    }

    fn check_k(&self) -> Result<(), ConfigError> {
        match self.k {
            Some(0) => Err(bad("k", "must be >= 1")),
            _ => Ok(()),
        }
    }

    fn check_v_vec(&self) -> Result<&[usize], ConfigError> {
        let v = self
            .v_vec
            .as_deref()
            .ok_or_else(|| bad("v_vec", format!("required by `{}`", self.command)))?;
        if v.is_empty() || v.contains(&0) {
            return Err(bad("v_vec", "needs positive cycle lengths"));
        }
        Ok(v)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.check_k()?;
        match self.command {
            Command::Sample => {
                self.need_samplers(None)?;
                let n = self.need_n()?;
                self.check_laws_at(n)?;
                self.need_samples()?;
            }
            Command::Moments => {
                self.need_samplers(None)?;
                let n = self.need_n()?;
                self.check_laws_at(n)?;
                self.need_samples()?;
                if self.functionals.is_empty() && self.k.is_none() {
                    return Err(bad(
                        "functionals",
                        "give at least one functional, a v_vec, or k for a TV row",
                    ));
                }
                self.check_functionals()?;
            }
            Command::Convergence => {
                self.need_samplers(None)?;
                let grid = self
                    .n_grid
                    .as_deref()
                    .ok_or_else(|| bad("n_grid", "required by `convergence`"))?;
                if grid.is_empty() || grid.contains(&0) {
                    return Err(bad("n_grid", "needs positive sizes"));
                }
                if grid.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(bad("n_grid", "must be strictly increasing"));
                }
                for &n in grid {
                    self.check_laws_at(n)?;
                }
                self.need_samples()?;
                if self.functionals.is_empty() && self.k.is_none() {
                    return Err(bad("functionals", "give at least one functional or k for a TV scan"));
                }
                self.check_functionals()?;
            }
            Command::Exact => {
                self.need_samplers(Some(2))?;
                let n = self.need_n()?;
                if n > EXACT_MAX_N {
                    return Err(bad("n", format!("exact enumeration is limited to n <= {EXACT_MAX_N}")));
                }
                self.check_laws_at(n)?;
                self.check_v_vec()?;
            }
            Command::VerifyLemmas => {
                let n = self.need_n()?;
                if n > self.pair_max_n {
                    return Err(bad(
                        "n",
                        format!("pair sweeps are capped at pair_max_n = {}, got {n}", self.pair_max_n),
                    ));
                }
                if let Some(grid) = &self.n_grid {
                    if grid.is_empty() || grid.iter().any(|&m| m < 2 || m > self.single_max_n) {
                        return Err(bad(
                            "n_grid",
                            format!("single-permutation sweep sizes must lie in 2..={}", self.single_max_n),
                        ));
                    }
                }
                self.check_laws_at(n)?;
                if self
                    .samplers
                    .iter()
                    .any(|l| !matches!(l, Law::Uniform {} | Law::Ewens { .. }))
                {
                    return Err(bad("samplers", "lemma sweeps take uniform or ewens laws"));
                }
            }
            Command::Counterexample => {
                self.need_samplers(Some(2))?;
                let n = self.need_n()?;
                self.check_laws_at(n)?;
                self.need_samples()?;
            }
        }
        Ok(())
    }
}

/// `uniform`, `ewens:<θ>`, `sqrt_fixed:<f|sqrt>`, `matching_heavy:<fraction>`.
pub fn parse_sampler(text: &str) -> Result<Law, String> {
    let (kind, arg) = match text.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (text, None),
    };
    let need = |what: &str| arg.ok_or_else(|| format!("`{kind}` needs `:{what}`"));
    let rational = |a: &str| parse_rational(a).map_err(|e| e.to_string());
    match kind {
        "uniform" if arg.is_none() => Ok(Law::Uniform {}),
        "ewens" => Ok(Law::Ewens {
            theta: rational(need("theta")?)?,
        }),
        "sqrt_fixed" => {
            let a = need("count")?;
            let fixed_count = if a == "sqrt" {
                FixedCount::SQRT
            } else {
                FixedCount::Exact(a.parse().map_err(|_| format!("bad fixed-point count {a:?}"))?)
            };
            Ok(Law::SqrtFixed { fixed_count })
        }
        "matching_heavy" => Ok(Law::MatchingHeavy {
            two_cycle_fraction: rational(need("fraction")?)?,
        }),
        _ => Err(format!("unknown sampler {text:?}")),
    }
}

/// `joint_cycle_product:<v1,v2,…>`, `h3:<k>`, `h4`.
pub fn parse_functional(text: &str) -> Result<Functional, String> {
    match text.split_once(':') {
        Some(("joint_cycle_product", v)) => Ok(Functional::JointCycleProduct { v_vec: parse_list(v)? }),
        Some(("h3", k)) => Ok(Functional::H3 {
            k: k.parse().map_err(|_| format!("bad h3 power {k:?}"))?,
        }),
        None if text == "h4" => Ok(Functional::H4 {}),
        _ => Err(format!("unknown functional {text:?}")),
    }
}

pub fn parse_list(text: &str) -> Result<Vec<usize>, String> {
    text.split(',')
        .map(|s| s.trim().parse().map_err(|_| format!("bad list entry {s:?}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use cyclelab::rational::Rational;

    #[test]
    fn missing_seed_is_named() {
        let err = parse_config("command = \"exact\"\nn = 4\n").unwrap_err();
        assert_eq!(err.field, "seed");
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = parse_config("command = \"exact\"\nseed = 1\nbogus = 2\n").unwrap_err();
        assert!(err.reason.contains("bogus"), "{err}");
    }

    #[test]
    fn negative_theta_surfaces_sampler_error() {
        let text =
            "command = \"sample\"\nseed = 1\nn = 5\nsamples = 100\n[[samplers]]\nkind = \"ewens\"\ntheta = \"-1\"\n";
        let err = parse_config(text).unwrap_err();
        assert_eq!(err.field, "theta");
    }

    #[test]
    fn flag_parsers() {
        assert_eq!(
            parse_sampler("ewens:1/2").unwrap(),
            Law::Ewens {
                theta: Rational::new(1, 2)
            }
        );
        assert_eq!(parse_sampler("uniform").unwrap(), Law::Uniform {});
        assert_eq!(
            parse_sampler("sqrt_fixed:sqrt").unwrap(),
            Law::SqrtFixed {
                fixed_count: FixedCount::SQRT
            }
        );
        assert!(parse_sampler("ewens").is_err());
        assert!(parse_sampler("poisson:1").is_err());
        assert_eq!(
            parse_functional("joint_cycle_product:1,2").unwrap(),
            Functional::JointCycleProduct { v_vec: vec![1, 2] }
        );
        assert_eq!(parse_functional("h4").unwrap(), Functional::H4 {});
        assert!(parse_functional("h3:x").is_err());
    }

    #[test]
    fn overlay_prefers_flags() {
        let file = PartialConfig {
            seed: Some(1),
            n: Some(4),
            ..Default::default()
        };
        let flags = PartialConfig {
            n: Some(5),
            ..Default::default()
        };
        let merged = file.overlay(flags);
        assert_eq!((merged.seed, merged.n), (Some(1), Some(5)));
    }
}
