use cyclelab::graph::lemmas::{self, LemmaReport};
use cyclelab::montecarlo::{
    convergence_scan, cycle_count_vectors, moment_estimate, tv_to_eta, Functional, Metric, MomentEstimate, ScanRow,
};
use cyclelab::oracle::bounds::{fixed_point_decay, strictly_decreasing, sweep_union_bounds};
use cyclelab::oracle::{exact_joint_cycle_prob, exact_moment, ExactDistribution, ProductOrder, WeightRule};
use cyclelab::perm::Permutation;
use cyclelab::rational::to_big;
use cyclelab::report::{Report, Row, Value};
use cyclelab::sampler::{Law, SamplerSpec};
use cyclelab::stats::{empirical_joint_pmf, eta_joint_pmf, tv_distance, tv_noise_scale};
use cyclelab::Result;
use num_rational::BigRational;
use serde_json::json;

use crate::config::{Command, ExperimentConfig};

pub struct Outcome {
    pub report: Report,
    /// Some lemma check failed.
    pub violation: bool,
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut report = Report::new(cfg.command.to_string(), cfg.provenance());
    let mut violation = false;
    match cfg.command {
        Command::Sample => sample(cfg, &mut report)?,
        Command::Moments => moments(cfg, &mut report)?,
        Command::Convergence => convergence(cfg, &mut report)?,
        Command::Exact => exact(cfg, &mut report)?,
        Command::VerifyLemmas => violation = verify_lemmas(cfg, &mut report)?,
        Command::Counterexample => counterexample(cfg, &mut report)?,
    }
    Ok(Outcome { report, violation })
}

fn factors_at(laws: &[Law], n: usize) -> Result<Vec<SamplerSpec>> {
    laws.iter().enumerate().map(|(j, l)| l.at(n, j as u64)).collect()
}

fn estimate_row(n: usize, label: String, est: &MomentEstimate) -> Row {
    Row {
        n,
        functional: label,
        value: Value::Float(est.value),
        stderr: Some(est.stderr),
        samples: Some(est.samples as u64),
        seed: est.seed,
    }
}

fn exact_row(n: usize, label: String, value: BigRational, seed: u64) -> Row {
    Row {
        n,
        functional: label,
        value: Value::Exact(value),
        stderr: None,
        samples: None,
        seed,
    }
}

fn tv_label(k: usize, t: usize) -> String {
    format!("tv_eta(k={k},T={t})")
}

fn sample(cfg: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let n = cfg.n_value();
    let samples = cfg.samples.expect("validated");
    let k = cfg.k.unwrap_or(2);
    let t = cfg.truncation;
    let factors = factors_at(&cfg.samplers, n)?;
    let vectors = cycle_count_vectors(&factors, k, samples, cfg.seed)?;
    let emp = empirical_joint_pmf(&vectors, t)?;
    let tv = tv_distance(&emp, &eta_joint_pmf(k, t)?)?;
    let cell_se = |m: f64| (m * (1.0 - m) / samples as f64).sqrt();
    let row = |label: String, value: f64, stderr: f64| Row {
        n,
        functional: label,
        value: Value::Float(value),
        stderr: Some(stderr),
        samples: Some(samples as u64),
        seed: cfg.seed,
    };
    report.rows.push(row(tv_label(k, t), tv, tv_noise_scale(&emp, samples)));
    for (cell, m) in emp.cells().filter(|(_, m)| *m > 0.0) {
        let coords: Vec<String> = cell.iter().map(ToString::to_string).collect();
        report
            .rows
            .push(row(format!("pmf({})", coords.join(",")), m, cell_se(m)));
    }
    report
        .rows
        .push(row("pmf_overflow".into(), emp.overflow(), cell_se(emp.overflow())));
    Ok(())
}

fn moments(cfg: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let n = cfg.n_value();
    let samples = cfg.samples.expect("validated");
    let factors = factors_at(&cfg.samplers, n)?;
    for f in &cfg.functionals {
        let est = moment_estimate(&factors, f, samples, cfg.seed)?;
        report.rows.push(estimate_row(n, est.spec.clone(), &est));
    }
    if let Some(k) = cfg.k {
        let tv = tv_to_eta(&factors, k, cfg.truncation, samples, cfg.seed)?;
        report.rows.push(Row {
            n,
            functional: tv_label(k, cfg.truncation),
            value: Value::Float(tv.value),
            stderr: Some(tv.noise),
            samples: Some(samples as u64),
            seed: cfg.seed,
        });
    }
    Ok(())
}

fn convergence(cfg: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let grid = cfg.n_grid.as_deref().expect("validated");
    let samples = cfg.samples.expect("validated");
    let mut metrics: Vec<Metric> = cfg
        .functionals
        .iter()
        .map(|f| Metric::Moment { functional: f.clone() })
        .collect();
    if let Some(k) = cfg.k {
        metrics.push(Metric::Tv {
            k,
            truncation: cfg.truncation,
        });
    }
    let mut rows: Vec<(usize, usize, ScanRow)> = Vec::new();
    let mut trends = Vec::new();
    for (order, metric) in metrics.iter().enumerate() {
        let table = convergence_scan(&cfg.samplers, metric, grid, samples, cfg.seed)?;
        trends.push(json!({ "functional": metric.describe(), "trend": table.trend }));
        rows.extend(table.rows.into_iter().map(|r| (r.n, order, r)));
    }
    rows.sort_by_key(|(n, order, _)| (*n, *order));
    report.rows.extend(rows.into_iter().map(|(_, _, r)| Row {
        n: r.n,
        functional: r.functional,
        value: Value::Float(r.value),
        stderr: Some(r.stderr),
        samples: Some(r.samples as u64),
        seed: r.seed,
    }));
    report.extra = json!({ "trends": trends });
    Ok(())
}

fn exact(cfg: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let n = cfg.n_value();
    let v = cfg.v_vec.as_deref().expect("validated");
    let d1 = ExactDistribution::from_law(&cfg.samplers[0], n)?;
    let d2 = ExactDistribution::from_law(&cfg.samplers[1], n)?;
    let list = v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
    let direct = exact_moment(&d1, &d2, v, ProductOrder::Direct)?;
    let inverse = exact_moment(&d1, &d2, v, ProductOrder::InverseFirst)?;
    let prob = exact_joint_cycle_prob(&d1, &d2, v)?;
    let scale = (0..v.len()).fold(BigRational::from_integer(1.into()), |acc, _| {
        acc * BigRational::from_integer(n.into())
    });
    report.rows.extend([
        exact_row(n, format!("joint_cycle_product({list})"), direct, cfg.seed),
        exact_row(
            n,
            format!("joint_cycle_product_inverse_first({list})"),
            inverse,
            cfg.seed,
        ),
        exact_row(n, format!("joint_cycle_prob({list})"), prob.clone(), cfg.seed),
        exact_row(n, format!("scaled_joint_cycle_prob({list})"), prob * scale, cfg.seed),
    ]);
    Ok(())
}

fn lemma_json(r: &LemmaReport) -> serde_json::Value {
    json!({ "lemma": r.lemma, "n": r.n, "checks": r.checks, "violations": r.violations, "holds": r.holds() })
}

/// Exhaustive lemma sweeps at `n`, single-permutation sweeps along the grid.
fn verify_lemmas(cfg: &ExperimentConfig, report: &mut Report) -> Result<bool> {
    let n = cfg.n_value();
    let laws: Vec<Law> = if cfg.samplers.is_empty() {
        [(1, 2), (1, 1), (2, 1)]
            .into_iter()
            .map(|(p, q)| Law::Ewens {
                theta: num_rational::Ratio::new(p, q),
            })
            .collect()
    } else {
        cfg.samplers.clone()
    };
    let dists = laws
        .iter()
        .map(|l| ExactDistribution::from_law(l, n))
        .collect::<Result<Vec<_>>>()?;
    let mut results = vec![
        lemmas::graph_invariants(n),
        lemmas::shared_cycle(n),
        lemmas::traversal_symmetry(n),
        lemmas::no_two_cycles(n),
        lemmas::event_identity(n),
        lemmas::conjugate_disjointness(n),
    ];

    let sweep = sweep_union_bounds(n, &dists)?;
    let group = |names: &[&str]| -> (u64, u64) {
        let checks = names
            .iter()
            .map(|k| sweep.by_lemma.get(k).copied().unwrap_or(0) as u64)
            .sum();
        let bad = sweep.violations.iter().filter(|c| names.contains(&c.lemma)).count() as u64;
        (checks, bad)
    };
    let bound_report = |lemma, names: &[&str]| {
        let (checks, violations) = group(names);
        LemmaReport {
            lemma,
            n,
            checks,
            violations,
        }
    };
    results.push(bound_report(
        "subgraph_probability_bound",
        &["subgraph_probability_bound", "subgraph_probability_bound_relaxed"],
    ));

    let grid: Vec<usize> = cfg.n_grid.clone().unwrap_or_else(|| (4..=cfg.single_max_n).collect());
    let mut decay = LemmaReport {
        lemma: "fixed_point_decay",
        n: *grid.last().unwrap_or(&n),
        checks: 0,
        violations: 0,
    };
    for d in &dists {
        let theta = match d.rule() {
            WeightRule::Ewens(theta) => theta.clone(),
            _ => to_big(&num_rational::Ratio::new(1, 1)),
        };
        for f in [1, 2] {
            decay.checks += 1;
            if !strictly_decreasing(&fixed_point_decay(&theta, f, &grid)?) {
                decay.violations += 1;
            }
        }
    }
    results.push(decay);
    results.push(bound_report("two_cycle_bound", &["two_cycle_bound"]));
    results.push(bound_report(
        "matching_sandwich",
        &["matching_lower_bound", "matching_upper_bound"],
    ));

    let m = cfg.single_max_n;
    let mut trace = LemmaReport {
        lemma: "trace_identity",
        n: m,
        checks: 0,
        violations: 0,
    };
    for p in Permutation::all(m) {
        let counts = p.cycle_counts();
        for k in 1..=6u64 {
            let divisor_sum: usize = (1..=k as usize)
                .filter(|d| (k as usize).is_multiple_of(*d))
                .map(|d| d * counts.get(d))
                .sum();
            trace.checks += 1;
            if p.power_fixed_points(k) != divisor_sum {
                trace.violations += 1;
            }
        }
    }
    results.push(trace);

    let violation = results.iter().any(|r| !r.holds());
    for r in &results {
        report.rows.push(Row {
            n: r.n,
            functional: r.lemma.to_string(),
            value: Value::Float(r.violations as f64),
            stderr: None,
            samples: Some(r.checks),
            seed: cfg.seed,
        });
    }
    let first_violations: Vec<_> = sweep.violations.iter().take(10).collect();
    report.extra = json!({
        "lemmas": results.iter().map(lemma_json).collect::<Vec<_>>(),
        "laws": laws.iter().map(Law::describe).collect::<Vec<_>>(),
        "union_graphs": sweep.graphs,
        "bound_violations": first_violations,
    });
    Ok(violation)
}

fn counterexample(cfg: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let n = cfg.n_value();
    let samples = cfg.samples.expect("validated");
    let factors = factors_at(&cfg.samplers, n)?;
    for v in [vec![1], vec![1, 1]] {
        let f = Functional::JointCycleProduct { v_vec: v };
        let est = moment_estimate(&factors, &f, samples, cfg.seed)?;
        report.rows.push(estimate_row(n, est.spec.clone(), &est));
    }
    let mut eps = [f64::INFINITY; 3];
    for (j, factor) in factors.iter().enumerate() {
        let single = std::slice::from_ref(factor);
        for (slot, f) in [Functional::H3 { k: 1 }, Functional::H3 { k: 2 }, Functional::H4 {}]
            .into_iter()
            .enumerate()
        {
            let est = moment_estimate(single, &f, samples, cfg.seed)?;
            eps[slot] = eps[slot].min(est.value);
            report
                .rows
                .push(estimate_row(n, format!("factor{}:{}", j + 1, est.spec), &est));
        }
    }
    let bound = |label: &str, value: f64| Row {
        n,
        functional: label.to_string(),
        value: Value::Float(value),
        stderr: None,
        samples: Some(samples as u64),
        seed: cfg.seed,
    };
    // E[ξ_1] = 1 and E[ξ_1²] = 2
    report.rows.push(bound("h3_lower_bound(1)", 1.0 + eps[0] * eps[0]));
    report.rows.push(bound("h3_lower_bound(2)", 2.0 + eps[1] * eps[1]));
    report.rows.push(bound("h4_lower_bound", 2.0 + eps[2] * eps[2]));
    Ok(())
}
