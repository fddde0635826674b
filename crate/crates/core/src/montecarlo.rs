//! Monte Carlo estimation over products of independently sampled factors.
//!
//! Draw `i` of factor `j` uses the ChaCha stream `i` of a key derived from
//! the run seed, `j` and the factor's own seed, so any draw can be replayed
//! in isolation. Per-draw values are computed in parallel, collected in draw
//! order and summed sequentially; results do not depend on the thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::sampler::{Law, RngStream, SamplerSpec};
use crate::stats::{empirical_joint_pmf, eta_joint_pmf, tv_distance, tv_noise_scale};

pub const MIN_SAMPLES: usize = 100;

/// A statistic of the product `σ_1 ∘ σ_2 ∘ ⋯ ∘ σ_m` of the factors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Functional {
    /// `Π_i #_{v_i}`
    JointCycleProduct { v_vec: Vec<usize> },
    /// `(#_1/√n)^k`
    H3 { k: u32 },
    /// `#_2/n`
    H4 {},
}

impl Functional {
    pub fn validate(&self) -> Result<()> {
        match self {
            Functional::JointCycleProduct { v_vec } => {
                if v_vec.is_empty() {
                    return Err(Error::param("v_vec", "must be non-empty"));
                }
                if v_vec.contains(&0) {
                    return Err(Error::param("v_vec", "cycle lengths must be positive"));
                }
                Ok(())
            }
            Functional::H3 { k } if *k == 0 => Err(Error::param("k", "must be >= 1")),
            _ => Ok(()),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Functional::JointCycleProduct { v_vec } => {
                let v: Vec<String> = v_vec.iter().map(ToString::to_string).collect();
                format!("joint_cycle_product({})", v.join(","))
            }
            Functional::H3 { k } => format!("h3({k})"),
            Functional::H4 {} => "h4".to_string(),
        }
    }

    pub fn evaluate(&self, pi: &Permutation) -> f64 {
        let n = pi.n() as f64;
        let counts = pi.cycle_counts();
        match self {
            Functional::JointCycleProduct { v_vec } => v_vec.iter().map(|&v| counts.get(v) as f64).product(),
            Functional::H3 { k } => (counts.get(1) as f64 / n.sqrt()).powi(*k as i32),
            Functional::H4 {} => counts.get(2) as f64 / n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
    pub spec: String,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic key derivation from several words.
pub fn mix_seed(words: &[u64]) -> u64 {
    words
        .iter()
        .fold(0x243f_6a88_85a3_08d3, |acc, &w| splitmix(acc ^ splitmix(w)))
}

fn common_n(factors: &[SamplerSpec]) -> Result<usize> {
    let first = factors.first().ok_or(Error::EmptyInput("factors"))?;
    for f in factors {
        if f.n != first.n {
            return Err(Error::SizeMismatch {
                left: first.n,
                right: f.n,
            });
        }
        f.law.validate(f.n)?;
    }
    Ok(first.n)
}

/// The product of draw `index` of every factor.
pub fn draw_product(factors: &[SamplerSpec], seed: u64, index: u64) -> Result<Permutation> {
    let mut acc: Option<Permutation> = None;
    for (j, f) in factors.iter().enumerate() {
        let key = mix_seed(&[seed, j as u64, f.seed]);
        let s = f.sample(&mut RngStream::new(key, index).rng())?;
        acc = Some(match acc {
            None => s,
            Some(a) => a.compose(&s)?,
        });
    }
    acc.ok_or(Error::EmptyInput("factors"))
}

/// `f(product)` for draws `0..samples`, in draw order.
pub fn map_draws<T: Send>(
    factors: &[SamplerSpec],
    samples: usize,
    seed: u64,
    f: impl Fn(&Permutation) -> T + Sync,
) -> Result<Vec<T>> {
    common_n(factors)?;
    (0..samples as u64)
        .into_par_iter()
        .map(|i| draw_product(factors, seed, i).map(|p| f(&p)))
        .collect()
}

pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let ss: f64 = values.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt() / n.sqrt())
}

pub fn moment_estimate(
    factors: &[SamplerSpec],
    functional: &Functional,
    samples: usize,
    seed: u64,
) -> Result<MomentEstimate> {
    functional.validate()?;
    if samples < MIN_SAMPLES {
        return Err(Error::param(
            "samples",
            format!("must be >= {MIN_SAMPLES}, got {samples}"),
        ));
    }
    let values = map_draws(factors, samples, seed, |p| functional.evaluate(p))?;
    let (value, stderr) = mean_and_stderr(&values);
    Ok(MomentEstimate {
        value,
        stderr,
        samples,
        seed,
        spec: functional.describe(),
    })
}

/// `(#_1, …, #_k)` of each product draw.
pub fn cycle_count_vectors(factors: &[SamplerSpec], k: usize, samples: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k == 0 {
        return Err(Error::param("k", "must be >= 1"));
    }
    map_draws(factors, samples, seed, |p| {
        let c = p.cycle_counts();
        (1..=k).map(|d| c.get(d)).collect()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TvEstimate {
    pub value: f64,
    pub noise: f64,
    pub samples: usize,
    pub seed: u64,
    pub k: usize,
    pub truncation: usize,
}

/// TV between the empirical law of `(#_1, …, #_k)(product)` and `η_k`.
pub fn tv_to_eta(
    factors: &[SamplerSpec],
    k: usize,
    truncation: usize,
    samples: usize,
    seed: u64,
) -> Result<TvEstimate> {
    if samples == 0 {
        return Err(Error::param("samples", "must be positive"));
    }
    let vectors = cycle_count_vectors(factors, k, samples, seed)?;
    let emp = empirical_joint_pmf(&vectors, truncation)?;
    let value = tv_distance(&emp, &eta_joint_pmf(k, truncation)?)?;
    Ok(TvEstimate {
        value,
        noise: tv_noise_scale(&emp, samples),
        samples,
        seed,
        k,
        truncation,
    })
}

/// What a convergence scan measures at each grid point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "metric", rename_all = "snake_case", deny_unknown_fields)]
pub enum Metric {
    Moment { functional: Functional },
    Tv { k: usize, truncation: usize },
}

impl Metric {
    pub fn describe(&self) -> String {
        match self {
            Metric::Moment { functional } => functional.describe(),
            Metric::Tv { k, truncation } => format!("tv_eta(k={k},T={truncation})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub n: usize,
    pub functional: String,
    pub value: f64,
    /// standard error, or the TV noise scale
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Trend {
    pub strictly_decreasing: bool,
    /// `v_j ≤ v_i + 2·sqrt(se_i² + se_j²)` for all `i < j`
    pub non_increasing_within_noise: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanTable {
    pub rows: Vec<ScanRow>,
    pub trend: Option<Trend>,
}

pub fn trend_of(rows: &[ScanRow]) -> Option<Trend> {
    if rows.len() < 2 {
        return None;
    }
    let strictly_decreasing = rows.windows(2).all(|w| w[1].value < w[0].value);
    let mut within = true;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let noise = 2.0 * (rows[i].stderr.powi(2) + rows[j].stderr.powi(2)).sqrt();
            within &= rows[j].value <= rows[i].value + noise;
        }
    }
    Some(Trend {
        strictly_decreasing,
        non_increasing_within_noise: within,
    })
}

/// Runs `metric` at every `n` of an increasing grid. Grid point `n` uses
/// the seed `mix_seed([seed, n])`, reported in its row.
pub fn convergence_scan(
    laws: &[Law],
    metric: &Metric,
    n_grid: &[usize],
    samples: usize,
    seed: u64,
) -> Result<ScanTable> {
    if n_grid.is_empty() {
        return Err(Error::param("n_grid", "must be non-empty"));
    }
    if n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("n_grid", "must be strictly increasing"));
    }
    if laws.is_empty() {
        return Err(Error::EmptyInput("samplers"));
    }
    let mut rows = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let row_seed = mix_seed(&[seed, n as u64]);
        let factors = laws
            .iter()
            .enumerate()
            .map(|(j, law)| law.at(n, j as u64))
            .collect::<Result<Vec<_>>>()?;
        let (value, stderr) = match metric {
            Metric::Moment { functional } => {
                let est = moment_estimate(&factors, functional, samples, row_seed)?;
                (est.value, est.stderr)
            }
            Metric::Tv { k, truncation } => {
                let est = tv_to_eta(&factors, *k, *truncation, samples, row_seed)?;
                (est.value, est.noise)
            }
        };
        rows.push(ScanRow {
            n,
            functional: metric.describe(),
            value,
            stderr,
            samples,
            seed: row_seed,
        });
    }
    let trend = trend_of(&rows);
    Ok(ScanTable { rows, trend })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TraceIdentityReport {
    pub draws: usize,
    pub checks: u64,
    pub mismatches: u64,
}

/// For each draw and `k ≤ k_max`, compares the fixed points of `π^k`
/// (explicit power) with `Σ_{d|k} d·#_d(π)`.
pub fn trace_identity_check(
    factors: &[SamplerSpec],
    k_max: u64,
    samples: usize,
    seed: u64,
) -> Result<TraceIdentityReport> {
    let per_draw = map_draws(factors, samples, seed, |p| {
        let counts = p.cycle_counts();
        (1..=k_max)
            .filter(|&k| {
                let divisor_sum: usize = (1..=k as usize)
                    .filter(|d| (k as usize).is_multiple_of(*d))
                    .map(|d| d * counts.get(d))
                    .sum();
                p.power_fixed_points(k) != divisor_sum
            })
            .count() as u64
    })?;
    Ok(TraceIdentityReport {
        draws: samples,
        checks: samples as u64 * k_max,
        mismatches: per_draw.iter().sum(),
    })
}
