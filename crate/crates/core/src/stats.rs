//! Lattice pmfs on `ℕ^k` truncated at `T` per coordinate, with the
//! product-Poisson reference law and total variation.

use crate::error::{Error, Result};

const MAX_CELLS: usize = 1 << 24;

/// Cells `(t_1, …, t_k)` with every `t_i ≤ T`; everything else is lumped
/// into `overflow`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    k: usize,
    truncation: usize,
    mass: Vec<f64>,
    overflow: f64,
}

fn cell_count(k: usize, truncation: usize) -> Result<usize> {
    if k == 0 {
        return Err(Error::param("k", "must be >= 1"));
    }
    let side = truncation + 1;
    let mut cells = 1usize;
    for _ in 0..k {
        cells = cells
            .checked_mul(side)
            .filter(|&c| c <= MAX_CELLS)
            .ok_or_else(|| Error::param("truncation", format!("(T+1)^k exceeds {MAX_CELLS} cells")))?;
    }
    Ok(cells)
}

impl JointPmf {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn overflow(&self) -> f64 {
        self.overflow
    }

    fn index(&self, t: &[usize]) -> Option<usize> {
        if t.len() != self.k || t.iter().any(|&x| x > self.truncation) {
            return None;
        }
        let side = self.truncation + 1;
        Some(t.iter().rev().fold(0, |acc, &x| acc * side + x))
    }

    /// Mass at an in-range cell; 0 for cells beyond the truncation.
    pub fn mass(&self, t: &[usize]) -> f64 {
        self.index(t).map_or(0.0, |i| self.mass[i])
    }

    /// In-range cells and their masses, first coordinate fastest.
    pub fn cells(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        let side = self.truncation + 1;
        let k = self.k;
        self.mass.iter().enumerate().map(move |(mut i, &m)| {
            let mut t = Vec::with_capacity(k);
            for _ in 0..k {
                t.push(i % side);
                i /= side;
            }
            (t, m)
        })
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum::<f64>() + self.overflow
    }

    /// Mean of coordinate `d` (1-based) restricted to the in-range cells.
    pub fn truncated_mean(&self, d: usize) -> f64 {
        self.cells().map(|(t, m)| t[d - 1] as f64 * m).sum()
    }
}

/// `e^{−λ} λ^j / j!` for `j = 0..=max`.
pub fn poisson_pmf(lambda: f64, max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut term = (-lambda).exp();
    for j in 0..=max {
        out.push(term);
        term *= lambda / (j + 1) as f64;
    }
    out
}

/// Independent `Poisson(1/d)` coordinates, `d = 1..=k`.
pub fn eta_joint_pmf(k: usize, truncation: usize) -> Result<JointPmf> {
    let cells = cell_count(k, truncation)?;
    let marginals: Vec<Vec<f64>> = (1..=k).map(|d| poisson_pmf(1.0 / d as f64, truncation)).collect();
    let mut pmf = JointPmf {
        k,
        truncation,
        mass: vec![0.0; cells],
        overflow: 0.0,
    };
    let side = truncation + 1;
    for (i, slot) in pmf.mass.iter_mut().enumerate() {
        let mut rest = i;
        let mut m = 1.0;
        for marg in &marginals {
            m *= marg[rest % side];
            rest /= side;
        }
        *slot = m;
    }
    // 1 − Π_d (1 − P(ξ_d > T)), without cancelling against the head sums
    let log_inside: f64 = marginals
        .iter()
        .enumerate()
        .map(|(d, m)| (-poisson_tail(1.0 / (d + 1) as f64, truncation, m)).ln_1p())
        .sum();
    pmf.overflow = -log_inside.exp_m1();
    Ok(pmf)
}

/// `P(Poisson(λ) > T)` by summing the series beyond `T`.
fn poisson_tail(lambda: f64, truncation: usize, head: &[f64]) -> f64 {
    let mut term = head[truncation] * lambda / (truncation + 1) as f64;
    let mut acc = 0.0;
    let mut j = truncation + 1;
    while term > 0.0 && term > acc * 1e-18 {
        acc += term;
        j += 1;
        term *= lambda / j as f64;
    }
    acc
}

/// Relative frequencies of the `k`-vectors in `samples`.
pub fn empirical_joint_pmf(samples: &[Vec<usize>], truncation: usize) -> Result<JointPmf> {
    let first = samples.first().ok_or(Error::EmptyInput("samples"))?;
    let k = first.len();
    let cells = cell_count(k, truncation)?;
    let mut pmf = JointPmf {
        k,
        truncation,
        mass: vec![0.0; cells],
        overflow: 0.0,
    };
    let mut counts = vec![0u64; cells];
    let mut over = 0u64;
    for s in samples {
        if s.len() != k {
            return Err(Error::ShapeMismatch(format!(
                "sample of length {} among length {k}",
                s.len()
            )));
        }
        match pmf.index(s) {
            Some(i) => counts[i] += 1,
            None => over += 1,
        }
    }
    let total = samples.len() as f64;
    for (m, c) in pmf.mass.iter_mut().zip(counts) {
        *m = c as f64 / total;
    }
    pmf.overflow = over as f64 / total;
    Ok(pmf)
}

/// `½ Σ |p − q|` over the in-range cells and the overflow cell.
pub fn tv_distance(p: &JointPmf, q: &JointPmf) -> Result<f64> {
    if p.k != q.k || p.truncation != q.truncation {
        return Err(Error::ShapeMismatch(format!(
            "k={}, T={} against k={}, T={}",
            p.k, p.truncation, q.k, q.truncation
        )));
    }
    let cells: f64 = p.mass.iter().zip(&q.mass).map(|(a, b)| (a - b).abs()).sum();
    Ok((0.5 * (cells + (p.overflow - q.overflow).abs())).min(1.0))
}

/// Rough noise scale of a TV estimate from `samples` draws:
/// `½ Σ_cells sqrt(p̂(1 − p̂)/N)`.
pub fn tv_noise_scale(empirical: &JointPmf, samples: usize) -> f64 {
    let n = samples as f64;
    let cell = |m: f64| (m * (1.0 - m) / n).sqrt();
    0.5 * (empirical.mass.iter().map(|&m| cell(m)).sum::<f64>() + cell(empirical.overflow))
}
