//! Seeded samplers for conjugation-invariant permutation laws.
//!
//! Every law here is invariant under conjugation: uniform and Ewens by their
//! weights, and the two deterministic-cycle-type families because they are
//! uniform on a single conjugacy class.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{lay_out_cycles, CycleCounts, Permutation};
use crate::rational::{format_rational, serde_rational, Rational};

/// A reproducible random stream: ChaCha8 keyed by `seed`, positioned on
/// stream `stream_id`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Number of fixed points for the `sqrt_fixed` family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FixedCount {
    Exact(usize),
    /// `⌊√n⌋`, resolved against the ground-set size.
    Sqrt(SqrtTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SqrtTag {
    Sqrt,
}

impl FixedCount {
    pub const SQRT: FixedCount = FixedCount::Sqrt(SqrtTag::Sqrt);

    pub fn resolve(self, n: usize) -> usize {
        match self {
            FixedCount::Exact(f) => f,
            FixedCount::Sqrt(_) => n.isqrt(),
        }
    }
}

/// A permutation law, independent of the ground-set size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Law {
    Uniform {},
    Ewens {
        #[serde(with = "serde_rational")]
        theta: Rational,
    },
    SqrtFixed {
        fixed_count: FixedCount,
    },
    MatchingHeavy {
        #[serde(with = "serde_rational")]
        two_cycle_fraction: Rational,
    },
}

impl Law {
    pub fn describe(&self) -> String {
        match self {
            Law::Uniform {} => "uniform".to_string(),
            Law::Ewens { theta } => format!("ewens({})", format_rational(theta)),
            Law::SqrtFixed { fixed_count } => match fixed_count {
                FixedCount::Exact(f) => format!("sqrt_fixed({f})"),
                FixedCount::Sqrt(_) => "sqrt_fixed(sqrt)".to_string(),
            },
            Law::MatchingHeavy { two_cycle_fraction } => {
                format!("matching_heavy({})", format_rational(two_cycle_fraction))
            }
        }
    }

    /// The forced cycle type of the deterministic-type families at size `n`.
    pub fn fixed_cycle_type(&self, n: usize) -> Result<Option<CycleCounts>> {
        match self {
            Law::Uniform {} | Law::Ewens { .. } => Ok(None),
            Law::SqrtFixed { fixed_count } => sqrt_fixed_type(n, fixed_count.resolve(n)).map(Some),
            Law::MatchingHeavy { two_cycle_fraction } => matching_heavy_type(n, *two_cycle_fraction).map(Some),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::EmptyGroundSet);
        }
        match self {
            Law::Uniform {} => Ok(()),
            Law::Ewens { theta } => check_theta(*theta),
            _ => self.fixed_cycle_type(n).map(|_| ()),
        }
    }

    pub fn at(&self, n: usize, seed: u64) -> Result<SamplerSpec> {
        self.validate(n)?;
        Ok(SamplerSpec {
            law: self.clone(),
            n,
            seed,
        })
    }
}

/// A validated sampler: law, ground-set size, and seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerSpec {
    #[serde(flatten)]
    pub law: Law,
    pub n: usize,
    pub seed: u64,
}

impl SamplerSpec {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Permutation> {
        match &self.law {
            Law::Uniform {} => sample_uniform(self.n, rng),
            Law::Ewens { theta } => sample_ewens(self.n, *theta, rng),
            Law::SqrtFixed { fixed_count } => sample_sqrt_fixed(self.n, fixed_count.resolve(self.n), rng),
            Law::MatchingHeavy { two_cycle_fraction } => sample_matching_heavy(self.n, *two_cycle_fraction, rng),
        }
    }
}

/// Uniform on the symmetric group via an unbiased Fisher–Yates shuffle.
pub fn sample_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Permutation> {
    if n == 0 {
        return Err(Error::EmptyGroundSet);
    }
    let mut images: Vec<usize> = (0..n).collect();
    images.shuffle(rng);
    Ok(Permutation::from_zero_based_unchecked(images))
}

fn check_theta(theta: Rational) -> Result<()> {
    if theta < Rational::from_integer(0) {
        Err(Error::param(
            "theta",
            format!("must be >= 0, got {}", format_rational(&theta)),
        ))
    } else {
        Ok(())
    }
}

/// Sequential construction of an Ewens permutation: point `i` either opens a
/// new cycle or is spliced in right after an earlier point.
#[derive(Debug, Clone, Default)]
pub(crate) struct EwensInsertion {
    images: Vec<usize>,
}

impl EwensInsertion {
    pub(crate) fn len(&self) -> usize {
        self.images.len()
    }

    pub(crate) fn open_cycle(&mut self) {
        let i = self.images.len();
        self.images.push(i);
    }

    /// Inserts the next point immediately after the 0-based point `j`.
    pub(crate) fn insert_after(&mut self, j: usize) {
        let i = self.images.len();
        debug_assert!(j < i);
        self.images.push(self.images[j]);
        self.images[j] = i;
    }

    pub(crate) fn finish(self) -> Permutation {
        Permutation::from_zero_based_unchecked(self.images)
    }
}

/// Ewens(θ): `P(σ) = θ^{#σ} / θ(θ+1)⋯(θ+n−1)`.
///
/// With `θ = p/q`, step `i` draws one integer in `[0, p + q(i−1))`, so the
/// branch probabilities are exact. θ = 0 yields a uniform `n`-cycle.
pub fn sample_ewens<R: Rng + ?Sized>(n: usize, theta: Rational, rng: &mut R) -> Result<Permutation> {
    if n == 0 {
        return Err(Error::EmptyGroundSet);
    }
    check_theta(theta)?;
    let p = *theta.numer() as u128;
    let q = *theta.denom() as u128;
    let mut build = EwensInsertion::default();
    build.open_cycle();
    for i in 1..n {
        let u = rng.random_range(0..p + q * i as u128);
        if u < p {
            build.open_cycle();
        } else {
            build.insert_after(((u - p) / q) as usize);
        }
    }
    debug_assert_eq!(build.len(), n);
    Ok(build.finish())
}

/// Uniform element of the conjugacy class of `cycle_type`: shuffle the points,
/// then cut the shuffled order into cycles.
pub fn sample_with_cycle_type<R: Rng + ?Sized>(cycle_type: &CycleCounts, rng: &mut R) -> Permutation {
    let mut order: Vec<usize> = (0..cycle_type.n()).collect();
    order.shuffle(rng);
    lay_out_cycles(&order, &cycle_type.lengths())
}

fn sqrt_fixed_type(n: usize, fixed_count: usize) -> Result<CycleCounts> {
    if n == 0 {
        return Err(Error::EmptyGroundSet);
    }
    if fixed_count > n {
        return Err(Error::param("fixed_count", format!("{fixed_count} exceeds n = {n}")));
    }
    let rest = n - fixed_count;
    if rest == 1 {
        return Err(Error::param(
            "fixed_count",
            "n - fixed_count = 1 leaves a single non-fixed point",
        ));
    }
    let mut lengths = vec![1; fixed_count];
    if rest > 0 {
        lengths.push(rest);
    }
    CycleCounts::from_lengths(n, &lengths)
}

fn matching_heavy_type(n: usize, fraction: Rational) -> Result<CycleCounts> {
    if n == 0 {
        return Err(Error::EmptyGroundSet);
    }
    if fraction < Rational::from_integer(0) || fraction > Rational::new(1, 2) {
        return Err(Error::param(
            "two_cycle_fraction",
            format!("{} not in [0, 1/2]", format_rational(&fraction)),
        ));
    }
    let m = (fraction * Rational::from_integer(n as i64)).floor().to_integer() as usize;
    let rest = n - 2 * m;
    if rest == 1 || rest == 2 {
        return Err(Error::param(
            "two_cycle_fraction",
            format!("n - 2m = {rest}; the remaining cycle would have length 1 or 2"),
        ));
    }
    let mut lengths = vec![2; m];
    if rest > 0 {
        lengths.push(rest);
    }
    CycleCounts::from_lengths(n, &lengths)
}

/// `fixed_count` fixed points plus one cycle on the rest, uniformly conjugated.
pub fn sample_sqrt_fixed<R: Rng + ?Sized>(n: usize, fixed_count: usize, rng: &mut R) -> Result<Permutation> {
    let cycle_type = sqrt_fixed_type(n, fixed_count)?;
    Ok(sample_with_cycle_type(&cycle_type, rng))
}

/// `⌊fraction·n⌋` transpositions plus one long cycle on the rest, uniformly
/// conjugated.
pub fn sample_matching_heavy<R: Rng + ?Sized>(
    n: usize,
    two_cycle_fraction: Rational,
    rng: &mut R,
) -> Result<Permutation> {
    let cycle_type = matching_heavy_type(n, two_cycle_fraction)?;
    Ok(sample_with_cycle_type(&cycle_type, rng))
}
