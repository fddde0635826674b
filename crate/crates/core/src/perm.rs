//! Permutations of `{1, …, n}` and their cycle statistics.
//!
//! Indices are 1-based at the public surface. Internally a permutation is a
//! 0-based image table, which is what the enumeration and sampling code
//! works with directly.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of the symmetric group on `n` points.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation from its one-line notation (1-based images).
    pub fn from_images(images: &[usize]) -> Result<Self> {
        if images.is_empty() {
            return Err(Error::EmptyGroundSet);
        }
        let n = images.len();
        let mut zero = Vec::with_capacity(n);
        for &x in images {
            if x == 0 || x > n {
                return Err(Error::NotBijective(format!("image {x} outside 1..={n}")));
            }
            zero.push(x - 1);
        }
        Self::from_zero_based(zero)
    }

    /// Builds a permutation from a 0-based image table, checking bijectivity.
    pub fn from_zero_based(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::NotBijective(format!("image {} repeated or out of range", x + 1)));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    /// Caller guarantees `images` is a bijection of `0..images.len()`.
    pub(crate) fn from_zero_based_unchecked(images: Vec<usize>) -> Self {
        debug_assert!(Self::from_zero_based(images.clone()).is_ok());
        Permutation { images }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    /// `σ(i)` for a 1-based index `i`.
    ///
    /// Panics if `i` is outside `1..=n`.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1] + 1
    }

    /// One-line notation, 1-based.
    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.images.iter().map(|&x| x + 1)
    }

    pub fn as_zero_based(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        check_same_size(self.n(), other.n())?;
        Ok(Permutation {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { images: inv }
    }

    /// `t⁻¹ ∘ self ∘ t`.
    pub fn conjugate(&self, t: &Permutation) -> Result<Permutation> {
        check_same_size(self.n(), t.n())?;
        let t_inv = t.inverse();
        Ok(Permutation {
            images: t.images.iter().map(|&x| t_inv.images[self.images[x]]).collect(),
        })
    }

    /// `self^k`, by repeated squaring.
    pub fn pow(&self, mut k: u64) -> Permutation {
        let mut base = self.clone();
        let mut acc = Permutation::identity(self.n());
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&base).expect("same size");
            }
            base = base.compose(&base).expect("same size");
            k >>= 1;
        }
        acc
    }

    /// The cycle through `m` as `(m, σ(m), σ²(m), …)`, 1-based.
    pub fn cycle_of(&self, m: usize) -> Result<Vec<usize>> {
        let n = self.n();
        if m == 0 || m > n {
            return Err(Error::IndexOutOfRange { index: m, n });
        }
        let start = m - 1;
        let mut cycle = vec![m];
        let mut x = self.images[start];
        while x != start {
            cycle.push(x + 1);
            x = self.images[x];
        }
        Ok(cycle)
    }

    /// Length of the cycle through the 0-based point `i`.
    pub(crate) fn cycle_len0(&self, i: usize) -> usize {
        let mut len = 1;
        let mut x = self.images[i];
        while x != i {
            len += 1;
            x = self.images[x];
        }
        len
    }

    pub fn cycle_counts(&self) -> CycleCounts {
        let n = self.n();
        let mut counts = vec![0usize; n];
        let mut seen = vec![false; n];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x];
                len += 1;
            }
            counts[len - 1] += 1;
        }
        CycleCounts { counts }
    }

    /// `tr(σ^k) = Σ_{j | k} j·#_j σ`.
    ///
    /// Debug builds cross-check against [`Permutation::power_fixed_points`].
    pub fn trace_power(&self, k: u64) -> usize {
        let value = self.cycle_counts().trace_power(k);
        debug_assert_eq!(value, self.power_fixed_points(k));
        value
    }

    /// `#{i : σ^k(i) = i}`, counted on the explicit power `σ^k`.
    pub fn power_fixed_points(&self, k: u64) -> usize {
        let power = self.pow(k);
        power.images.iter().enumerate().filter(|(i, &x)| *i == x).count()
    }

    /// Every permutation of `n` points in lexicographic order of one-line notation.
    pub fn all(n: usize) -> AllPermutations {
        AllPermutations {
            next: Some((0..n).collect()),
        }
    }
}

fn check_same_size(left: usize, right: usize) -> Result<()> {
    if left != right {
        Err(Error::SizeMismatch { left, right })
    } else {
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{self}]")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for x in self.images() {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let images = s
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad image `{tok}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::from_images(&images)
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Lexicographic enumeration of the symmetric group.
pub struct AllPermutations {
    next: Option<Vec<usize>>,
}

impl Iterator for AllPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_lexicographic(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation { images: current })
    }
}

fn next_lexicographic(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Number of cycles of each length; doubles as the cycle type.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CycleCounts {
    /// `counts[k - 1] = #_k`.
    counts: Vec<usize>,
}

impl CycleCounts {
    /// Validates `Σ k·#_k = n` for `counts[k - 1] = #_k`.
    pub fn new(n: usize, mut counts: Vec<usize>) -> Result<Self> {
        if counts.len() > n {
            if counts[n..].iter().any(|&c| c != 0) {
                return Err(Error::param("counts", "cycle longer than n"));
            }
            counts.truncate(n);
        }
        counts.resize(n, 0);
        let total: usize = counts.iter().enumerate().map(|(i, c)| (i + 1) * c).sum();
        if total != n {
            return Err(Error::param(
                "counts",
                format!("cycle lengths sum to {total}, expected {n}"),
            ));
        }
        Ok(CycleCounts { counts })
    }

    /// From a list of cycle lengths in any order.
    pub fn from_lengths(n: usize, lengths: &[usize]) -> Result<Self> {
        let mut counts = vec![0; n.max(lengths.iter().copied().max().unwrap_or(0))];
        for &len in lengths {
            if len == 0 {
                return Err(Error::param("lengths", "zero-length cycle"));
            }
            counts[len - 1] += 1;
        }
        CycleCounts::new(n, counts)
    }

    pub fn n(&self) -> usize {
        self.counts.len()
    }

    /// `#_k`; zero for `k = 0` or `k > n`.
    pub fn get(&self, k: usize) -> usize {
        if k == 0 {
            0
        } else {
            self.counts.get(k - 1).copied().unwrap_or(0)
        }
    }

    /// `#σ`.
    pub fn total_cycles(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Non-zero `(length, count)` pairs in increasing length.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i + 1, c))
    }

    /// Cycle lengths in non-increasing order, each repeated by multiplicity.
    pub fn lengths(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.total_cycles());
        for (len, count) in self.iter().collect::<Vec<_>>().into_iter().rev() {
            out.extend(std::iter::repeat_n(len, count));
        }
        out
    }

    pub fn trace_power(&self, k: u64) -> usize {
        self.iter()
            .filter(|&(len, _)| k.is_multiple_of(len as u64))
            .map(|(len, count)| len * count)
            .sum()
    }

    /// Size of the conjugacy class: `n! / Π_k k^{#_k} #_k!`.
    pub fn class_size(&self) -> BigUint {
        let mut denom = BigUint::one();
        for (len, count) in self.iter() {
            denom *= BigUint::from(len).pow(count as u32) * factorial(count);
        }
        factorial(self.n()) / denom
    }

    /// A fixed representative: cycles laid out over consecutive points,
    /// longest first.
    pub fn representative(&self) -> Permutation {
        lay_out_cycles(&(0..self.n()).collect::<Vec<_>>(), &self.lengths())
    }

    /// All cycle types of `n`, i.e. the integer partitions of `n`.
    pub fn all(n: usize) -> Vec<CycleCounts> {
        let mut out = Vec::new();
        let mut parts = Vec::new();
        partitions_rec(n, n, &mut parts, &mut out);
        out.into_iter()
            .map(|p| CycleCounts::from_lengths(n, &p).expect("valid partition"))
            .collect()
    }
}

fn partitions_rec(rest: usize, max: usize, parts: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if rest == 0 {
        out.push(parts.clone());
        return;
    }
    for part in (1..=max.min(rest)).rev() {
        parts.push(part);
        partitions_rec(rest - part, part, parts, out);
        parts.pop();
    }
}

/// Builds the permutation whose cycles read consecutive runs of `order`
/// (0-based points), with run lengths `lengths`.
pub(crate) fn lay_out_cycles(order: &[usize], lengths: &[usize]) -> Permutation {
    let mut images = vec![0; order.len()];
    let mut start = 0;
    for &len in lengths {
        let run = &order[start..start + len];
        for (i, &x) in run.iter().enumerate() {
            images[x] = run[(i + 1) % len];
        }
        start += len;
    }
    debug_assert_eq!(start, order.len());
    Permutation::from_zero_based_unchecked(images)
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}
