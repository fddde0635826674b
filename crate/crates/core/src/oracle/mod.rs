//! Exact enumeration over `𝔖_n` and `𝔖_n × 𝔖_n` in rational arithmetic.
//!
//! Laws are conjugation invariant, so a law is stored as the total mass of
//! each cycle type. Pair computations fix one representative per cycle type
//! of the first factor and enumerate the second factor in full, which costs
//! `p(n)·n!` instead of `(n!)²`. A brute-force pair route is kept alongside
//! for cross-checking.

pub mod bounds;

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{canonical_class, is_t_class, membership, DirectedGraph, GraphClass, PairView};
use crate::perm::{factorial, CycleCounts, Permutation};
use crate::rational::{format_big, to_big};
use crate::sampler::Law;

/// How the first-moment and cycle-count functionals combine the factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductOrder {
    /// `σρ`
    Direct,
    /// `σ⁻¹ρ`
    InverseFirst,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightRule {
    Uniform,
    Ewens(BigRational),
    /// Total mass per cycle type, spread evenly over each class.
    Explicit(BTreeMap<CycleCounts, BigRational>),
}

/// A conjugation-invariant law on `𝔖_n` with exact weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDistribution {
    n: usize,
    rule: WeightRule,
    classes: Vec<ClassMass>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct ClassMass {
    cycle_type: CycleCounts,
    size: BigUint,
    mass: BigRational,
    /// mass / size
    point_mass: BigRational,
}

/// A pmf on `𝔖_n` as explicit `(permutation, probability)` rows.
pub type PermutationPmf = Vec<(Permutation, BigRational)>;

fn big(x: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(x.into())
}

fn big_u(x: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x.clone()))
}

/// `θ(θ+1)⋯(θ+n−1)`
fn rising(theta: &BigRational, n: usize) -> BigRational {
    (0..n).fold(BigRational::one(), |acc, i| acc * (theta + big(i as u64)))
}

/// The Ewens weight `θ^{#σ} / θ(θ+1)⋯(θ+n−1)`; for θ = 0 the limit law,
/// uniform on `n`-cycles.
pub fn ewens_weight(sigma: &Permutation, theta: &BigRational) -> Result<BigRational> {
    if theta.is_negative() {
        return Err(Error::param(
            "theta",
            format!("must be >= 0, got {}", format_big(theta)),
        ));
    }
    let n = sigma.n();
    let cycles = sigma.cycle_counts().total_cycles();
    if theta.is_zero() {
        return Ok(if cycles == 1 {
            BigRational::new(BigInt::one(), BigInt::from(factorial(n - 1)))
        } else {
            BigRational::zero()
        });
    }
    Ok(num_traits::pow(theta.clone(), cycles) / rising(theta, n))
}

impl ExactDistribution {
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGroundSet);
        }
        let n_fact = big_u(&factorial(n));
        let masses = CycleCounts::all(n)
            .into_iter()
            .map(|t| {
                let m = big_u(&t.class_size()) / &n_fact;
                (t, m)
            })
            .collect();
        Ok(Self::build(n, WeightRule::Uniform, masses))
    }

    pub fn ewens(n: usize, theta: BigRational) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGroundSet);
        }
        if theta.is_negative() {
            return Err(Error::param(
                "theta",
                format!("must be >= 0, got {}", format_big(&theta)),
            ));
        }
        if theta.is_zero() {
            let mut single = BTreeMap::new();
            single.insert(CycleCounts::from_lengths(n, &[n])?, BigRational::one());
            return Self::explicit(n, single);
        }
        let norm = rising(&theta, n);
        let masses = CycleCounts::all(n)
            .into_iter()
            .map(|t| {
                let m = big_u(&t.class_size()) * num_traits::pow(theta.clone(), t.total_cycles()) / &norm;
                (t, m)
            })
            .collect();
        Ok(Self::build(n, WeightRule::Ewens(theta), masses))
    }

    /// Class masses are normalised to total one.
    pub fn explicit(n: usize, masses: BTreeMap<CycleCounts, BigRational>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGroundSet);
        }
        let mut total = BigRational::zero();
        for (t, m) in &masses {
            if t.n() != n {
                return Err(Error::SizeMismatch { left: t.n(), right: n });
            }
            if m.is_negative() {
                return Err(Error::param("weights", "negative class mass"));
            }
            total += m;
        }
        if total.is_zero() {
            return Err(Error::param("weights", "total mass is zero"));
        }
        let normalised: BTreeMap<_, _> = masses.into_iter().map(|(t, m)| (t, m / &total)).collect();
        let all = CycleCounts::all(n)
            .into_iter()
            .map(|t| {
                let m = normalised.get(&t).cloned().unwrap_or_else(BigRational::zero);
                (t, m)
            })
            .collect();
        Ok(Self::build(n, WeightRule::Explicit(normalised), all))
    }

    /// Averages an arbitrary law over conjugation: each class receives the
    /// total mass its members had.
    pub fn conjugation_average(n: usize, pmf: &[(Permutation, BigRational)]) -> Result<Self> {
        let mut masses: BTreeMap<CycleCounts, BigRational> = BTreeMap::new();
        for (s, w) in pmf {
            if s.n() != n {
                return Err(Error::SizeMismatch { left: s.n(), right: n });
            }
            *masses.entry(s.cycle_counts()).or_insert_with(BigRational::zero) += w;
        }
        Self::explicit(n, masses)
    }

    /// Exact counterpart of a sampler law at size `n`.
    pub fn from_law(law: &Law, n: usize) -> Result<Self> {
        law.validate(n)?;
        match law {
            Law::Uniform {} => Self::uniform(n),
            Law::Ewens { theta } => Self::ewens(n, to_big(theta)),
            _ => {
                let t = law.fixed_cycle_type(n)?.expect("deterministic family");
                Self::explicit(n, BTreeMap::from([(t, BigRational::one())]))
            }
        }
    }

    fn build(n: usize, rule: WeightRule, masses: Vec<(CycleCounts, BigRational)>) -> Self {
        let classes = masses
            .into_iter()
            .map(|(cycle_type, mass)| {
                let size = cycle_type.class_size();
                let point_mass = &mass / big_u(&size);
                ClassMass {
                    cycle_type,
                    size,
                    mass,
                    point_mass,
                }
            })
            .collect();
        ExactDistribution { n, rule, classes }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rule(&self) -> &WeightRule {
        &self.rule
    }

    /// `(cycle type, total class mass)` for every cycle type of `n`.
    pub fn class_masses(&self) -> impl Iterator<Item = (&CycleCounts, &BigRational)> {
        self.classes.iter().map(|c| (&c.cycle_type, &c.mass))
    }

    pub fn total_mass(&self) -> BigRational {
        self.classes.iter().map(|c| &c.mass).sum()
    }

    fn class_index(&self) -> HashMap<CycleCounts, usize> {
        self.classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.cycle_type.clone(), i))
            .collect()
    }

    pub fn prob(&self, sigma: &Permutation) -> BigRational {
        let t = sigma.cycle_counts();
        self.classes
            .iter()
            .find(|c| c.cycle_type == t)
            .map(|c| c.point_mass.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn pmf_table(&self) -> PermutationPmf {
        Permutation::all(self.n)
            .map(|s| {
                let p = self.prob(&s);
                (s, p)
            })
            .collect()
    }

    /// `E[f(cycle type)]`.
    pub fn expect_type(&self, f: impl Fn(&CycleCounts) -> BigRational) -> BigRational {
        self.classes
            .iter()
            .filter(|c| !c.mass.is_zero())
            .map(|c| &c.mass * f(&c.cycle_type))
            .sum()
    }

    /// `E[(#_len σ)^power]`.
    pub fn expect_cycle_power(&self, len: usize, power: u32) -> BigRational {
        self.expect_type(|t| big(t.get(len) as u64).pow(power as i32))
    }

    /// `P(σ(1) = 1, …, σ(f) = f)`: within a class of type λ the fraction
    /// fixing `1..=f` is `|C_{λ − f·(1)}(n − f)| / |C_λ(n)|`.
    pub fn prob_first_fixed(&self, f: usize) -> BigRational {
        if f > self.n {
            return BigRational::zero();
        }
        self.expect_type(|t| {
            if t.get(1) < f {
                return BigRational::zero();
            }
            let mut lengths = t.lengths();
            for _ in 0..f {
                let pos = lengths.iter().rposition(|&l| l == 1).expect("enough fixed points");
                lengths.remove(pos);
            }
            let reduced = CycleCounts::from_lengths(self.n - f, &lengths).expect("valid type");
            big_u(&reduced.class_size()) / big_u(&t.class_size())
        })
    }

    /// `P(c_1(σ) = len)`: within a class, the fraction of points lying on
    /// cycles of length `len`.
    pub fn prob_cycle_of_one(&self, len: usize) -> BigRational {
        let n = big(self.n as u64);
        self.expect_type(|t| big((len * t.get(len)) as u64) / &n)
    }
}

fn check_same_n(d1: &ExactDistribution, d2: &ExactDistribution) -> Result<()> {
    if d1.n != d2.n {
        Err(Error::SizeMismatch {
            left: d1.n,
            right: d2.n,
        })
    } else {
        Ok(())
    }
}

/// Law of the cycle type of the product, class by class on the first factor.
pub fn product_type_law(
    d1: &ExactDistribution,
    d2: &ExactDistribution,
    order: ProductOrder,
) -> Result<BTreeMap<CycleCounts, BigRational>> {
    check_same_n(d1, d2)?;
    let n = d1.n;
    let index2 = d2.class_index();
    let rhos: Vec<(Permutation, usize)> = Permutation::all(n)
        .map(|r| {
            let t = index2[&r.cycle_counts()];
            (r, t)
        })
        .filter(|(_, t)| !d2.classes[*t].mass.is_zero())
        .collect();
    // Integer counts per (first-factor class, second-factor class, output type),
    // combined with rational weights afterwards in a fixed order.
    let partials: Vec<BTreeMap<CycleCounts, BigRational>> = d1
        .classes
        .par_iter()
        .filter(|c| !c.mass.is_zero())
        .map(|c1| {
            let rep = match order {
                ProductOrder::Direct => c1.cycle_type.representative(),
                ProductOrder::InverseFirst => c1.cycle_type.representative().inverse(),
            };
            let mut counts: BTreeMap<(usize, CycleCounts), u64> = BTreeMap::new();
            for (r, t2) in &rhos {
                let prod = rep.compose(r).expect("same n");
                *counts.entry((*t2, prod.cycle_counts())).or_default() += 1;
            }
            let mut law: BTreeMap<CycleCounts, BigRational> = BTreeMap::new();
            for ((t2, out), count) in counts {
                let w = &c1.mass * &d2.classes[t2].point_mass * big(count);
                *law.entry(out).or_insert_with(BigRational::zero) += w;
            }
            law
        })
        .collect();
    let mut law = BTreeMap::new();
    for part in partials {
        for (t, w) in part {
            *law.entry(t).or_insert_with(BigRational::zero) += w;
        }
    }
    Ok(law)
}

/// Brute-force law of the product's cycle type over every pair of rows.
/// The factors need not be conjugation invariant.
pub fn product_type_law_full(
    pmf1: &[(Permutation, BigRational)],
    pmf2: &[(Permutation, BigRational)],
    order: ProductOrder,
) -> Result<BTreeMap<CycleCounts, BigRational>> {
    let mut law: BTreeMap<CycleCounts, BigRational> = BTreeMap::new();
    for (s, w1) in pmf1.iter().filter(|(_, w)| !w.is_zero()) {
        let left = match order {
            ProductOrder::Direct => s.clone(),
            ProductOrder::InverseFirst => s.inverse(),
        };
        for (r, w2) in pmf2.iter().filter(|(_, w)| !w.is_zero()) {
            let t = left.compose(r)?.cycle_counts();
            *law.entry(t).or_insert_with(BigRational::zero) += w1 * w2;
        }
    }
    Ok(law)
}

/// `P(c_i(σ⁻¹ρ) = v_i for all i ≤ k)`.
pub fn exact_joint_cycle_prob(d1: &ExactDistribution, d2: &ExactDistribution, v_vec: &[usize]) -> Result<BigRational> {
    check_same_n(d1, d2)?;
    let n = d1.n;
    if v_vec.len() > n || v_vec.iter().any(|&v| v == 0 || v > n) {
        return Ok(BigRational::zero());
    }
    let law = product_type_law(d1, d2, ProductOrder::InverseFirst)?;
    // number of permutations of each type satisfying the event
    let mut hits: HashMap<CycleCounts, u64> = HashMap::new();
    for pi in Permutation::all(n) {
        if v_vec.iter().enumerate().all(|(i, &v)| pi.cycle_len0(i) == v) {
            *hits.entry(pi.cycle_counts()).or_default() += 1;
        }
    }
    Ok(law
        .iter()
        .filter_map(|(t, p)| hits.get(t).map(|&h| p * big(h) / big_u(&t.class_size())))
        .sum())
}

/// `E[Π_i #_{v_i}(product)]`.
pub fn exact_moment(
    d1: &ExactDistribution,
    d2: &ExactDistribution,
    v_vec: &[usize],
    order: ProductOrder,
) -> Result<BigRational> {
    let law = product_type_law(d1, d2, order)?;
    Ok(moment_of_type_law(&law, v_vec))
}

pub fn moment_of_type_law(law: &BTreeMap<CycleCounts, BigRational>, v_vec: &[usize]) -> BigRational {
    law.iter()
        .map(|(t, p)| {
            let prod: u64 = v_vec.iter().map(|&v| t.get(v) as u64).product();
            p * big(prod)
        })
        .sum()
}

/// `P(σ ∈ 𝔖_{n,g})`.
pub fn exact_graph_prob(d: &ExactDistribution, g: &DirectedGraph) -> Result<BigRational> {
    if d.n != g.n() {
        return Err(Error::SizeMismatch {
            left: d.n,
            right: g.n(),
        });
    }
    if g.edge_count() == 0 {
        return Ok(BigRational::one());
    }
    if !g.is_partial_injection() {
        return Ok(BigRational::zero());
    }
    let index = d.class_index();
    let mut hits = vec![0u64; d.classes.len()];
    for s in Permutation::all(d.n) {
        if membership(&s, g)? {
            hits[index[&s.cycle_counts()]] += 1;
        }
    }
    Ok(d.classes
        .iter()
        .zip(hits)
        .filter(|(_, h)| *h > 0)
        .map(|(c, h)| &c.point_mass * big(h))
        .sum())
}

/// Two readings of the cycle-length event at indices `1..=k`: through the
/// tuple of per-index graph classes, and through the classes of the union
/// graphs. Both totals equal the joint cycle probability; the masses
/// carried by the matching classes are reported separately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassEventComparison {
    pub joint: BigRational,
    pub tuple_total: BigRational,
    pub union_total: BigRational,
    /// every per-index class is the matching class with `v_i` edges
    pub tuple_matching_mass: BigRational,
    /// both union classes are a matching class
    pub union_matching_mass: BigRational,
}

pub fn class_event_comparison(
    d1: &ExactDistribution,
    d2: &ExactDistribution,
    v_vec: &[usize],
) -> Result<ClassEventComparison> {
    check_same_n(d1, d2)?;
    let n = d1.n;
    let k = v_vec.len();
    if k == 0 || k > n {
        return Err(Error::param("v_vec", format!("needs 1..={n} entries")));
    }
    let idx: Vec<usize> = (1..=k).collect();
    let pmf1 = d1.pmf_table();
    let pmf2 = d2.pmf_table();
    let mut tuple_classes: BTreeMap<Vec<(GraphClass, GraphClass)>, BigRational> = BTreeMap::new();
    let mut union_classes: BTreeMap<(GraphClass, GraphClass), BigRational> = BTreeMap::new();
    let mut joint = BigRational::zero();
    for (s, w1) in pmf1.iter().filter(|(_, w)| !w.is_zero()) {
        for (r, w2) in pmf2.iter().filter(|(_, w)| !w.is_zero()) {
            let view = PairView::new(s, r)?;
            let tuple = view.tuple(&idx)?;
            if !tuple.iter().zip(v_vec).all(|((g1, _), &v)| g1.edge_count() == v) {
                continue;
            }
            let w = w1 * w2;
            joint += &w;
            let classes = tuple
                .iter()
                .map(|(a, b)| (canonical_class(a), canonical_class(b)))
                .collect();
            *tuple_classes.entry(classes).or_insert_with(BigRational::zero) += &w;
            let (u1, u2) = view.union(&idx)?;
            *union_classes
                .entry((canonical_class(&u1), canonical_class(&u2)))
                .or_insert_with(BigRational::zero) += &w;
        }
    }
    let matching = |c: &GraphClass| is_t_class(c.canonical(), c.edge_count());
    let tuple_matching_mass = tuple_classes
        .iter()
        .filter(|(t, _)| {
            t.iter()
                .zip(v_vec)
                .all(|((a, b), &v)| matching(a) && matching(b) && a.edge_count() == v)
        })
        .map(|(_, w)| w)
        .sum();
    let union_matching_mass = union_classes
        .iter()
        .filter(|((a, b), _)| matching(a) && matching(b))
        .map(|(_, w)| w)
        .sum();
    Ok(ClassEventComparison {
        joint,
        tuple_total: tuple_classes.values().sum(),
        union_total: union_classes.values().sum(),
        tuple_matching_mass,
        union_matching_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

    fn q(p: i64, r: i64) -> BigRational {
        BigRational::new(p.into(), r.into())
    }

    fn thetas() -> [BigRational; 3] {
        [q(1, 2), q(1, 1), q(2, 1)]
    }

    #[test]
    fn ewens_weight_examples() {
        for n in 1..=5 {
            let inv_fact = BigRational::new(BigInt::one(), BigInt::from(factorial(n)));
            for s in Permutation::all(n) {
                assert_eq!(ewens_weight(&s, &q(1, 1)).unwrap(), inv_fact);
            }
        }
        let theta = q(3, 7);
        let id = Permutation::identity(2);
        let tr = Permutation::from_images(&[2, 1]).unwrap();
        assert_eq!(ewens_weight(&id, &theta).unwrap(), &theta / (&theta + q(1, 1)));
        assert_eq!(ewens_weight(&tr, &theta).unwrap(), q(1, 1) / (&theta + q(1, 1)));
        assert!(ewens_weight(&id, &q(-1, 2)).is_err());
        for theta in thetas() {
            let total: BigRational = Permutation::all(4).map(|s| ewens_weight(&s, &theta).unwrap()).sum();
            assert_eq!(total, q(1, 1));
        }
    }

    #[test]
    fn distributions_normalise_and_match_weights() {
        for n in 1..=6 {
            assert_eq!(ExactDistribution::uniform(n).unwrap().total_mass(), q(1, 1));
            for theta in thetas().into_iter().chain([q(0, 1)]) {
                let d = ExactDistribution::ewens(n, theta.clone()).unwrap();
                assert_eq!(d.total_mass(), q(1, 1));
                if n <= 4 {
                    let table_total: BigRational = d.pmf_table().into_iter().map(|(_, p)| p).sum();
                    assert_eq!(table_total, q(1, 1));
                    for s in Permutation::all(n) {
                        assert_eq!(d.prob(&s), ewens_weight(&s, &theta).unwrap());
                    }
                }
            }
        }
        assert!(ExactDistribution::ewens(3, q(-1, 1)).is_err());
        assert!(ExactDistribution::explicit(3, BTreeMap::new()).is_err());
    }

    #[test]
    fn ewens_mean_cycle_count() {
        let d = ExactDistribution::uniform(4).unwrap();
        assert_eq!(d.expect_type(|t| big(t.total_cycles() as u64)), q(25, 12));
        for n in 1..=5 {
            for theta in thetas() {
                let d = ExactDistribution::ewens(n, theta.clone()).unwrap();
                let want: BigRational = (0..n).map(|i| &theta / (&theta + big(i as u64))).sum();
                // weighted enumeration over the whole group
                let brute: BigRational = Permutation::all(n)
                    .map(|s| ewens_weight(&s, &theta).unwrap() * big(s.cycle_counts().total_cycles() as u64))
                    .sum();
                assert_eq!(brute, want);
                assert_eq!(d.expect_type(|t| big(t.total_cycles() as u64)), want);
            }
        }
    }

    #[test]
    fn closed_forms_match_enumeration() {
        for n in 1..=6 {
            for theta in thetas() {
                let d = ExactDistribution::ewens(n, theta).unwrap();
                let table = d.pmf_table();
                for f in 0..=n.min(3) {
                    let brute: BigRational = table
                        .iter()
                        .filter(|(s, _)| (1..=f).all(|i| s.apply(i) == i))
                        .map(|(_, p)| p)
                        .sum();
                    assert_eq!(d.prob_first_fixed(f), brute);
                }
                for len in 1..=n {
                    let brute: BigRational = table
                        .iter()
                        .filter(|(s, _)| s.cycle_of(1).unwrap().len() == len)
                        .map(|(_, p)| p)
                        .sum();
                    assert_eq!(d.prob_cycle_of_one(len), brute);
                }
            }
        }
    }

    #[test]
    fn product_law_routes_agree() {
        for n in 1..=5 {
            let laws = [
                ExactDistribution::uniform(n).unwrap(),
                ExactDistribution::ewens(n, q(1, 2)).unwrap(),
                ExactDistribution::ewens(n, q(2, 1)).unwrap(),
            ];
            for d1 in &laws {
                for d2 in &laws {
                    for order in [ProductOrder::Direct, ProductOrder::InverseFirst] {
                        let by_class = product_type_law(d1, d2, order).unwrap();
                        let full = product_type_law_full(&d1.pmf_table(), &d2.pmf_table(), order).unwrap();
                        let nonzero: BTreeMap<_, _> = full.into_iter().filter(|(_, p)| !p.is_zero()).collect();
                        let by_class: BTreeMap<_, _> = by_class.into_iter().filter(|(_, p)| !p.is_zero()).collect();
                        assert_eq!(by_class, nonzero);
                    }
                    // t and t̃ have the same law
                    assert_eq!(
                        product_type_law(d1, d2, ProductOrder::Direct).unwrap(),
                        product_type_law(d1, d2, ProductOrder::InverseFirst).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn joint_cycle_prob_brute_force() {
        let n = 5;
        let d1 = ExactDistribution::ewens(n, q(2, 1)).unwrap();
        let d2 = ExactDistribution::ewens(n, q(1, 2)).unwrap();
        let (p1, p2) = (d1.pmf_table(), d2.pmf_table());
        for v in [vec![1], vec![2], vec![1, 1], vec![1, 2], vec![3, 3], vec![2, 2, 1]] {
            let mut brute = BigRational::zero();
            for (s, w1) in &p1 {
                let si = s.inverse();
                for (r, w2) in &p2 {
                    let prod = si.compose(r).unwrap();
                    if v.iter()
                        .enumerate()
                        .all(|(i, &len)| prod.cycle_of(i + 1).unwrap().len() == len)
                    {
                        brute += w1 * w2;
                    }
                }
            }
            assert_eq!(exact_joint_cycle_prob(&d1, &d2, &v).unwrap(), brute, "v={v:?}");
        }
    }

    #[test]
    fn joint_cycle_prob_examples() {
        let u = ExactDistribution::uniform(6).unwrap();
        assert_eq!(exact_joint_cycle_prob(&u, &u, &[1]).unwrap(), q(1, 6));
        assert_eq!(exact_joint_cycle_prob(&u, &u, &[1, 2]).unwrap(), q(1, 30));
        assert_eq!(exact_joint_cycle_prob(&u, &u, &[7]).unwrap(), q(0, 1));
        let e = ExactDistribution::ewens(6, q(1, 2)).unwrap();
        assert_eq!(exact_joint_cycle_prob(&e, &u, &[7]).unwrap(), q(0, 1));
    }

    #[test]
    fn moment_examples() {
        let u4 = ExactDistribution::uniform(4).unwrap();
        assert_eq!(exact_moment(&u4, &u4, &[1], ProductOrder::Direct).unwrap(), q(1, 1));
        let u6 = ExactDistribution::uniform(6).unwrap();
        assert_eq!(exact_moment(&u6, &u6, &[1], ProductOrder::Direct).unwrap(), q(1, 1));
        assert_eq!(exact_moment(&u6, &u6, &[1, 1], ProductOrder::Direct).unwrap(), q(2, 1));
    }

    #[test]
    fn mixed_ewens_second_cycle_moment_trend() {
        let moment = |n| {
            let d1 = ExactDistribution::ewens(n, q(2, 1)).unwrap();
            let d2 = ExactDistribution::ewens(n, q(1, 2)).unwrap();
            exact_moment(&d1, &d2, &[2], ProductOrder::Direct).unwrap()
        };
        assert_eq!(moment(3), q(1, 2));
        assert_eq!(moment(4), q(87, 175));
        assert_eq!(moment(5), q(94, 189));
        let gaps: Vec<BigRational> = (4..=7).map(|n| (moment(n) - q(1, 2)).abs()).collect();
        assert!(gaps.iter().all(|g| *g <= q(1, 5)));
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    }

    #[test]
    fn graph_prob_examples() {
        let u = ExactDistribution::uniform(4).unwrap();
        assert_eq!(exact_graph_prob(&u, &DirectedGraph::empty(4)).unwrap(), q(1, 1));
        let edge = DirectedGraph::from_edges(4, [(1, 2)]).unwrap();
        assert_eq!(exact_graph_prob(&u, &edge).unwrap(), q(1, 4));
        let bad = DirectedGraph::from_edges(4, [(1, 2), (1, 3)]).unwrap();
        assert_eq!(exact_graph_prob(&u, &bad).unwrap(), q(0, 1));
        assert!(exact_graph_prob(&u, &DirectedGraph::empty(3)).is_err());
        let d = ExactDistribution::ewens(5, q(1, 2)).unwrap();
        let g = DirectedGraph::from_edges(5, [(1, 2), (2, 1), (3, 3)]).unwrap();
        let brute: BigRational = d
            .pmf_table()
            .into_iter()
            .filter(|(s, _)| membership(s, &g).unwrap())
            .map(|(_, p)| p)
            .sum();
        assert_eq!(exact_graph_prob(&d, &g).unwrap(), brute);
    }

    /// Conjugating a non-invariant first factor by an independent uniform
    /// permutation leaves the product's cycle structure unchanged in law.
    #[test]
    fn conjugation_reduction() {
        let n = 4;
        let s0 = Permutation::from_images(&[2, 1, 4, 3]).unwrap();
        let s1 = Permutation::from_images(&[1, 3, 4, 2]).unwrap();
        let skewed: PermutationPmf = vec![(s0, q(1, 3)), (s1, q(2, 3))];
        let avg = ExactDistribution::conjugation_average(n, &skewed).unwrap();
        for d2 in [
            ExactDistribution::ewens(n, q(1, 2)).unwrap(),
            ExactDistribution::ewens(n, q(3, 1)).unwrap(),
        ] {
            let raw = product_type_law_full(&skewed, &d2.pmf_table(), ProductOrder::Direct).unwrap();
            let conj = product_type_law(&avg, &d2, ProductOrder::Direct).unwrap();
            let raw: BTreeMap<_, _> = raw.into_iter().filter(|(_, p)| !p.is_zero()).collect();
            let conj: BTreeMap<_, _> = conj.into_iter().filter(|(_, p)| !p.is_zero()).collect();
            assert_eq!(raw, conj);
            for v in [vec![1], vec![1, 2]] {
                let d1 = ExactDistribution::ewens(n, q(2, 1)).unwrap();
                let redone = ExactDistribution::conjugation_average(n, &d1.pmf_table()).unwrap();
                assert_eq!(
                    exact_joint_cycle_prob(&d1, &d2, &v).unwrap(),
                    exact_joint_cycle_prob(&redone, &d2, &v).unwrap()
                );
            }
        }
    }

    #[test]
    fn from_law_families() {
        let d = ExactDistribution::from_law(
            &Law::Ewens {
                theta: Rational::new(1, 2),
            },
            4,
        )
        .unwrap();
        assert_eq!(d, ExactDistribution::ewens(4, q(1, 2)).unwrap());
        let d = ExactDistribution::from_law(
            &Law::SqrtFixed {
                fixed_count: crate::sampler::FixedCount::SQRT,
            },
            8,
        )
        .unwrap();
        assert_eq!(d.expect_cycle_power(1, 1), q(2, 1));
        assert!(ExactDistribution::from_law(
            &Law::MatchingHeavy {
                two_cycle_fraction: Rational::new(1, 2)
            },
            5
        )
        .is_err());
    }

    #[test]
    fn class_event_readings_agree_on_totals() {
        for n in 3..=5 {
            let d1 = ExactDistribution::ewens(n, q(2, 1)).unwrap();
            let d2 = ExactDistribution::ewens(n, q(1, 2)).unwrap();
            for v in [vec![1], vec![2], vec![1, 1], vec![1, 2], vec![2, 1]] {
                let c = class_event_comparison(&d1, &d2, &v).unwrap();
                assert_eq!(c.joint, exact_joint_cycle_prob(&d1, &d2, &v).unwrap());
                assert_eq!(c.tuple_total, c.joint);
                assert_eq!(c.union_total, c.joint);
                assert!(c.union_matching_mass <= c.tuple_matching_mass);
            }
        }
    }
}
