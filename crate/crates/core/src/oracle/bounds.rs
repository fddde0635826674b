//! Exact checks of the subgraph probability bounds.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};
use crate::graph::{is_t_class, DirectedGraph, PairView};
use crate::oracle::{exact_graph_prob, ExactDistribution, WeightRule};
use crate::perm::Permutation;
use crate::rational::format_big;

/// One inequality `lhs ≤ rhs` with exact sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundCheck {
    pub lemma: &'static str,
    pub n: usize,
    pub parameters: BTreeMap<&'static str, String>,
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub holds: bool,
}

impl Serialize for BoundCheck {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("BoundCheck", 6)?;
        st.serialize_field("lemma", self.lemma)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("parameters", &self.parameters)?;
        st.serialize_field("lhs", &format_big(&self.lhs))?;
        st.serialize_field("rhs", &format_big(&self.rhs))?;
        st.serialize_field("holds", &self.holds)?;
        st.end()
    }
}

/// Loops, non-trivial components and non-isolated vertices of a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphProfile {
    pub loops: usize,
    pub components: usize,
    pub vertices: usize,
    pub all_two_vertex: bool,
    pub has_two_cycle: bool,
    pub matching: bool,
}

impl GraphProfile {
    pub fn of(g: &DirectedGraph) -> GraphProfile {
        let comps = g.components();
        let p = comps.len();
        GraphProfile {
            loops: g.loop_count(),
            components: p,
            vertices: g.non_isolated().len(),
            all_two_vertex: comps.iter().all(|c| c.vertices.len() == 2),
            has_two_cycle: comps.iter().any(|c| c.is_two_cycle()),
            matching: p > 0 && is_t_class(g, p),
        }
    }
}

/// `C(n−p, v−p)·(v−p)! = (n−p)!/(n−v)!`
fn choices(n: usize, p: usize, v: usize) -> BigRational {
    let prod = ((n - v + 1)..=(n - p)).fold(BigInt::one(), |acc, x| acc * BigInt::from(x));
    BigRational::from_integer(prod)
}

fn law_label(d: &ExactDistribution) -> String {
    match d.rule() {
        WeightRule::Uniform => "uniform".to_string(),
        WeightRule::Ewens(theta) => format!("ewens({})", format_big(theta)),
        WeightRule::Explicit(m) => format!("explicit({} classes)", m.len()),
    }
}

fn graph_label(g: &DirectedGraph) -> String {
    g.edges().map(|(i, j)| format!("{i}>{j}")).collect::<Vec<_>>().join(",")
}

/// Every applicable inequality for `P(σ ∈ 𝔖_{n,g})`.
pub fn verify_bounds(d: &ExactDistribution, g: &DirectedGraph) -> Result<Vec<BoundCheck>> {
    let n = d.n();
    if g.n() != n {
        return Err(Error::SizeMismatch { left: n, right: g.n() });
    }
    let prof = GraphProfile::of(g);
    if prof.components == 0 {
        return Ok(Vec::new());
    }
    let prob = exact_graph_prob(d, g)?;
    let (f, p, v) = (prof.loops, prof.components, prof.vertices);
    let mut params = BTreeMap::new();
    params.insert("law", law_label(d));
    params.insert("graph", graph_label(g));
    params.insert("f", f.to_string());
    params.insert("p", p.to_string());
    params.insert("v", v.to_string());
    let check = |lemma, lhs: BigRational, rhs: BigRational| BoundCheck {
        lemma,
        n,
        parameters: params.clone(),
        holds: lhs <= rhs,
        lhs,
        rhs,
    };

    let mut out = Vec::new();
    let denom = choices(n, p, v);
    let scaled = d.prob_first_fixed(f) / &denom;
    out.push(check("subgraph_probability_bound", prob.clone(), scaled.clone()));
    out.push(check(
        "subgraph_probability_bound_relaxed",
        scaled,
        BigRational::one() / &denom,
    ));

    if prof.all_two_vertex && prof.has_two_cycle {
        let rhs = d.prob_cycle_of_one(2) / choices(n, p, 2 * p);
        out.push(check("two_cycle_bound", prob.clone(), rhs));
    }

    if prof.matching && n >= 2 * p {
        let base = BigRational::one() / choices(n, p, 2 * p);
        let p_q = BigRational::from_integer(BigInt::from(p));
        let slack = (&p_q * &p_q - &p_q) / BigRational::from_integer(BigInt::from(n - 1));
        let lower = &base * (BigRational::one() - slack - &p_q * d.prob_first_fixed(1));
        out.push(check("matching_lower_bound", lower, prob.clone()));
        out.push(check("matching_upper_bound", prob, base));
    }
    Ok(out)
}

/// Every union graph `G_i^{1..k}(σ, ρ)`, `i ∈ {1, 2}`, `k ≤ n`, over `𝔖_n²`.
pub fn union_graphs_of(n: usize) -> BTreeSet<DirectedGraph> {
    let all: Vec<Permutation> = Permutation::all(n).collect();
    let parts: Vec<BTreeSet<DirectedGraph>> = all
        .par_iter()
        .map(|s| {
            let mut set = BTreeSet::new();
            for r in &all {
                let view = PairView::new(s, r).expect("same n");
                let (mut u1, mut u2) = (DirectedGraph::empty(n), DirectedGraph::empty(n));
                for m in 1..=n {
                    let (a, b) = view.graphs(m).expect("valid index");
                    u1 = u1.union(&a).expect("same n");
                    u2 = u2.union(&b).expect("same n");
                    set.insert(u1.clone());
                    set.insert(u2.clone());
                }
            }
            set
        })
        .collect();
    parts.into_iter().flatten().collect()
}

#[derive(Debug, Clone, Default)]
pub struct BoundSweep {
    pub graphs: usize,
    pub checks: usize,
    pub by_lemma: BTreeMap<&'static str, usize>,
    pub violations: Vec<BoundCheck>,
}

impl BoundSweep {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `verify_bounds` for every union graph of `𝔖_n²` under each law.
pub fn sweep_union_bounds(n: usize, laws: &[ExactDistribution]) -> Result<BoundSweep> {
    let graphs: Vec<DirectedGraph> = union_graphs_of(n).into_iter().collect();
    let mut sweep = BoundSweep {
        graphs: graphs.len(),
        ..Default::default()
    };
    for d in laws {
        let results: Vec<Vec<BoundCheck>> = graphs.par_iter().map(|g| verify_bounds(d, g)).collect::<Result<_>>()?;
        for c in results.into_iter().flatten() {
            sweep.checks += 1;
            *sweep.by_lemma.entry(c.lemma).or_default() += 1;
            if !c.holds {
                sweep.violations.push(c);
            }
        }
    }
    Ok(sweep)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecayPoint {
    pub n: usize,
    pub prob: BigRational,
    /// `(P·n^{f/2})²`, exact
    pub scaled_sq: BigRational,
}

/// `P(σ(1) = 1, …, σ(f) = f)` and its `n^{f/2}` scaling along `ns`.
pub fn fixed_point_decay(theta: &BigRational, f: usize, ns: &[usize]) -> Result<Vec<DecayPoint>> {
    ns.iter()
        .map(|&n| {
            let d = ExactDistribution::ewens(n, theta.clone())?;
            let prob = d.prob_first_fixed(f);
            let nf = num_traits::pow(BigRational::from_integer(BigInt::from(n)), f);
            let scaled_sq = &prob * &prob * nf;
            Ok(DecayPoint { n, prob, scaled_sq })
        })
        .collect()
}

pub fn strictly_decreasing(points: &[DecayPoint]) -> bool {
    points.windows(2).all(|w| w[1].scaled_sq < w[0].scaled_sq) && points.iter().all(|p| !p.prob.is_zero())
}
