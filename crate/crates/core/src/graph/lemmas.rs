//! Exhaustive checkers for the combinatorial properties of traversal graphs.
//!
//! Each sweep walks every pair in `𝔖_n × 𝔖_n` (or every relevant graph) and
//! counts instances where the stated property fails. A correct
//! implementation reports zero violations for every sweep.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::graph::traversal::pairing_excludes_two_cycles;
use crate::graph::{membership, DirectedGraph, PairView};
use crate::perm::Permutation;

type GraphPair = (DirectedGraph, DirectedGraph);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub lemma: &'static str,
    pub n: usize,
    pub checks: u64,
    pub violations: u64,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Default, Clone, Copy)]
struct Tally {
    checks: u64,
    violations: u64,
}

impl Tally {
    fn check(&mut self, ok: bool) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
        }
    }

    fn merge(self, other: Tally) -> Tally {
        Tally {
            checks: self.checks + other.checks,
            violations: self.violations + other.violations,
        }
    }

    fn report(self, lemma: &'static str, n: usize) -> LemmaReport {
        LemmaReport {
            lemma,
            n,
            checks: self.checks,
            violations: self.violations,
        }
    }
}

/// Runs `f` on every pair of `𝔖_n`, parallel over the first factor.
fn sweep_pairs(n: usize, f: impl Fn(&PairView<'_>, &mut Tally) + Sync) -> Tally {
    let all: Vec<Permutation> = Permutation::all(n).collect();
    all.par_iter()
        .map(|s| {
            let mut t = Tally::default();
            for r in &all {
                f(&PairView::new(s, r).expect("same n"), &mut t);
            }
            t
        })
        .reduce(Tally::default, Tally::merge)
}

/// Traversal graphs are subgraphs of `g_σ`/`g_ρ`, share their non-isolated
/// vertices, and both carry exactly `k_m` edges.
pub fn graph_invariants(n: usize) -> LemmaReport {
    sweep_pairs(n, |view, t| {
        let gs = DirectedGraph::of_permutation(view.sigma);
        let gr = DirectedGraph::of_permutation(view.rho);
        for m in 1..=n {
            let rec = view.traversal(m).expect("valid index");
            let (g1, g2) = rec.graphs(n);
            t.check(g1.is_subgraph_of(&gs) && membership(view.sigma, &g1).unwrap_or(false));
            t.check(g2.is_subgraph_of(&gr) && membership(view.rho, &g2).unwrap_or(false));
            t.check(g1.non_isolated() == g2.non_isolated());
            t.check(g1.edge_count() == rec.k && g2.edge_count() == rec.k);
        }
    })
    .report("traversal_graph_invariants", n)
}

/// Indices on a common cycle of `σ⁻¹ρ` produce identical graphs, and so
/// their union reduces to either one.
pub fn shared_cycle(n: usize) -> LemmaReport {
    sweep_pairs(n, |view, t| {
        for m2 in 1..=n {
            let rec = view.traversal(m2).expect("valid index");
            let graphs = rec.graphs(n);
            for &m1 in &rec.i_seq {
                t.check(view.graphs(m1).expect("valid index") == graphs);
                if m1 != m2 {
                    t.check(view.union(&[m1, m2]).expect("distinct") == graphs);
                }
            }
        }
    })
    .report("shared_cycle_graphs", n)
}

/// Swapping the pair reverses the traversal, and `G₁^m(σ,ρ)` is the
/// transpose of `G₂^{ρ(m)}(ρ⁻¹,σ⁻¹)`.
pub fn traversal_symmetry(n: usize) -> LemmaReport {
    sweep_pairs(n, |view, t| {
        let swapped = PairView::new(view.rho, view.sigma).expect("same n");
        let rho_inv = view.rho.inverse();
        let sigma_inv = view.sigma.inverse();
        let dual = PairView::new(&rho_inv, &sigma_inv).expect("same n");
        for m in 1..=n {
            let a = view.traversal(m).expect("valid index");
            let b = swapped.traversal(m).expect("valid index");
            let k = a.k;
            t.check(b.k == k);
            if b.k != k {
                continue;
            }
            t.check((0..k).all(|l| b.j_seq[l] == a.j_seq[k - 1 - l]));
            t.check((1..k).all(|l| b.i_seq[l] == a.i_seq[k - l]));
            t.check(b.i_seq[0] == m && a.i_seq[0] == m);
            let (g1, _) = a.graphs(n);
            let (_, dual_g2) = dual.graphs(view.rho.apply(m)).expect("valid index");
            t.check(g1.adjacency() == transpose_matrix(&dual_g2.adjacency()));
        }
    })
    .report("traversal_symmetry", n)
}

fn transpose_matrix(a: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i]).collect()).collect()
}

/// All-two-vertex components force the absence of 2-cycles.
pub fn no_two_cycles(n: usize) -> LemmaReport {
    sweep_pairs(n, |view, t| {
        for m in 1..=n {
            let (g1, g2) = view.graphs(m).expect("valid index");
            t.check(pairing_excludes_two_cycles(&g1, &g2));
        }
    })
    .report("no_two_cycles", n)
}

/// For index sets `{1..k}`, the event that the per-index graph tuple equals
/// a realizable tuple is exactly `{σ ⊇ ∪g_i} × {ρ ⊇ ∪g'_i}`, and so is the
/// event on the union graphs.
pub fn event_identity(n: usize) -> LemmaReport {
    let all: Vec<Permutation> = Permutation::all(n).collect();
    let mut tally = Tally::default();
    for k in 1..=n {
        let idx: Vec<usize> = (1..=k).collect();
        let per_sigma: Vec<(Tally, Vec<_>)> = all
            .par_iter()
            .map(|s| {
                let mut t = Tally::default();
                let mut rows = Vec::with_capacity(all.len());
                for r in &all {
                    let view = PairView::new(s, r).expect("same n");
                    let tuple = view.tuple(&idx).expect("valid indices");
                    let union = view.union(&idx).expect("valid indices");
                    t.check(membership(s, &union.0).unwrap_or(false));
                    t.check(membership(r, &union.1).unwrap_or(false));
                    rows.push((tuple, union));
                }
                (t, rows)
            })
            .collect();
        let mut tuple_events: BTreeMap<Vec<GraphPair>, (u64, GraphPair)> = BTreeMap::new();
        let mut union_events: HashMap<GraphPair, u64> = HashMap::new();
        for (t, rows) in per_sigma {
            tally = tally.merge(t);
            for (tuple, union) in rows {
                *union_events.entry(union.clone()).or_default() += 1;
                tuple_events.entry(tuple).or_insert((0, union)).0 += 1;
            }
        }
        let mut containing: HashMap<DirectedGraph, u64> = HashMap::new();
        let mut count = |g: &DirectedGraph| -> u64 {
            *containing
                .entry(g.clone())
                .or_insert_with(|| all.iter().filter(|s| membership(s, g).unwrap_or(false)).count() as u64)
        };
        for (hits, (g, g_prime)) in tuple_events.values() {
            let product = count(g) * count(g_prime);
            tally.check(*hits == product);
            tally.check(union_events[&(g.clone(), g_prime.clone())] == product);
        }
    }
    tally.report("event_identity", n)
}

/// Every graph contained in some permutation of `n` points: all partial
/// injections, as edge lists.
pub fn partial_injections(n: usize) -> Vec<DirectedGraph> {
    fn rec(n: usize, i: usize, used: &mut Vec<bool>, edges: &mut Vec<(usize, usize)>, out: &mut Vec<DirectedGraph>) {
        if i == n {
            out.push(DirectedGraph::from_edges(n, edges.iter().copied()).expect("in range"));
            return;
        }
        rec(n, i + 1, used, edges, out);
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                edges.push((i + 1, j + 1));
                rec(n, i + 1, used, edges, out);
                edges.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(n, 0, &mut vec![false; n], &mut Vec::new(), &mut out);
    out
}

/// If `A_{g₂}ρ = ρA_{g₁}` and `ρ` fixes a vertex on every non-trivial
/// component of `g₁`, then `𝔖_{n,g₁} ∩ 𝔖_{n,g₂}` is empty or `g₁ = g₂`.
///
/// Graphs with `𝔖_{n,g₁} = ∅` satisfy this vacuously, so only partial
/// injections are swept.
pub fn conjugate_disjointness(n: usize) -> LemmaReport {
    let graphs = partial_injections(n);
    let perms: Vec<Permutation> = Permutation::all(n).collect();
    graphs
        .par_iter()
        .map(|g1| {
            let mut t = Tally::default();
            let a1 = g1.adjacency();
            let comps = g1.components();
            for rho in &perms {
                if !comps.iter().all(|c| c.vertices.iter().any(|&x| rho.apply(x) == x)) {
                    continue;
                }
                // A₂ = P A₁ Pᵀ with P_{ij} = 1{ρ(i) = j}
                let rho0 = rho.as_zero_based();
                let mut g2 = DirectedGraph::empty(n);
                for i in 0..n {
                    for j in 0..n {
                        if a1[rho0[i]][rho0[j]] {
                            g2.add_edge(i + 1, j + 1).expect("in range");
                        }
                    }
                }
                let both = g1.union(&g2).expect("same n");
                t.check(!both.is_partial_injection() || g1 == &g2);
            }
            t
        })
        .reduce(Tally::default, Tally::merge)
        .report("conjugate_disjointness", n)
}
