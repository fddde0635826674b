use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::perm::Permutation;

/// The cycle of `σ⁻¹∘ρ` through `m`, read as `i_1 = m, i_2, …, i_k` together
/// with `j_l = ρ(i_l)`; consecutive entries satisfy `σ(i_{l+1}) = j_l` and
/// `σ(i_1) = j_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraversalRecord {
    pub m: usize,
    pub k: usize,
    pub i_seq: Vec<usize>,
    pub j_seq: Vec<usize>,
}

impl TraversalRecord {
    /// `(G₁, G₂)`: `G₁` has edges `(i_1, j_k)` and `(i_{l+1}, j_l)`, `G₂` has
    /// edges `(i_l, j_l)`.
    pub fn graphs(&self, n: usize) -> (DirectedGraph, DirectedGraph) {
        let k = self.k;
        let g1 = (0..k).map(|l| (self.i_seq[(l + 1) % k], self.j_seq[l]));
        let g2 = (0..k).map(|l| (self.i_seq[l], self.j_seq[l]));
        (
            DirectedGraph::from_edges(n, g1).expect("vertices in range"),
            DirectedGraph::from_edges(n, g2).expect("vertices in range"),
        )
    }
}

/// A permutation pair with `σ⁻¹` cached, for repeated traversals.
#[derive(Clone, Debug)]
pub struct PairView<'a> {
    pub sigma: &'a Permutation,
    pub rho: &'a Permutation,
    sigma_inv: Permutation,
}

impl<'a> PairView<'a> {
    pub fn new(sigma: &'a Permutation, rho: &'a Permutation) -> Result<Self> {
        if sigma.n() != rho.n() {
            return Err(Error::SizeMismatch {
                left: sigma.n(),
                right: rho.n(),
            });
        }
        Ok(PairView {
            sigma,
            rho,
            sigma_inv: sigma.inverse(),
        })
    }

    pub fn n(&self) -> usize {
        self.sigma.n()
    }

    fn check_index(&self, m: usize) -> Result<()> {
        if m == 0 || m > self.n() {
            Err(Error::IndexOutOfRange { index: m, n: self.n() })
        } else {
            Ok(())
        }
    }

    pub fn traversal(&self, m: usize) -> Result<TraversalRecord> {
        self.check_index(m)?;
        let mut i_seq = Vec::new();
        let mut j_seq = Vec::new();
        let mut i = m;
        loop {
            let j = self.rho.apply(i);
            i_seq.push(i);
            j_seq.push(j);
            i = self.sigma_inv.apply(j);
            if i == m {
                break;
            }
        }
        Ok(TraversalRecord {
            m,
            k: i_seq.len(),
            i_seq,
            j_seq,
        })
    }

    pub fn graphs(&self, m: usize) -> Result<(DirectedGraph, DirectedGraph)> {
        Ok(self.traversal(m)?.graphs(self.n()))
    }

    pub fn union(&self, index_set: &[usize]) -> Result<(DirectedGraph, DirectedGraph)> {
        let mut seen = BTreeSet::new();
        let n = self.n();
        let (mut g1, mut g2) = (DirectedGraph::empty(n), DirectedGraph::empty(n));
        for &m in index_set {
            self.check_index(m)?;
            if !seen.insert(m) {
                return Err(Error::DuplicateIndex(m));
            }
            let (a, b) = self.graphs(m)?;
            g1 = g1.union(&a)?;
            g2 = g2.union(&b)?;
        }
        Ok((g1, g2))
    }

    /// Per-index tuple `(G₁^{s}, G₂^{s})` for `s` in the index set.
    pub fn tuple(&self, index_set: &[usize]) -> Result<Vec<(DirectedGraph, DirectedGraph)>> {
        index_set.iter().map(|&m| self.graphs(m)).collect()
    }
}

pub fn traversal(sigma: &Permutation, rho: &Permutation, m: usize) -> Result<TraversalRecord> {
    PairView::new(sigma, rho)?.traversal(m)
}

pub fn graphs_from_traversal(
    sigma: &Permutation,
    rho: &Permutation,
    m: usize,
) -> Result<(DirectedGraph, DirectedGraph)> {
    PairView::new(sigma, rho)?.graphs(m)
}

pub fn union_graphs(
    sigma: &Permutation,
    rho: &Permutation,
    index_set: &[usize],
) -> Result<(DirectedGraph, DirectedGraph)> {
    PairView::new(sigma, rho)?.union(index_set)
}

/// If every non-trivial component of both traversal graphs has two
/// vertices, neither graph may contain a 2-cycle. Returns whether that
/// implication holds for this instance.
pub fn check_lemma_l14(sigma: &Permutation, rho: &Permutation, m: usize) -> Result<bool> {
    let (g1, g2) = graphs_from_traversal(sigma, rho, m)?;
    Ok(pairing_excludes_two_cycles(&g1, &g2))
}

pub(crate) fn pairing_excludes_two_cycles(g1: &DirectedGraph, g2: &DirectedGraph) -> bool {
    let premise = [g1, g2]
        .iter()
        .all(|g| g.components().iter().all(|c| c.vertices.len() == 2));
    !premise || (!g1.has_two_cycle() && !g2.has_two_cycle())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(images: &[usize]) -> Permutation {
        Permutation::from_images(images).unwrap()
    }

    #[test]
    fn identity_pair() {
        let id = Permutation::identity(3);
        let t = traversal(&id, &id, 1).unwrap();
        assert_eq!((t.k, t.i_seq.clone(), t.j_seq.clone()), (1, vec![1], vec![1]));
        let (g1, g2) = t.graphs(3);
        assert_eq!(g1.edges().collect::<Vec<_>>(), vec![(1, 1)]);
        assert_eq!(g1, g2);
    }

    #[test]
    fn transposition_hand_trace() {
        let id = Permutation::identity(2);
        let rho = p(&[2, 1]);
        let t = traversal(&id, &rho, 1).unwrap();
        assert_eq!(t.k, 2);
        assert_eq!(t.i_seq, vec![1, 2]);
        assert_eq!(t.j_seq, vec![2, 1]);
        let (g1, g2) = t.graphs(2);
        assert_eq!(g1.edges().collect::<Vec<_>>(), vec![(1, 1), (2, 2)]);
        assert_eq!(g2.edges().collect::<Vec<_>>(), vec![(1, 2), (2, 1)]);
        assert!(g1.is_subgraph_of(&DirectedGraph::of_permutation(&id)));
        assert!(g2.is_subgraph_of(&DirectedGraph::of_permutation(&rho)));
        // G₂ has 2-vertex components but G₁ has loops, so the premise fails
        assert!(check_lemma_l14(&id, &rho, 1).unwrap());
    }

    #[test]
    fn errors() {
        let a = Permutation::identity(3);
        let b = Permutation::identity(4);
        assert!(traversal(&a, &b, 1).is_err());
        assert_eq!(
            traversal(&a, &a, 4).unwrap_err(),
            Error::IndexOutOfRange { index: 4, n: 3 }
        );
        assert_eq!(union_graphs(&a, &a, &[1, 1]).unwrap_err(), Error::DuplicateIndex(1));
    }

    #[test]
    fn cycle_lengths_partition_n_on_s4() {
        let all: Vec<_> = Permutation::all(4).collect();
        for s in &all {
            for r in &all {
                let view = PairView::new(s, r).unwrap();
                let mut covered = BTreeSet::new();
                let mut total = 0;
                for m in 1..=4 {
                    if covered.contains(&m) {
                        continue;
                    }
                    let t = view.traversal(m).unwrap();
                    assert_eq!(t.k, s.inverse().compose(r).unwrap().cycle_of(m).unwrap().len());
                    assert_eq!(t.i_seq.iter().collect::<BTreeSet<_>>().len(), t.k);
                    assert_eq!(t.j_seq.iter().collect::<BTreeSet<_>>().len(), t.k);
                    covered.extend(t.i_seq.iter().copied());
                    total += t.k;
                }
                assert_eq!(total, 4);
            }
        }
    }

    #[test]
    fn union_examples() {
        let id = Permutation::identity(3);
        let (u1, u2) = union_graphs(&id, &id, &[1, 2]).unwrap();
        assert_eq!(u1.edges().collect::<Vec<_>>(), vec![(1, 1), (2, 2)]);
        assert_eq!(u1, u2);
        let s = p(&[3, 1, 2]);
        let r = p(&[2, 3, 1]);
        assert_eq!(
            union_graphs(&s, &r, &[2]).unwrap(),
            graphs_from_traversal(&s, &r, 2).unwrap()
        );
    }
}
