//! Realizable couples of union traversal graphs with prescribed classes.
//!
//! A couple `(g₁, g₂)` arises from some `(σ, ρ)` with `c_i(σ⁻¹ρ) = v_i` for
//! `i ≤ k` exactly when it is the restriction of `σ` and `ρ` to the union of
//! the cycles of `σ⁻¹ρ` through `1..=k`. We rebuild those restrictions as
//! partial injections by following the traversal equations, branching only on
//! the values the equations leave free; each couple is produced once.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graph::{canonical_class, DirectedGraph, GraphClass};
use crate::perm::factorial;

struct Search<'a, F: FnMut(&DirectedGraph, &DirectedGraph)> {
    n: usize,
    v: &'a [usize],
    sigma: Vec<Option<usize>>,
    rho: Vec<Option<usize>>,
    rho_taken: Vec<bool>,
    done: Vec<bool>,
    cycle_len: Vec<usize>,
    in_path: Vec<bool>,
    leaf: F,
}

impl<F: FnMut(&DirectedGraph, &DirectedGraph)> Search<'_, F> {
    fn run(&mut self, idx: usize) {
        if idx == self.v.len() {
            let g1 = self.restriction(&self.sigma);
            let g2 = self.restriction(&self.rho);
            (self.leaf)(&g1, &g2);
            return;
        }
        let m = idx;
        if self.done[m] {
            if self.cycle_len[m] == self.v[idx] {
                self.run(idx + 1);
            }
            return;
        }
        let mut path = vec![m];
        self.in_path[m] = true;
        self.extend(idx, m, &mut path);
        self.in_path[m] = false;
    }

    /// `cur = path.last()` is a fresh point whose `ρ`-image is still free.
    fn extend(&mut self, idx: usize, m: usize, path: &mut Vec<usize>) {
        let cur = *path.last().expect("non-empty path");
        let target = self.v[idx];
        for y in 0..self.n {
            if self.rho_taken[y] {
                continue;
            }
            self.rho[cur] = Some(y);
            self.rho_taken[y] = true;

            if path.len() == target {
                // σ(m) = y closes the cycle at the requested length
                self.sigma[m] = Some(y);
                for &x in path.iter() {
                    self.done[x] = true;
                    self.cycle_len[x] = target;
                }
                self.run(idx + 1);
                for &x in path.iter() {
                    self.done[x] = false;
                    self.cycle_len[x] = 0;
                }
                self.sigma[m] = None;
            } else {
                for x in 0..self.n {
                    if self.done[x] || self.in_path[x] {
                        continue;
                    }
                    self.sigma[x] = Some(y);
                    self.in_path[x] = true;
                    path.push(x);
                    self.extend(idx, m, path);
                    path.pop();
                    self.in_path[x] = false;
                    self.sigma[x] = None;
                }
            }

            self.rho_taken[y] = false;
            self.rho[cur] = None;
        }
    }

    fn restriction(&self, map: &[Option<usize>]) -> DirectedGraph {
        let edges = map.iter().enumerate().filter_map(|(x, y)| y.map(|y| (x + 1, y + 1)));
        DirectedGraph::from_edges(self.n, edges).expect("in range")
    }
}

fn search(n: usize, v: &[usize], leaf: impl FnMut(&DirectedGraph, &DirectedGraph)) -> Result<()> {
    if v.is_empty() {
        return Err(Error::param("v_vec", "must be non-empty"));
    }
    if v.contains(&0) {
        return Err(Error::param("v_vec", "cycle lengths must be positive"));
    }
    if v.len() > n {
        return Ok(());
    }
    let mut s = Search {
        n,
        v,
        sigma: vec![None; n],
        rho: vec![None; n],
        rho_taken: vec![false; n],
        done: vec![false; n],
        cycle_len: vec![0; n],
        in_path: vec![false; n],
        leaf,
    };
    s.run(0);
    Ok(())
}

/// Lists the couples of `B^{n,v}` whose classes are `(class1, class2)`.
pub fn list_b(
    n: usize,
    v_vec: &[usize],
    class1: &GraphClass,
    class2: &GraphClass,
) -> Result<Vec<(DirectedGraph, DirectedGraph)>> {
    let mut out = Vec::new();
    if class1.vertex_count() != class2.vertex_count() {
        search(n, v_vec, |_, _| {})?;
        return Ok(out);
    }
    search(n, v_vec, |g1, g2| {
        if g1.non_isolated().len() == class1.vertex_count()
            && canonical_class(g1) == *class1
            && canonical_class(g2) == *class2
        {
            out.push((g1.clone(), g2.clone()));
        }
    })?;
    Ok(out)
}

/// `card B^{n,v}_{class1,class2}`.
pub fn enumerate_b(n: usize, v_vec: &[usize], class1: &GraphClass, class2: &GraphClass) -> Result<u64> {
    Ok(list_b(n, v_vec, class1, class2)?.len() as u64)
}

/// Class of `p` disjoint single edges.
pub fn t_class(p: usize) -> GraphClass {
    let g = DirectedGraph::from_edges(2 * p, (1..=p).map(|i| (2 * i - 1, 2 * i))).expect("in range");
    canonical_class(&g)
}

/// `Σ_p card B^{2p,v}_{T_p,T_p} / (2p − k)!`, the limit of
/// `n^k P(c_i(σ⁻¹ρ) = v_i, i ≤ k)` carried by the matching classes.
pub fn limit_constant(v_vec: &[usize]) -> Result<BigRational> {
    let k = v_vec.len();
    let total: usize = v_vec.iter().sum();
    let mut acc = BigRational::zero();
    for p in 1..=total {
        if 2 * p < k {
            continue;
        }
        let t = t_class(p);
        let count = enumerate_b(2 * p, v_vec, &t, &t)?;
        acc += BigRational::new(BigInt::from(count), BigInt::from(factorial(2 * p - k)));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::PairView;
    use crate::perm::Permutation;
    use std::collections::BTreeSet;

    fn falling(n: u64, k: u64) -> u64 {
        (0..k).map(|i| n - i).product()
    }

    #[test]
    fn single_index_matching_counts() {
        for (n, v1) in [(3, 1), (4, 1), (5, 1), (6, 2), (7, 2), (8, 2), (7, 3)] {
            let t = t_class(v1);
            // C(n-1, 2v-1)·(2v-1)! is the falling factorial (n-1)_(2v-1)
            assert_eq!(
                enumerate_b(n, &[v1], &t, &t).unwrap(),
                falling(n as u64 - 1, 2 * v1 as u64 - 1),
                "n={n} v={v1}"
            );
        }
    }

    #[test]
    fn small_case_listing() {
        let t = t_class(1);
        let list = list_b(3, &[1], &t, &t).unwrap();
        assert_eq!(list.len(), 2);
        for (g1, g2) in &list {
            assert_eq!(g1, g2);
            assert!(g1.contains(1, 2) || g1.contains(1, 3));
        }
    }

    #[test]
    fn mismatched_vertex_counts_give_zero() {
        let loop_class = canonical_class(&DirectedGraph::from_edges(1, [(1, 1)]).unwrap());
        assert_eq!(enumerate_b(4, &[1], &loop_class, &t_class(1)).unwrap(), 0);
        assert!(enumerate_b(4, &[], &t_class(1), &t_class(1)).is_err());
    }

    /// Brute force: collect every union couple from 𝔖_n² and compare.
    #[test]
    fn agrees_with_pair_enumeration() {
        let n = 4;
        let all: Vec<_> = Permutation::all(n).collect();
        for v in [
            vec![1],
            vec![2],
            vec![3],
            vec![1, 1],
            vec![1, 2],
            vec![2, 2],
            vec![2, 1, 1],
        ] {
            let mut brute = BTreeSet::new();
            for s in &all {
                for r in &all {
                    let view = PairView::new(s, r).unwrap();
                    let prod = s.inverse().compose(r).unwrap();
                    let ok = v
                        .iter()
                        .enumerate()
                        .all(|(i, &vi)| prod.cycle_of(i + 1).unwrap().len() == vi);
                    if ok {
                        let idx: Vec<usize> = (1..=v.len()).collect();
                        brute.insert(view.union(&idx).unwrap());
                    }
                }
            }
            let mut searched = BTreeSet::new();
            search(n, &v, |a, b| {
                assert!(searched.insert((a.clone(), b.clone())), "duplicate couple");
            })
            .unwrap();
            assert_eq!(searched, brute, "v={v:?}");
        }
    }

    #[test]
    fn matching_constants() {
        let one = BigRational::from_integer(1.into());
        assert_eq!(limit_constant(&[1]).unwrap(), one);
        assert_eq!(limit_constant(&[1, 1]).unwrap(), one);
        assert_eq!(limit_constant(&[1, 2]).unwrap(), one);
        assert_eq!(limit_constant(&[2, 1]).unwrap(), one);
        assert_eq!(limit_constant(&[3]).unwrap(), one);
    }
}
