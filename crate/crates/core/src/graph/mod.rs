//! Simple directed graphs on labelled vertices, their classes up to
//! relabelling (after deleting isolated vertices), and the traversal graphs
//! read off a pair of permutations.

mod bset;
pub mod lemmas;
mod traversal;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::perm::Permutation;

pub use bset::{enumerate_b, limit_constant, list_b, t_class};
pub use traversal::{check_lemma_l14, graphs_from_traversal, traversal, union_graphs, PairView, TraversalRecord};

/// Directed graph on vertices `1..=n`; loops allowed, no multi-edges.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct DirectedGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

/// A non-trivial connected component (weak connectivity).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl Component {
    pub fn is_two_cycle(&self) -> bool {
        self.vertices.len() == 2 && self.edges.len() == 2 && self.edges.iter().all(|&(a, b)| a != b)
    }
}

impl DirectedGraph {
    pub fn empty(n: usize) -> Self {
        DirectedGraph {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = DirectedGraph::empty(n);
        for (i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    /// Functional graph `g_σ` with edges `(i, σ(i))`.
    pub fn of_permutation(sigma: &Permutation) -> Self {
        DirectedGraph {
            n: sigma.n(),
            edges: (1..=sigma.n()).map(|i| (i, sigma.apply(i))).collect(),
        }
    }

    /// Returns `false` if the edge was already present.
    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<bool> {
        for v in [i, j] {
            if v == 0 || v > self.n {
                return Err(Error::IndexOutOfRange { index: v, n: self.n });
            }
        }
        Ok(self.edges.insert((i, j)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i, j))
    }

    pub fn is_subgraph_of(&self, other: &DirectedGraph) -> bool {
        self.n == other.n && self.edges.is_subset(&other.edges)
    }

    pub fn union(&self, other: &DirectedGraph) -> Result<DirectedGraph> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(DirectedGraph {
            n: self.n,
            edges: self.edges.union(&other.edges).copied().collect(),
        })
    }

    /// `A_g` as a dense 0/1 matrix, row `i - 1` for vertex `i`.
    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        let mut a = vec![vec![false; self.n]; self.n];
        for &(i, j) in &self.edges {
            a[i - 1][j - 1] = true;
        }
        a
    }

    pub fn transpose(&self) -> DirectedGraph {
        DirectedGraph {
            n: self.n,
            edges: self.edges.iter().map(|&(i, j)| (j, i)).collect(),
        }
    }

    /// Image under the relabelling `v ↦ relabel(v)`.
    pub fn relabel(&self, relabel: &Permutation) -> Result<DirectedGraph> {
        if relabel.n() != self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: relabel.n(),
            });
        }
        Ok(DirectedGraph {
            n: self.n,
            edges: self
                .edges
                .iter()
                .map(|&(i, j)| (relabel.apply(i), relabel.apply(j)))
                .collect(),
        })
    }

    pub fn loop_count(&self) -> usize {
        self.edges.iter().filter(|(i, j)| i == j).count()
    }

    pub fn non_isolated(&self) -> BTreeSet<usize> {
        self.edges.iter().flat_map(|&(i, j)| [i, j]).collect()
    }

    pub fn has_two_cycle(&self) -> bool {
        self.edges.iter().any(|&(i, j)| i != j && self.edges.contains(&(j, i)))
    }

    /// Whether some permutation contains this graph, i.e. every vertex has
    /// out- and in-degree at most one.
    pub fn is_partial_injection(&self) -> bool {
        let mut out = BTreeSet::new();
        let mut inc = BTreeSet::new();
        self.edges.iter().all(|&(i, j)| out.insert(i) && inc.insert(j))
    }

    /// Non-trivial components, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Component> {
        let mut parent: Vec<usize> = (0..=self.n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut root = x;
            while parent[root] != root {
                root = parent[root];
            }
            let mut y = x;
            while parent[y] != root {
                let next = parent[y];
                parent[y] = root;
                y = next;
            }
            root
        }
        for &(i, j) in &self.edges {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut by_root: BTreeMap<usize, Component> = BTreeMap::new();
        for v in self.non_isolated() {
            let r = find(&mut parent, v);
            by_root
                .entry(r)
                .or_insert_with(|| Component {
                    vertices: Vec::new(),
                    edges: Vec::new(),
                })
                .vertices
                .push(v);
        }
        for &(i, j) in &self.edges {
            let r = find(&mut parent, i);
            by_root.get_mut(&r).expect("edge endpoint").edges.push((i, j));
        }
        by_root.into_values().collect()
    }

    /// The graph with isolated vertices deleted and the rest renumbered
    /// `1..=v` in increasing order.
    pub fn strip_isolated(&self) -> DirectedGraph {
        let verts: Vec<usize> = self.non_isolated().into_iter().collect();
        let index: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(k, &v)| (v, k + 1)).collect();
        DirectedGraph {
            n: verts.len(),
            edges: self.edges.iter().map(|(i, j)| (index[i], index[j])).collect(),
        }
    }
}

impl fmt::Display for DirectedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.n)?;
        for (i, j) in &self.edges {
            writeln!(f, "{i} {j}")?;
        }
        Ok(())
    }
}

impl FromStr for DirectedGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing `n=<int>` header".into()))?;
        let n = header
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::Parse(format!("bad header `{header}`")))?;
        let mut g = DirectedGraph::empty(n);
        for line in lines {
            let mut parts = line.split_whitespace().map(str::parse::<usize>);
            match (parts.next(), parts.next(), parts.next()) {
                (Some(Ok(i)), Some(Ok(j)), None) => {
                    if !g.add_edge(i, j)? {
                        return Err(Error::Parse(format!("duplicate edge `{line}`")));
                    }
                }
                _ => return Err(Error::Parse(format!("bad edge line `{line}`"))),
            }
        }
        Ok(g)
    }
}

/// Equivalence class of a graph under relabelling after deleting isolated
/// vertices, held as a canonical representative on `1..=v`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GraphClass {
    canonical: DirectedGraph,
}

impl GraphClass {
    pub fn of(g: &DirectedGraph) -> GraphClass {
        canonical_class(g)
    }

    pub fn canonical(&self) -> &DirectedGraph {
        &self.canonical
    }

    pub fn vertex_count(&self) -> usize {
        self.canonical.n
    }

    pub fn edge_count(&self) -> usize {
        self.canonical.edge_count()
    }
}

impl fmt::Display for GraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.canonical.fmt(f)
    }
}

/// Canonical representative of the class of `g`.
///
/// Vertices are first coloured by iterated refinement of
/// (loop, out-neighbour colours, in-neighbour colours); the colouring is
/// label-independent, so restricting relabellings to those that list colour
/// classes in order keeps the minimum a class invariant. The representative
/// is the lexicographically least sorted edge list over those relabellings.
pub fn canonical_class(g: &DirectedGraph) -> GraphClass {
    let h = g.strip_isolated();
    let v = h.n;
    if v == 0 {
        return GraphClass { canonical: h };
    }
    let edges: Vec<(usize, usize)> = h.edges.iter().map(|&(i, j)| (i - 1, j - 1)).collect();
    let mut out_nb = vec![Vec::new(); v];
    let mut in_nb = vec![Vec::new(); v];
    let mut looped = vec![false; v];
    for &(i, j) in &edges {
        if i == j {
            looped[i] = true;
        } else {
            out_nb[i].push(j);
            in_nb[j].push(i);
        }
    }

    let mut colour = vec![0usize; v];
    let mut n_colours = 0;
    loop {
        let signatures: Vec<(usize, bool, Vec<usize>, Vec<usize>)> = (0..v)
            .map(|x| {
                let mut o: Vec<usize> = out_nb[x].iter().map(|&y| colour[y]).collect();
                let mut i: Vec<usize> = in_nb[x].iter().map(|&y| colour[y]).collect();
                o.sort_unstable();
                i.sort_unstable();
                (colour[x], looped[x], o, i)
            })
            .collect();
        let distinct: BTreeSet<_> = signatures.iter().cloned().collect();
        let rank: BTreeMap<_, usize> = distinct.into_iter().enumerate().map(|(k, s)| (s, k)).collect();
        let next: Vec<usize> = signatures.iter().map(|s| rank[s]).collect();
        let count = rank.len();
        colour = next;
        if count == n_colours {
            break;
        }
        n_colours = count;
    }

    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); n_colours];
    for x in 0..v {
        cells[colour[x]].push(x);
    }
    let mut label = vec![0usize; v];
    let mut best: Option<Vec<(usize, usize)>> = None;
    search_cells(&cells, 0, 0, &mut label, &edges, &mut best);
    let best = best.expect("at least one labelling");
    GraphClass {
        canonical: DirectedGraph {
            n: v,
            edges: best.into_iter().map(|(i, j)| (i + 1, j + 1)).collect(),
        },
    }
}

fn search_cells(
    cells: &[Vec<usize>],
    cell: usize,
    offset: usize,
    label: &mut Vec<usize>,
    edges: &[(usize, usize)],
    best: &mut Option<Vec<(usize, usize)>>,
) {
    if cell == cells.len() {
        let mut relabelled: Vec<(usize, usize)> = edges.iter().map(|&(i, j)| (label[i], label[j])).collect();
        relabelled.sort_unstable();
        if best.as_ref().is_none_or(|b| relabelled < *b) {
            *best = Some(relabelled);
        }
        return;
    }
    let members = &cells[cell];
    for order in Permutation::all(members.len()) {
        for (k, &x) in members.iter().enumerate() {
            label[x] = offset + order.as_zero_based()[k];
        }
        search_cells(cells, cell + 1, offset + members.len(), label, edges, best);
    }
}

/// `σ ∈ 𝔖_{n,g}`: every edge `(i, j)` of `g` has `σ(i) = j`.
pub fn membership(sigma: &Permutation, g: &DirectedGraph) -> Result<bool> {
    if sigma.n() != g.n {
        return Err(Error::SizeMismatch {
            left: sigma.n(),
            right: g.n,
        });
    }
    Ok(g.edges.iter().all(|&(i, j)| sigma.apply(i) == j))
}

/// Exactly `k` non-trivial components, each a single non-loop edge.
pub fn is_t_class(g: &DirectedGraph, k: usize) -> bool {
    let comps = g.components();
    comps.len() == k && comps.iter().all(|c| c.edges.len() == 1 && c.vertices.len() == 2)
}
