//! Finite simple graphs on `[n]`, rooted graphs and extension pairs.

mod density;
mod iso;
mod literal;

pub use density::{density, max_density, max_density_with_cap};
pub use iso::{
    are_isomorphic_rooted, canonical_rooted, count_automorphisms, count_rooted_automorphisms,
    for_each_isomorphism, IsoOptions, DEFAULT_VERTEX_CAP,
};
pub use literal::{parse_graph_literal, parse_pair_literal, pair_to_literal, to_literal, GraphLiteral};

use crate::error::{input, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::hash::{Hash, Hasher};

/// A simple undirected graph with vertex set `[n]`.
///
/// Adjacency is stored twice: sorted neighbour lists for iteration and a
/// packed bit matrix for constant-time edge queries.
#[derive(Clone)]
pub struct Graph {
    n: usize,
    edges: usize,
    adj: Vec<Vec<u32>>,
    words: usize,
    bits: Vec<u64>,
}

impl Graph {
    /// The edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Graph {
        let words = n.div_ceil(64);
        Graph {
            n,
            edges: 0,
            adj: vec![Vec::new(); n],
            words,
            bits: vec![0; n * words],
        }
    }

    /// Builds a graph from an edge list, rejecting loops and out-of-range
    /// endpoints. Repeated pairs collapse to one edge.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut b = GraphBuilder::new(n);
        for &(u, v) in edges {
            b.add_edge(u, v)?;
        }
        Ok(b.build())
    }

    pub fn complete(n: usize) -> Graph {
        let mut b = GraphBuilder::new(n);
        for u in 0..n {
            for v in u + 1..n {
                b.push_unchecked(u, v);
            }
        }
        b.build()
    }

    pub fn path(n: usize) -> Graph {
        let mut b = GraphBuilder::new(n);
        for u in 1..n {
            b.push_unchecked(u - 1, u);
        }
        b.build()
    }

    pub fn cycle(n: usize) -> Graph {
        let mut b = GraphBuilder::new(n);
        for u in 0..n {
            let v = (u + 1) % n;
            if u != v {
                b.push_unchecked(u.min(v), u.max(v));
            }
        }
        b.build()
    }

    /// Star with centre 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Graph {
        let mut b = GraphBuilder::new(leaves + 1);
        for v in 1..=leaves {
            b.push_unchecked(0, v);
        }
        b.build()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        (self.bits[u * self.words + v / 64] >> (v % 64)) & 1 == 1
    }

    #[inline]
    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.adj[u]
    }

    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    /// Edges as pairs `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, nb)| {
            nb.iter()
                .map(|&v| v as usize)
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn edge_vec(&self) -> Vec<(usize, usize)> {
        self.edges().collect()
    }

    /// Adjacency rows as bit masks. Only valid for graphs on at most 64 vertices.
    pub fn masks(&self) -> Vec<u64> {
        assert!(self.n <= 64, "mask view needs at most 64 vertices");
        (0..self.n).map(|u| if self.n == 0 { 0 } else { self.bits[u * self.words] }).collect()
    }

    /// Induced subgraph on a vertex set. The set is sorted and deduplicated;
    /// new vertex `i` corresponds to the `i`-th smallest old vertex, and that
    /// map is returned alongside.
    pub fn induced_subgraph(&self, u: &[usize]) -> Result<(Graph, Vec<usize>)> {
        let mut keep = u.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let g = self.induced_ordered(&keep)?;
        Ok((g, keep))
    }

    /// Induced subgraph where new vertex `i` is `order[i]`. Entries must be distinct.
    pub fn induced_ordered(&self, order: &[usize]) -> Result<Graph> {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in order.iter().enumerate() {
            if v >= self.n {
                return input(format!("vertex {v} out of range for a graph on {} vertices", self.n));
            }
            if pos[v] != usize::MAX {
                return input(format!("vertex {v} listed twice"));
            }
            pos[v] = i;
        }
        let mut b = GraphBuilder::new(order.len());
        for (i, &v) in order.iter().enumerate() {
            for &w in &self.adj[v] {
                let j = pos[w as usize];
                if j != usize::MAX && i < j {
                    b.push_unchecked(i, j);
                }
            }
        }
        Ok(b.build())
    }

    /// Relabels vertices: old vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        let mut b = GraphBuilder::new(self.n);
        for (u, v) in self.edges() {
            let (a, c) = (perm[u], perm[v]);
            b.push_unchecked(a.min(c), a.max(c));
        }
        b.build()
    }

    /// Adds vertices and edges on top of `self`, returning a new graph.
    pub fn extended(&self, extra_vertices: usize, extra_edges: &[(usize, usize)]) -> Result<Graph> {
        let mut b = GraphBuilder::new(self.n + extra_vertices);
        for (u, v) in self.edges() {
            b.push_unchecked(u, v);
        }
        for &(u, v) in extra_edges {
            b.add_edge(u, v)?;
        }
        Ok(b.build())
    }

    /// Number of edges with both endpoints in the vertex set given by `mask`.
    /// Only valid for graphs on at most 64 vertices.
    pub fn edges_within_mask(masks: &[u64], set: u64) -> u32 {
        let mut total = 0;
        let mut rest = set;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            total += (masks[v] & set).count_ones();
        }
        total / 2
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.adj == other.adj
    }
}

impl Eq for Graph {}

impl Hash for Graph {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.adj.hash(state);
    }
}

impl PartialOrd for Graph {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Graph {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.n, &self.adj).cmp(&(other.n, &other.adj))
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edge_vec())
    }
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphRepr {
            n: self.n,
            edges: self.edge_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = GraphRepr::deserialize(d)?;
        Graph::from_edges(r.n, &r.edges).map_err(serde::de::Error::custom)
    }
}

/// Incremental construction of a [`Graph`].
pub struct GraphBuilder {
    n: usize,
    words: usize,
    bits: Vec<u64>,
    adj: Vec<Vec<u32>>,
    edges: usize,
}

impl GraphBuilder {
    pub fn new(n: usize) -> GraphBuilder {
        let words = n.div_ceil(64);
        GraphBuilder {
            n,
            words,
            bits: vec![0; n * words],
            adj: vec![Vec::new(); n],
            edges: 0,
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return input(format!("edge ({u},{v}) out of range for n={}", self.n));
        }
        if u == v {
            return input(format!("loop at vertex {u}"));
        }
        self.push_unchecked(u.min(v), u.max(v));
        Ok(())
    }

    /// Adds `{u, v}` assuming both are in range and distinct.
    #[inline]
    pub fn push_unchecked(&mut self, u: usize, v: usize) {
        let w = self.words;
        let slot = &mut self.bits[u * w + v / 64];
        if (*slot >> (v % 64)) & 1 == 1 {
            return;
        }
        *slot |= 1 << (v % 64);
        self.bits[v * w + u / 64] |= 1 << (u % 64);
        self.adj[u].push(v as u32);
        self.adj[v].push(u as u32);
        self.edges += 1;
    }

    pub fn build(mut self) -> Graph {
        for nb in &mut self.adj {
            nb.sort_unstable();
        }
        Graph {
            n: self.n,
            edges: self.edges,
            adj: self.adj,
            words: self.words,
            bits: self.bits,
        }
    }
}

/// A graph with an ordered tuple of distinct roots.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RootedGraph {
    graph: Graph,
    roots: Vec<usize>,
}

impl RootedGraph {
    pub fn new(graph: Graph, roots: Vec<usize>) -> Result<RootedGraph> {
        check_distinct_in_range(&roots, graph.n(), "root")?;
        Ok(RootedGraph { graph, roots })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn arity(&self) -> usize {
        self.roots.len()
    }

    /// Relabels so that roots occupy `0..k` in order and the remaining
    /// vertices are in canonical order. Isomorphic rooted graphs map to
    /// equal values.
    pub fn canonical(&self) -> Result<RootedGraph> {
        let (g, _) = canonical_rooted(&self.graph, &self.roots)?;
        Ok(RootedGraph {
            graph: g,
            roots: (0..self.roots.len()).collect(),
        })
    }
}

/// A pair `F₁ ⊂ F₂` where `F₁` is realised as the induced subgraph of `top`
/// on `base_vertices`; base vertex `i` corresponds to `base_vertices[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExtensionPair {
    base: Graph,
    top: Graph,
    base_vertices: Vec<usize>,
}

impl ExtensionPair {
    pub fn new(base: Graph, top: Graph, base_vertices: Vec<usize>) -> Result<ExtensionPair> {
        if base_vertices.len() != base.n() {
            return input(format!(
                "base has {} vertices but {} correspondences were given",
                base.n(),
                base_vertices.len()
            ));
        }
        check_distinct_in_range(&base_vertices, top.n(), "base vertex")?;
        let induced = top.induced_ordered(&base_vertices)?;
        if induced != base {
            return input("top restricted to base_vertices differs from base");
        }
        Ok(ExtensionPair {
            base,
            top,
            base_vertices,
        })
    }

    /// The pair whose base is `top` restricted to `base_vertices` (in that order).
    pub fn rooted(top: Graph, base_vertices: Vec<usize>) -> Result<ExtensionPair> {
        check_distinct_in_range(&base_vertices, top.n(), "base vertex")?;
        let base = top.induced_ordered(&base_vertices)?;
        Ok(ExtensionPair {
            base,
            top,
            base_vertices,
        })
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn top(&self) -> &Graph {
        &self.top
    }

    pub fn base_vertices(&self) -> &[usize] {
        &self.base_vertices
    }

    /// Vertices of `top` outside the base, ascending.
    pub fn new_vertices(&self) -> Vec<usize> {
        let mut inside = vec![false; self.top.n()];
        for &v in &self.base_vertices {
            inside[v] = true;
        }
        (0..self.top.n()).filter(|&v| !inside[v]).collect()
    }

    /// `(v, e)`: added vertices and added edges.
    pub fn extension_counts(&self) -> (usize, usize) {
        (
            self.top.n() - self.base.n(),
            self.top.edge_count() - self.base.edge_count(),
        )
    }
}

/// Free-function form of [`ExtensionPair::extension_counts`].
pub fn extension_counts(pair: &ExtensionPair) -> (usize, usize) {
    pair.extension_counts()
}

/// Free-function form of [`Graph::induced_subgraph`].
pub fn induced_subgraph(g: &Graph, u: &[usize]) -> Result<(Graph, Vec<usize>)> {
    g.induced_subgraph(u)
}

fn check_distinct_in_range(vs: &[usize], n: usize, what: &str) -> Result<()> {
    let mut seen = vec![false; n];
    for &v in vs {
        if v >= n {
            return input(format!("{what} {v} out of range for a graph on {n} vertices"));
        }
        if seen[v] {
            return input(format!("{what} {v} repeated"));
        }
        seen[v] = true;
    }
    Ok(())
}
