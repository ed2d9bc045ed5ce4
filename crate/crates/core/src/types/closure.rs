//! `s`-closures, closure types and the one-vertex closure extensions used by
//! the sparse engine.

use super::alpha::{alpha_exceeds, Layers};
use crate::asym::Asym;
use crate::error::{capacity, input, Result};
use crate::graph::{
    canonical_rooted, for_each_isomorphism, max_density_with_cap, ExtensionPair, Graph, GraphBuilder, IsoOptions,
    RootedGraph,
};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};

/// Default bound on closure size.
pub const DEFAULT_CLOSURE_CAP: usize = 64;

/// Bound on candidate sets examined by one closure step.
const CANDIDATE_BUDGET: usize = 2_000_000;

/// Vertex cap for isomorphism work on closures and their unions.
const ISO_CAP: usize = 24;

/// An `s`-closure inside a host graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Closure {
    /// Distinct roots in tuple order, then added vertices in order of addition.
    pub vertices: Vec<usize>,
    pub roots: usize,
}

impl Closure {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    pub fn added(&self) -> &[usize] {
        &self.vertices[self.roots..]
    }

    /// Sorted vertex set.
    pub fn vertex_set(&self) -> BTreeSet<usize> {
        self.vertices.iter().copied().collect()
    }

    /// The host graph induced on [`Closure::vertices`], in that order.
    pub fn graph(&self, g: &Graph) -> Result<Graph> {
        g.induced_ordered(&self.vertices)
    }
}

/// `cl_s(u)` in `g`, with the default size cap.
pub fn closure(g: &Graph, u: &[usize], s: u64, alpha: f64) -> Result<Closure> {
    closure_with_cap(g, u, s, alpha, DEFAULT_CLOSURE_CAP)
}

/// Grows `H = g↾u` by the smallest (then lexicographically first) set `A`
/// with `1 ≤ |A| ≤ s` such that `(H, H ∪ A)` is dense, until none exists.
/// Only sets reachable from `H` through edges are searched: a part of `A`
/// with no path to `H` would itself be a subgraph denser than `1/α`.
pub fn closure_with_cap(g: &Graph, u: &[usize], s: u64, alpha: f64, max_size: usize) -> Result<Closure> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return input(format!("alpha must lie in (0,1), got {alpha}"));
    }
    let mut vertices = Vec::new();
    for &v in u {
        if v >= g.n() {
            return input(format!("vertex {v} out of range for a graph on {} vertices", g.n()));
        }
        if !vertices.contains(&v) {
            vertices.push(v);
        }
    }
    let roots = vertices.len();
    let mut inside = vec![false; g.n()];
    for &v in &vertices {
        inside[v] = true;
    }
    let step = s.min((g.n() - roots) as u64) as usize;
    if roots > 0 {
        while let Some(a) = smallest_dense_extension(g, &vertices, &inside, step, alpha)? {
            for &v in &a {
                inside[v] = true;
                vertices.push(v);
            }
            if vertices.len() > max_size {
                return capacity(format!("closure grew past the size cap {max_size}"));
            }
        }
    }
    Ok(Closure { vertices, roots })
}

fn smallest_dense_extension(
    g: &Graph,
    h: &[usize],
    inside: &[bool],
    s: usize,
    alpha: f64,
) -> Result<Option<Vec<usize>>> {
    let mut level: BTreeSet<Vec<usize>> = BTreeSet::new();
    for size in 1..=s {
        let next: BTreeSet<Vec<usize>> = if size == 1 {
            let mut out = BTreeSet::new();
            for &v in h {
                for &w in g.neighbors(v) {
                    if !inside[w as usize] {
                        out.insert(vec![w as usize]);
                    }
                }
            }
            out
        } else {
            let mut out = BTreeSet::new();
            for a in &level {
                let frontier = h.iter().chain(a.iter());
                for &v in frontier {
                    for &w in g.neighbors(v) {
                        let w = w as usize;
                        if inside[w] || a.binary_search(&w).is_ok() {
                            continue;
                        }
                        let mut b = a.clone();
                        let at = b.binary_search(&w).unwrap_err();
                        b.insert(at, w);
                        out.insert(b);
                    }
                }
                if out.len() > CANDIDATE_BUDGET {
                    return capacity(format!("closure search exceeded {CANDIDATE_BUDGET} candidate sets"));
                }
            }
            out
        };
        for a in &next {
            if is_dense_over(g, inside, a, alpha)? {
                return Ok(Some(a.clone()));
            }
        }
        if next.is_empty() {
            break;
        }
        level = next;
    }
    Ok(None)
}

/// Whether `(H, H ∪ A)` is a dense extension, `H` given by `inside`.
fn is_dense_over(g: &Graph, inside: &[bool], a: &[usize], alpha: f64) -> Result<bool> {
    let mut base_deg = vec![0u64; a.len()];
    let mut inner = vec![0u64; a.len()];
    for (i, &v) in a.iter().enumerate() {
        for &w in g.neighbors(v) {
            let w = w as usize;
            if inside[w] {
                base_deg[i] += 1;
            } else if let Ok(j) = a.binary_search(&w) {
                inner[i] |= 1 << j;
            }
        }
        // Every added vertex needs more than 1/α incident edges.
        if !alpha_exceeds(alpha, base_deg[i] + inner[i].count_ones() as u64, 1)? {
            return Ok(false);
        }
    }
    Layers::from_degrees(&base_deg, &inner)?.is_dense(alpha)
}

/// A rooted closure up to isomorphism.
#[derive(Clone, Debug, Serialize)]
pub struct ClosureType {
    /// Canonical form; roots occupy `0..k`.
    pub rooted: RootedGraph,
    pub s: u64,
    pub alpha: f64,
    /// `ρ^max < 1/α`. Closures outside the class are legal on adversarial
    /// inputs and absent with high probability on samples.
    pub within_class: bool,
}

impl PartialEq for ClosureType {
    fn eq(&self, other: &Self) -> bool {
        self.rooted == other.rooted && self.s == other.s && self.alpha.to_bits() == other.alpha.to_bits()
    }
}

impl Eq for ClosureType {}

impl ClosureType {
    /// A type from an explicit graph whose roots are `0..k`.
    pub fn from_graph(graph: &Graph, k: usize, s: u64, alpha: f64) -> Result<ClosureType> {
        let roots: Vec<usize> = (0..k).collect();
        let (canon, _) = canonical_rooted(graph, &roots)?;
        let within_class = below_inverse_alpha(&canon, alpha)?;
        Ok(ClosureType {
            rooted: RootedGraph::new(canon, roots)?,
            s,
            alpha,
            within_class,
        })
    }

    pub fn arity(&self) -> usize {
        self.rooted.arity()
    }

    pub fn graph(&self) -> &Graph {
        self.rooted.graph()
    }
}

/// `ρ^max(g) < 1/α`, decided through [`alpha_exceeds`].
pub fn below_inverse_alpha(g: &Graph, alpha: f64) -> Result<bool> {
    if g.n() == 0 || g.edge_count() == 0 {
        return Ok(true);
    }
    let (rho, _) = max_density_with_cap(g, 20)?;
    Ok(!alpha_exceeds(alpha, *rho.numer() as u64, *rho.denom() as u64)?)
}

/// The closure of `u` canonicalised as a rooted graph. Roots must be distinct.
pub fn closure_type(g: &Graph, u: &[usize], s: u64, alpha: f64) -> Result<ClosureType> {
    let cl = closure(g, u, s, alpha)?;
    if cl.roots != u.len() {
        return input("closure types need distinct roots");
    }
    ClosureType::from_graph(&cl.graph(g)?, u.len(), s, alpha)
}

/// Number of vertices of `pair.top()` that the new vertex `x` can be sent to
/// by automorphisms fixing every base vertex.
pub fn eta(pair: &ExtensionPair, x: usize) -> Result<u64> {
    if x >= pair.top().n() || pair.base_vertices().contains(&x) {
        return input(format!("vertex {x} is not an added vertex of the pair"));
    }
    let fixed: Vec<usize> = pair.base_vertices().to_vec();
    Ok(orbit_and_aut(pair.top(), &fixed, x)?.0)
}

/// `(|orbit of x|, |automorphisms fixing `fixed` pointwise|)`.
fn orbit_and_aut(g: &Graph, fixed: &[usize], x: usize) -> Result<(u64, u64)> {
    let pins: Vec<(usize, usize)> = fixed.iter().map(|&v| (v, v)).collect();
    let mut images = vec![false; g.n()];
    let mut aut = 0u64;
    for_each_isomorphism(g, g, &pins, IsoOptions { vertex_cap: ISO_CAP }, &mut |map| {
        images[map[x]] = true;
        aut += 1;
        true
    })?;
    Ok((images.iter().filter(|&&b| b).count() as u64, aut))
}

/// Limits on the one-vertex closure extension enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionCaps {
    pub max_new_vertices: usize,
    pub max_new_edges: usize,
    pub max_types: usize,
}

impl Default for ExtensionCaps {
    fn default() -> Self {
        ExtensionCaps {
            max_new_vertices: 4,
            max_new_edges: 8,
            max_types: 50_000,
        }
    }
}

/// One way the closure of the roots plus a new vertex can sit over `F₀`.
#[derive(Clone, Debug, Serialize)]
pub struct ClosureExtension {
    /// `F₀` on `0..f`, the designated new vertex at `f`, other added vertices after it.
    pub union: Graph,
    pub base_size: usize,
    /// The closure of the roots and the new vertex, rooted at `(0..k, k)`.
    pub extended: ClosureType,
    /// `union` vertex for each vertex of `extended`'s canonical graph.
    pub embedding: Vec<usize>,
    pub new_vertices: usize,
    pub new_edges: usize,
    pub aut: u64,
    pub eta: u64,
    /// Leading order of the number of vertices realising this extension:
    /// `Pow(η/aut, v − α·e)`.
    pub weight: Asym,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionEnumeration {
    pub entries: Vec<ClosureExtension>,
    pub caps: ExtensionCaps,
    /// Added-vertex bound actually used (1 when `s_next = 0`).
    pub vertex_bound: usize,
    /// Some entry used the full vertex bound, so larger extensions may exist.
    pub vertex_bound_reached: bool,
    /// Some edge budget was cut by `max_new_edges` rather than by sparseness.
    pub edge_cap_binding: bool,
    pub candidates: u64,
}

/// All closure extensions of `f0` by one new root, up to isomorphism over `F₀`.
pub fn enumerate_closure_extension_types(
    f0: &ClosureType,
    s_next: u64,
    alpha: f64,
    caps: ExtensionCaps,
) -> Result<ExtensionEnumeration> {
    enumerate_extensions(f0.graph(), f0.arity(), s_next, alpha, caps)
}

/// [`enumerate_closure_extension_types`] over an explicit `F₀` whose roots are `0..k`.
pub fn enumerate_extensions(
    base: &Graph,
    k: usize,
    s_next: u64,
    alpha: f64,
    caps: ExtensionCaps,
) -> Result<ExtensionEnumeration> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return input(format!("alpha must lie in (0,1), got {alpha}"));
    }
    if k > base.n() {
        return input("arity exceeds the base graph");
    }
    let f = base.n();
    let vertex_bound = if s_next == 0 { 1 } else { caps.max_new_vertices.max(1) };
    let mut state = Enumeration {
        base,
        k,
        f,
        s_next,
        alpha,
        caps,
        seen: HashMap::new(),
        entries: Vec::new(),
        candidates: 0,
        edge_cap_binding: false,
    };
    for m in 1..=vertex_bound {
        state.run(m)?;
    }
    let vertex_bound_reached = state.entries.iter().any(|e| e.new_vertices == vertex_bound);
    Ok(ExtensionEnumeration {
        entries: state.entries,
        caps,
        vertex_bound,
        vertex_bound_reached,
        edge_cap_binding: state.edge_cap_binding,
        candidates: state.candidates,
    })
}

struct Enumeration<'a> {
    base: &'a Graph,
    k: usize,
    f: usize,
    s_next: u64,
    alpha: f64,
    caps: ExtensionCaps,
    seen: HashMap<Graph, ()>,
    entries: Vec<ClosureExtension>,
    candidates: u64,
    edge_cap_binding: bool,
}

impl Enumeration<'_> {
    fn run(&mut self, m: usize) -> Result<()> {
        let total = self.f + m;
        let pairs: Vec<(usize, usize)> = (self.f..total)
            .flat_map(|b| (0..b).map(move |a| (a, b)))
            .collect();
        // Sparseness over F₀ needs α·e < m for the full set of added vertices.
        let mut sparse_budget = 0usize;
        while !alpha_exceeds(self.alpha, sparse_budget as u64 + 1, m as u64)? {
            sparse_budget += 1;
        }
        if sparse_budget > self.caps.max_new_edges {
            self.edge_cap_binding = true;
        }
        let budget = sparse_budget.min(self.caps.max_new_edges);
        let mut chosen = Vec::new();
        let mut base_deg = vec![0u64; m];
        self.extend(m, &pairs, 0, budget, &mut chosen, &mut base_deg)
    }

    fn extend(
        &mut self,
        m: usize,
        pairs: &[(usize, usize)],
        from: usize,
        budget: usize,
        chosen: &mut Vec<(usize, usize)>,
        base_deg: &mut [u64],
    ) -> Result<()> {
        self.leaf(m, chosen)?;
        if chosen.len() == budget {
            return Ok(());
        }
        for i in from..pairs.len() {
            let (a, b) = pairs[i];
            let into_base = a < self.f;
            if into_base {
                // A single added vertex needs α·(edges into F₀) < 1.
                if alpha_exceeds(self.alpha, base_deg[b - self.f] + 1, 1)? {
                    continue;
                }
                base_deg[b - self.f] += 1;
            }
            chosen.push((a, b));
            self.extend(m, pairs, i + 1, budget, chosen, base_deg)?;
            chosen.pop();
            if into_base {
                base_deg[b - self.f] -= 1;
            }
        }
        Ok(())
    }

    fn leaf(&mut self, m: usize, chosen: &[(usize, usize)]) -> Result<()> {
        self.candidates += 1;
        let f = self.f;
        let x = f;
        let mut degree = vec![0u64; m];
        for &(a, b) in chosen {
            degree[b - f] += 1;
            if a >= f {
                degree[a - f] += 1;
            }
        }
        // Every added vertex other than x joins the closure through a dense step.
        for &d in &degree[1..] {
            if !alpha_exceeds(self.alpha, d, 1)? {
                return Ok(());
            }
        }
        let union = self.base.extended(m, chosen)?;
        let new: Vec<usize> = (f..f + m).collect();
        if !Layers::new(&union, &new)?.is_sparse(self.alpha)? {
            return Ok(());
        }
        let mut tuple: Vec<usize> = (0..self.k).collect();
        tuple.push(x);
        let cl = closure_with_cap(&union, &tuple, self.s_next, self.alpha, union.n())?;
        if !new.iter().all(|&v| cl.contains(v)) {
            return Ok(());
        }
        let cl_graph = cl.graph(&union)?;
        if !below_inverse_alpha(&cl_graph, self.alpha)? {
            return Ok(());
        }
        let mut key_roots: Vec<usize> = (0..f).collect();
        key_roots.push(x);
        let (key, _) = canonical_rooted(&union, &key_roots)?;
        if self.seen.insert(key, ()).is_some() {
            return Ok(());
        }
        if self.entries.len() >= self.caps.max_types {
            return capacity(format!(
                "closure extension enumeration exceeded {} types",
                self.caps.max_types
            ));
        }
        let fixed: Vec<usize> = (0..f).collect();
        let (eta, aut) = orbit_and_aut(&union, &fixed, x)?;
        let roots: Vec<usize> = (0..=self.k).collect();
        let (canon, perm) = canonical_rooted(&cl_graph, &roots)?;
        let mut embedding = vec![0; cl.len()];
        for (i, &v) in cl.vertices.iter().enumerate() {
            embedding[perm[i]] = v;
        }
        let extended = ClosureType {
            rooted: RootedGraph::new(canon, roots)?,
            s: self.s_next,
            alpha: self.alpha,
            within_class: true,
        };
        let e = chosen.len();
        let weight = Asym::pow(eta as f64 / aut as f64, m as f64 - self.alpha * e as f64);
        self.entries.push(ClosureExtension {
            union,
            base_size: f,
            extended,
            embedding,
            new_vertices: m,
            new_edges: e,
            aut,
            eta,
            weight,
        });
        Ok(())
    }
}

/// The graph `F₀` plus one isolated vertex: the extension every type admits.
pub fn isolated_extension(base: &Graph) -> Graph {
    let mut b = GraphBuilder::new(base.n() + 1);
    for (u, v) in base.edges() {
        b.push_unchecked(u, v);
    }
    b.build()
}
