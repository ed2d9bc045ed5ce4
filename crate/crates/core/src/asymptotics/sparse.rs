//! `p = n^{-α}` engine: tables indexed by closure types of each node's tuple,
//! with closure parameters drawn from a rapid sequence by node depth.

use super::{child_tuple, Analysis, AnalysisMeta, Compiled, MeanMode, NodeKind, PhiEntry, PhiTable};
use crate::asym::Asym;
use crate::connective::Registry;
use crate::error::{input, Error, Result};
use crate::graph::{canonical_rooted, to_literal, Graph};
use crate::random::Regime;
use crate::term::{AggKind, Term};
use crate::types::closure::isolated_extension;
use crate::types::{
    closure_with_cap, enumerate_extensions, irrationality_guard, rapid_sequence_saturating, EllConfig,
    ExtensionCaps, ExtensionEnumeration, Guard,
};
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

/// Closure type of a tuple with repeats allowed: `pattern[i]` is the class
/// of position `i` (first-occurrence numbering) and class `j` is vertex `j`
/// of the canonical closure graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TupleType {
    pub pattern: Vec<usize>,
    pub graph: Graph,
}

impl TupleType {
    pub fn empty() -> TupleType {
        TupleType {
            pattern: vec![],
            graph: Graph::empty(0),
        }
    }

    pub fn classes(&self) -> usize {
        self.pattern.iter().map(|&c| c + 1).max().unwrap_or(0)
    }

    /// Graph literal of the closure graph with the roots listed first.
    pub fn literal(&self) -> String {
        let roots: Vec<usize> = (0..self.classes()).collect();
        to_literal(&self.graph, Some(&roots))
    }

    /// The closure of `verts` at parameter `s` inside `host`, canonicalised.
    pub fn of(host: &Graph, verts: &[usize], s: u64, alpha: f64) -> Result<TupleType> {
        let mut distinct: Vec<usize> = Vec::new();
        let pattern = verts
            .iter()
            .map(|v| match distinct.iter().position(|x| x == v) {
                Some(i) => i,
                None => {
                    distinct.push(*v);
                    distinct.len() - 1
                }
            })
            .collect();
        let cl = closure_with_cap(host, &distinct, s, alpha, host.n().max(1))?;
        let roots: Vec<usize> = (0..distinct.len()).collect();
        let (graph, _) = canonical_rooted(&cl.graph(host)?, &roots)?;
        Ok(TupleType { pattern, graph })
    }
}

impl fmt::Display for TupleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pattern={:?} n={} edges={:?}", self.pattern, self.graph.n(), self.graph.edge_vec())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SparseConfig {
    pub alpha: f64,
    /// Depth bound `D`; defaults to the term's depth.
    pub d: Option<usize>,
    /// Width bound `W`; defaults to the term's width.
    pub w: Option<usize>,
    pub ell: EllConfig,
    pub caps: ExtensionCaps,
    pub mean_mode: MeanMode,
}

impl SparseConfig {
    pub fn new(alpha: f64) -> SparseConfig {
        SparseConfig {
            alpha,
            d: None,
            w: None,
            ell: EllConfig::default(),
            caps: ExtensionCaps::default(),
            mean_mode: MeanMode::Desugar,
        }
    }
}

struct Engine<'a> {
    c: &'a Compiled,
    alpha: f64,
    /// `s[i]` for `i = 0..=D`; a node of depth `d` uses `s[D − d]`.
    s: Vec<u64>,
    d: usize,
    caps: ExtensionCaps,
    memo: Vec<HashMap<TupleType, Asym>>,
    restricted: HashMap<(Graph, Vec<usize>, u64), TupleType>,
    enumerations: HashMap<(Graph, usize, u64), Arc<ExtensionEnumeration>>,
    meta: AnalysisMeta,
}

impl Engine<'_> {
    fn level(&self, id: usize) -> u64 {
        self.s[self.d - self.c.nodes[id].depth]
    }

    fn restrict(&mut self, host: &Graph, verts: Vec<usize>, s: u64) -> Result<TupleType> {
        let key = (host.clone(), verts, s);
        if let Some(t) = self.restricted.get(&key) {
            return Ok(t.clone());
        }
        let t = TupleType::of(host, &key.1, s, self.alpha)?;
        self.restricted.insert(key, t.clone());
        Ok(t)
    }

    fn extensions(&mut self, base: &Graph, k: usize, s_next: u64) -> Result<Arc<ExtensionEnumeration>> {
        let key = (base.clone(), k, s_next);
        if let Some(e) = self.enumerations.get(&key) {
            return Ok(e.clone());
        }
        let e = Arc::new(enumerate_extensions(base, k, s_next, self.alpha, self.caps)?);
        self.meta.enumerations += 1;
        self.meta.candidates += e.candidates;
        self.meta.largest_extension = self
            .meta
            .largest_extension
            .max(e.entries.iter().map(|x| x.new_vertices).max().unwrap_or(0));
        let bound_binding = e.vertex_bound_reached && e.vertex_bound == self.caps.max_new_vertices;
        self.meta.caps_binding |= bound_binding || e.edge_cap_binding;
        self.enumerations.insert(key, e.clone());
        Ok(e)
    }

    fn child_phi(&mut self, child: &super::Child, host: &Graph, parent: &[usize], bound: Option<usize>) -> Result<Asym> {
        let verts = child_tuple(&child.map, parent, bound);
        let s = self.level(child.node);
        let t = self.restrict(host, verts, s)?;
        self.phi(child.node, &t)
    }

    fn phi(&mut self, id: usize, t: &TupleType) -> Result<Asym> {
        if let Some(&a) = self.memo[id].get(t) {
            return Ok(a);
        }
        let c = self.c;
        let node = &c.nodes[id];
        let host = &t.graph;
        let tuple = &t.pattern;
        let value = match &node.kind {
            NodeKind::Const(x) => Asym::constant(*x),
            NodeKind::Edge(i, j) => {
                let (a, b) = (tuple[*i], tuple[*j]);
                indicator(a != b && host.has_edge(a, b))
            }
            NodeKind::Eq(i, j) => indicator(tuple[*i] == tuple[*j]),
            NodeKind::Apply(f, kids) => {
                let mut args = Vec::with_capacity(kids.len());
                for k in kids {
                    args.push(self.child_phi(k, host, tuple, None)?);
                }
                f.asym_apply(&args)?
            }
            NodeKind::Agg(AggKind::Mean, child) => {
                let ext = isolated_extension(host);
                self.child_phi(child, &ext, tuple, Some(host.n()))?
            }
            NodeKind::LMean { anchor, child } => {
                let ext = host.extended(1, &[(tuple[*anchor], host.n())])?;
                self.child_phi(child, &ext, tuple, Some(host.n()))?
            }
            NodeKind::Agg(AggKind::Min, _) => return input("min must be desugared before analysis"),
            NodeKind::Agg(kind, child) => {
                let f = host.n();
                // The bound vertex inside the closure: a root or another closure vertex.
                let mut inside = Vec::with_capacity(f);
                for v in 0..f {
                    inside.push(self.child_phi(child, host, tuple, Some(v))?);
                }
                let s_next = self.level(child.node);
                let ext = self.extensions(host, t.classes(), s_next)?;
                let mut outside = Vec::with_capacity(ext.entries.len());
                for e in &ext.entries {
                    let v = self.child_phi(child, &e.union, tuple, Some(f))?;
                    outside.push((v, e.weight));
                }
                if *kind == AggKind::Sum {
                    let own = inside.into_iter().fold(Asym::Zero, Asym::add);
                    outside.into_iter().fold(own, |acc, (v, w)| acc.add(v.mul(w)))
                } else {
                    let own = inside.into_iter().fold(Asym::Zero, Asym::max);
                    outside.into_iter().fold(own, |acc, (v, _)| acc.max(v))
                }
            }
        };
        self.memo[id].insert(t.clone(), value);
        Ok(value)
    }

    /// Largest added-vertex bound any enumeration will use.
    fn guard_pattern_size(&self) -> u64 {
        let mut m = 1u64;
        for n in &self.c.nodes {
            if let NodeKind::Agg(AggKind::Sum | AggKind::Max, child) = &n.kind {
                let bound = if self.level(child.node) == 0 { 1 } else { self.caps.max_new_vertices };
                m = m.max(bound as u64);
            }
        }
        m
    }
}

fn indicator(b: bool) -> Asym {
    if b {
        Asym::constant(1.0)
    } else {
        Asym::Zero
    }
}

fn run(t: &Term, cfg: &SparseConfig, reg: &Registry, scope: &[String], root: Option<(&Graph, &[usize])>) -> Result<Analysis> {
    let alpha = cfg.alpha;
    if !(alpha > 0.0 && alpha < 1.0) {
        return input(format!("sparse exponent must lie in (0,1), got {alpha}"));
    }
    let m = t.metrics();
    let d_user = cfg.d.unwrap_or(m.depth);
    let w_user = cfg.w.unwrap_or(m.width);
    if m.depth > d_user || m.width > w_user {
        return input(format!(
            "term depth {} and width {} exceed the bounds D={d_user}, W={w_user}",
            m.depth, m.width
        ));
    }
    let t = super::desugared(t, reg, cfg.mean_mode)?;
    let md = t.metrics();
    let d = d_user.max(md.depth).max(1);
    let w = w_user.max(md.width).max(1);
    let seq = rapid_sequence_saturating(d as u64, w as u64, &cfg.ell)?;
    let c = Compiled::new(&t, scope)?;
    let mut e = Engine {
        c: &c,
        alpha,
        s: seq.s.clone(),
        d,
        caps: cfg.caps,
        memo: vec![HashMap::new(); c.nodes.len()],
        restricted: HashMap::new(),
        enumerations: HashMap::new(),
        meta: AnalysisMeta::default(),
    };
    let size = e.guard_pattern_size();
    if let Guard::Conflict { e, v } = irrationality_guard(alpha, size) {
        return Err(Error::Irrationality { e, v });
    }
    let root_id = c.root();
    let root_type = match root {
        None => TupleType::empty(),
        Some((g, u)) => {
            let s = e.level(root_id);
            e.restrict(g, u.to_vec(), s)?
        }
    };
    let value = e.phi(root_id, &root_type)?;
    let tables = c
        .nodes
        .iter()
        .enumerate()
        .map(|(id, n)| {
            let mut entries: Vec<PhiEntry> = e.memo[id]
                .iter()
                .map(|(k, v)| PhiEntry {
                    key: k.to_string(),
                    value: *v,
                })
                .collect();
            entries.sort_by(|a, b| a.key.cmp(&b.key));
            PhiTable {
                node: id,
                term: n.text.clone(),
                free_vars: n.fv.clone(),
                depth: n.depth,
                level: Some(e.level(id)),
                k_bound: n.k_bound,
                entries,
            }
        })
        .collect();
    let meta = AnalysisMeta {
        depth: md.depth,
        width: md.width,
        k_bound: c.nodes[root_id].k_bound,
        mean_mode: cfg.mean_mode,
        s: Some(seq.s),
        s_saturated: seq.saturated,
        caps: Some(cfg.caps),
        guard_pattern_size: Some(size),
        ..e.meta
    };
    Ok(Analysis {
        regime: Regime::Sparse { alpha },
        value,
        tables,
        meta,
    })
}

/// Leading order of a closed term on `G(n, n^{-α})`.
pub fn analyze_sparse(t: &Term, cfg: &SparseConfig, reg: &Registry) -> Result<Analysis> {
    if !t.is_closed() {
        return input(format!("analyze_sparse needs a closed term, {t} has free variables"));
    }
    run(t, cfg, reg, &[], None)
}

/// Leading order of an open term at the closure type of `u` in `g`, with
/// `u[i]` assigned to the `i`-th free variable (first-occurrence order).
pub fn analyze_sparse_at(t: &Term, cfg: &SparseConfig, reg: &Registry, g: &Graph, u: &[usize]) -> Result<Analysis> {
    let scope = t.free_vars();
    if scope.len() != u.len() {
        return input(format!("term has {} free variables, {} values given", scope.len(), u.len()));
    }
    if let Some(&x) = u.iter().find(|&&x| x >= g.n()) {
        return input(format!("vertex {x} out of range for a graph on {} vertices", g.n()));
    }
    run(t, cfg, reg, &scope, Some((g, u)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_with;

    const TRIANGLE: &str = "sum u . sum v . sum w . mul(E(u,v), E(v,w), E(u,w))";
    const MEMBERSHIP: &str = "mean v . max a . max b . mul(E(v,a), E(a,b), E(v,b))";

    fn value(text: &str, cfg: &SparseConfig) -> Asym {
        let reg = Registry::builtin();
        let t = parse_with(text, &reg).unwrap();
        analyze_sparse(&t, cfg, &reg).unwrap().value
    }

    #[test]
    fn ordered_triangles() {
        let v = value(TRIANGLE, &SparseConfig::new(0.7));
        assert!(v.approx_eq(&Asym::pow(1.0, 0.9), 1e-9), "{v:?}");
    }

    #[test]
    fn edges_and_degree() {
        let v = value("sum u . sum v . E(u,v)", &SparseConfig::new(0.7));
        assert!(v.approx_eq(&Asym::pow(1.0, 1.3), 1e-9), "{v:?}");
        let reg = Registry::builtin();
        let t = parse_with("sum v . E(u,v)", &reg).unwrap();
        let a = analyze_sparse_at(&t, &SparseConfig::new(0.7), &reg, &Graph::empty(1), &[0]).unwrap();
        assert!(a.value.approx_eq(&Asym::pow(1.0, 0.3), 1e-9));
        assert!(value("sum v . 1", &SparseConfig::new(0.3)).approx_eq(&Asym::pow(1.0, 1.0), 1e-9));
    }

    #[test]
    fn typical_vertex_has_a_neighbour() {
        for mode in [MeanMode::Native, MeanMode::Desugar] {
            let cfg = SparseConfig {
                mean_mode: mode,
                ..SparseConfig::new(0.6)
            };
            let cfg = SparseConfig {
                caps: ExtensionCaps {
                    max_new_vertices: 2,
                    ..ExtensionCaps::default()
                },
                ..cfg
            };
            let v = value("mean v . max w . E(v,w)", &cfg);
            assert!(v.approx_eq(&Asym::pow(1.0, 0.0), 1e-9), "{mode:?} {v:?}");
        }
    }

    #[test]
    fn typical_vertex_in_no_triangle() {
        let cfg = SparseConfig {
            mean_mode: MeanMode::Native,
            caps: ExtensionCaps {
                max_new_vertices: 3,
                ..ExtensionCaps::default()
            },
            ..SparseConfig::new(0.8)
        };
        assert!(value(MEMBERSHIP, &cfg).is_zero());
        // Some vertices do lie on triangles: about n^{3−2.4} of them.
        let count = "sum v . max a . max b . mul(E(v,a), E(a,b), E(v,b))";
        assert!(value(count, &cfg).approx_eq(&Asym::pow(0.5, 0.6), 1e-9));
    }

    #[test]
    fn guard_and_bounds() {
        let reg = Registry::builtin();
        let t = parse_with("sum u . sum v . E(u,v)", &reg).unwrap();
        assert!(matches!(
            analyze_sparse(&t, &SparseConfig::new(0.5), &reg),
            Err(Error::Irrationality { e: 2, v: 1 })
        ));
        let cfg = SparseConfig {
            d: Some(1),
            ..SparseConfig::new(0.7)
        };
        assert!(matches!(analyze_sparse(&t, &cfg, &reg), Err(Error::Input(_))));
    }

    #[test]
    fn max_rule_dominates() {
        let reg = Registry::builtin();
        let t = parse_with("max u . add(sum v . E(u,v), 1)", &reg).unwrap();
        let a = analyze_sparse(&t, &SparseConfig::new(0.7), &reg).unwrap();
        assert!(a.value.approx_eq(&Asym::pow(1.0, 0.3), 1e-9));
        let root = a.tables.last().unwrap();
        let body = &a.tables[a.tables.len() - 2];
        for e in &body.entries {
            assert_ne!(root.entries[0].value.cmp_lex(&e.value), std::cmp::Ordering::Less);
        }
        assert_eq!(a.meta.k_bound, 1.0);
    }
}
