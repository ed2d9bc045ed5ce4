//! Leading-order predictions `(c, γ)` for closed terms on `G(n, p)` and
//! `G(n, n^{-α})`, built bottom-up over type tables, plus the closed-form
//! subgraph and extension count expectations.

mod dense;
mod formulas;
mod sparse;

pub use dense::{analyze_dense, analyze_dense_at};
pub use formulas::{expected_max_extension_asym, expected_subgraph_asym, expected_subgraph_count};
pub use sparse::{analyze_sparse, analyze_sparse_at, SparseConfig, TupleType};

use crate::asym::Asym;
use crate::connective::Connective;
use crate::error::{Error, Result};
use crate::random::Regime;
use crate::term::{AggKind, Term};
use crate::types::ExtensionCaps;
use serde::Serialize;
use std::collections::BTreeSet;
use std::sync::Arc;

/// How `mean` and `lmean` reach the engines.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanMode {
    /// Rewrite to `sum` with an `inv` normaliser first.
    #[default]
    Desugar,
    /// Sparse only: read the body at the typical one-vertex extension.
    Native,
}

/// One type-indexed table of a term node.
#[derive(Clone, Debug, Serialize)]
pub struct PhiTable {
    pub node: usize,
    pub term: String,
    pub free_vars: Vec<String>,
    pub depth: usize,
    /// Closure parameter of the node's types (sparse only).
    pub level: Option<u64>,
    /// Exponent `K` with `n^{-K} ≤ τ ≤ n^K` on nonzero values.
    pub k_bound: f64,
    pub entries: Vec<PhiEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PhiEntry {
    pub key: String,
    pub value: Asym,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AnalysisMeta {
    pub depth: usize,
    pub width: usize,
    pub k_bound: f64,
    pub mean_mode: MeanMode,
    /// Closure parameters `s_0, …, s_D` (sparse).
    pub s: Option<Vec<u64>>,
    pub s_saturated: bool,
    pub caps: Option<ExtensionCaps>,
    /// Added-vertex bound used for the irrationality preflight.
    pub guard_pattern_size: Option<u64>,
    pub enumerations: u64,
    pub candidates: u64,
    pub largest_extension: usize,
    /// Some enumeration produced an entry at its vertex bound or had its edge
    /// budget cut by the cap, so larger extensions were not explored.
    pub caps_binding: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Analysis {
    pub regime: Regime,
    pub value: Asym,
    pub tables: Vec<PhiTable>,
    pub meta: AnalysisMeta,
}

/// A term node with its free variables in scope order.
#[derive(Clone, Debug)]
pub(crate) struct Node {
    pub kind: NodeKind,
    pub fv: Vec<String>,
    pub depth: usize,
    pub k_bound: f64,
    pub text: String,
}

/// `map[j]` is the position, in the parent tuple (extended by the bound
/// variable for binders), of the child's `j`-th free variable.
#[derive(Clone, Debug)]
pub(crate) struct Child {
    pub node: usize,
    pub map: Vec<usize>,
}

#[derive(Clone, Debug)]
pub(crate) enum NodeKind {
    Const(f64),
    Edge(usize, usize),
    Eq(usize, usize),
    Apply(Arc<Connective>, Vec<Child>),
    Agg(AggKind, Child),
    LMean { anchor: usize, child: Child },
}

/// Flattened term; children precede parents and the root is last.
#[derive(Clone, Debug)]
pub(crate) struct Compiled {
    pub nodes: Vec<Node>,
}

impl Compiled {
    pub fn new(t: &Term, scope: &[String]) -> Result<Compiled> {
        let mut nodes = Vec::new();
        compile(t, scope, &mut nodes)?;
        Ok(Compiled { nodes })
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }
}

fn position(fv: &[String], v: &str) -> usize {
    fv.iter().position(|x| x == v).expect("variable is free in the node")
}

fn compile(t: &Term, scope: &[String], nodes: &mut Vec<Node>) -> Result<usize> {
    let free: BTreeSet<String> = t.free_vars().into_iter().collect();
    let fv: Vec<String> = scope.iter().filter(|v| free.contains(*v)).cloned().collect();
    if fv.len() != free.len() {
        return Err(Error::Input(format!("term {t} has variables outside the scope")));
    }
    let child_of = |body: &Term, extended: &[String], nodes: &mut Vec<Node>| -> Result<Child> {
        let id = compile(body, extended, nodes)?;
        let map = nodes[id].fv.iter().map(|v| position(extended, v)).collect();
        Ok(Child { node: id, map })
    };
    let bind = |v: &str| -> Vec<String> {
        let mut ext: Vec<String> = fv.iter().filter(|x| *x != v).cloned().collect();
        ext.push(v.to_string());
        ext
    };
    let (kind, k_bound) = match t {
        Term::Const(c) => (NodeKind::Const(*c), 0.0),
        Term::Edge(x, y) => (NodeKind::Edge(position(&fv, x), position(&fv, y)), 0.0),
        Term::Eq(x, y) => (NodeKind::Eq(position(&fv, x), position(&fv, y)), 0.0),
        Term::Apply(f, args) => {
            check_connective(f)?;
            let mut kids = Vec::new();
            let mut k: f64 = 0.0;
            for a in args {
                let c = child_of(a, &fv, nodes)?;
                k = k.max(nodes[c.node].k_bound);
                kids.push(c);
            }
            (NodeKind::Apply(f.clone(), kids), f.power_degree() * k)
        }
        Term::Agg(kind, v, body) => {
            let ext = bind(v);
            let c = child_of(body, &ext, nodes)?;
            let k = nodes[c.node].k_bound + if *kind == AggKind::Sum { 1.0 } else { 0.0 };
            (NodeKind::Agg(*kind, c), k)
        }
        Term::LMean { anchor, bound, body } => {
            let ext = bind(bound);
            let c = child_of(body, &ext, nodes)?;
            let k = nodes[c.node].k_bound;
            (NodeKind::LMean { anchor: position(&fv, anchor), child: c }, k)
        }
    };
    nodes.push(Node {
        kind,
        fv,
        depth: t.depth(),
        k_bound,
        text: t.to_string(),
    });
    Ok(nodes.len() - 1)
}

/// Engines need a leading-order evaluator and relative Lipschitz membership.
fn check_connective(f: &Connective) -> Result<()> {
    if !f.is_asympoly() {
        return Err(Error::Capability(format!("connective {} has no asymptotic evaluator", f.name())));
    }
    if !f.is_rellip() {
        return Err(Error::Class(format!("connective {} is not relative Lipschitz", f.name())));
    }
    Ok(())
}

/// Extension of a child tuple from the parent tuple plus one bound value.
pub(crate) fn child_tuple<T: Copy>(map: &[usize], parent: &[T], bound: Option<T>) -> Vec<T> {
    map.iter()
        .map(|&j| if j < parent.len() { parent[j] } else { bound.expect("bound variable in scope") })
        .collect()
}

pub(crate) fn desugared(t: &Term, reg: &crate::connective::Registry, mode: MeanMode) -> Result<Term> {
    let t = crate::term::desugar_min(t, reg)?;
    match mode {
        MeanMode::Desugar => crate::term::desugar_means(&t, reg),
        MeanMode::Native => Ok(t),
    }
}
