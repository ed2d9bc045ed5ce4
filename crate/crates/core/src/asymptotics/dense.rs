//! Constant-`p` engine: one table per node indexed by atomic types.

use super::{Analysis, AnalysisMeta, Compiled, MeanMode, NodeKind, PhiEntry, PhiTable};
use crate::asym::Asym;
use crate::connective::Registry;
use crate::error::{input, Error, Result};
use crate::random::Regime;
use crate::term::{AggKind, Term};
use crate::types::{atomic_type, extension_percentages, AtomicType};
use crate::graph::Graph;
use std::collections::HashMap;

struct Engine<'a> {
    c: &'a Compiled,
    p: f64,
    memo: Vec<HashMap<AtomicType, Asym>>,
}

impl Engine<'_> {
    fn phi(&mut self, id: usize, t: &AtomicType) -> Result<Asym> {
        if let Some(&a) = self.memo[id].get(t) {
            return Ok(a);
        }
        let node = &self.c.nodes[id];
        let value = match &node.kind {
            NodeKind::Const(x) => Asym::constant(*x),
            NodeKind::Edge(i, j) => indicator(t.adjacent(*i, *j)),
            NodeKind::Eq(i, j) => indicator(t.same_class(*i, *j)),
            NodeKind::Apply(f, kids) => {
                let mut args = Vec::with_capacity(kids.len());
                for k in kids {
                    args.push(self.phi(k.node, &t.restrict(&k.map))?);
                }
                f.asym_apply(&args)?
            }
            NodeKind::Agg(kind, child) => {
                let inside: Vec<AtomicType> = (0..t.classes()).map(|i| t.extend_existing(i)).collect();
                let outside = extension_percentages(t, self.p);
                match kind {
                    AggKind::Sum => {
                        let mut acc = Asym::Zero;
                        for ext in &inside {
                            acc = acc.add(self.phi(child.node, &ext.restrict(&child.map))?);
                        }
                        for (ext, share) in &outside {
                            let v = self.phi(child.node, &ext.restrict(&child.map))?;
                            acc = acc.add(v.mul(Asym::pow(*share, 1.0)));
                        }
                        acc
                    }
                    AggKind::Max => {
                        let mut acc = Asym::Zero;
                        for ext in inside.iter().chain(outside.iter().map(|(e, _)| e)) {
                            acc = acc.max(self.phi(child.node, &ext.restrict(&child.map))?);
                        }
                        acc
                    }
                    AggKind::Min | AggKind::Mean => {
                        return Err(Error::Input(format!("{} must be desugared before analysis", kind.keyword())))
                    }
                }
            }
            NodeKind::LMean { .. } => return Err(Error::Input("lmean must be desugared before analysis".into())),
        };
        self.memo[id].insert(t.clone(), value);
        Ok(value)
    }
}

fn indicator(b: bool) -> Asym {
    if b {
        Asym::constant(1.0)
    } else {
        Asym::Zero
    }
}

fn run(t: &Term, p: f64, reg: &Registry, scope: &[String], root_type: Option<AtomicType>) -> Result<Analysis> {
    if !(p > 0.0 && p < 1.0) {
        return input(format!("dense edge probability must lie in (0,1), got {p}"));
    }
    let t = super::desugared(t, reg, MeanMode::Desugar)?;
    let c = Compiled::new(&t, scope)?;
    let mut e = Engine {
        c: &c,
        p,
        memo: vec![HashMap::new(); c.nodes.len()],
    };
    let root = c.root();
    let root_type = root_type.unwrap_or_else(AtomicType::empty);
    let value = e.phi(root, &root_type)?;
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
                level: None,
                k_bound: n.k_bound,
                entries,
            }
        })
        .collect();
    let m = t.metrics();
    Ok(Analysis {
        regime: Regime::Dense { p },
        value,
        tables,
        meta: AnalysisMeta {
            depth: m.depth,
            width: m.width,
            k_bound: c.nodes[root].k_bound,
            ..AnalysisMeta::default()
        },
    })
}

/// Leading order of a closed term on `G(n, p)`. `min`, `mean` and `lmean`
/// are desugared first.
pub fn analyze_dense(t: &Term, p: f64, reg: &Registry) -> Result<Analysis> {
    if !t.is_closed() {
        return input(format!("analyze_dense needs a closed term, {t} has free variables"));
    }
    run(t, p, reg, &[], None)
}

/// Leading order of an open term at the atomic type of `u` in `g`, with
/// `u[i]` assigned to the `i`-th free variable (first-occurrence order).
pub fn analyze_dense_at(t: &Term, p: f64, reg: &Registry, g: &Graph, u: &[usize]) -> Result<Analysis> {
    let scope = t.free_vars();
    if scope.len() != u.len() {
        return input(format!("term has {} free variables, {} values given", scope.len(), u.len()));
    }
    run(t, p, reg, &scope, Some(atomic_type(g, u)?))
}
