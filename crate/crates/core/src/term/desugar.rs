use super::{AggKind, Term};
use crate::connective::{Connective, Registry};
use crate::error::Result;
use std::collections::BTreeSet;
use std::sync::Arc;

struct Fresh {
    taken: BTreeSet<String>,
    next: usize,
}

impl Fresh {
    fn new(t: &Term) -> Fresh {
        Fresh { taken: t.all_vars(), next: 0 }
    }

    fn name(&mut self) -> String {
        loop {
            let v = format!("_f{}", self.next);
            self.next += 1;
            if self.taken.insert(v.clone()) {
                return v;
            }
        }
    }
}

fn rebuild(t: &Term, f: &mut dyn FnMut(&Term, Vec<Term>) -> Term) -> Term {
    let kids: Vec<Term> = t.children().into_iter().map(|c| rebuild(c, f)).collect();
    f(t, kids)
}

fn with_children(t: &Term, mut kids: Vec<Term>) -> Term {
    match t {
        Term::Const(_) | Term::Edge(..) | Term::Eq(..) => t.clone(),
        Term::Apply(c, _) => Term::Apply(c.clone(), kids),
        Term::Agg(k, v, _) => Term::Agg(*k, v.clone(), Box::new(kids.remove(0))),
        Term::LMean { anchor, bound, .. } => Term::LMean {
            anchor: anchor.clone(),
            bound: bound.clone(),
            body: Box::new(kids.remove(0)),
        },
    }
}

fn unary(reg: &Registry, name: &str) -> Result<Arc<Connective>> {
    reg.resolve(name, None, 1)
}

/// Replaces every `min u . τ` by `mul(indz(max u . indz(τ)), inv(max u . inv(τ)))`.
pub fn desugar_min(t: &Term, reg: &Registry) -> Result<Term> {
    let indz = unary(reg, "indz")?;
    let inv = unary(reg, "inv")?;
    let mul = reg.resolve("mul", None, 2)?;
    Ok(rebuild(t, &mut |node, mut kids| match node {
        Term::Agg(AggKind::Min, v, _) => {
            let body = kids.remove(0);
            let zero_branch = Term::Apply(
                indz.clone(),
                vec![Term::max(v, Term::Apply(indz.clone(), vec![body.clone()]))],
            );
            let inverse_branch =
                Term::Apply(inv.clone(), vec![Term::max(v, Term::Apply(inv.clone(), vec![body]))]);
            Term::Apply(mul.clone(), vec![zero_branch, inverse_branch])
        }
        _ => with_children(node, kids),
    }))
}

/// Replaces `mean v . τ` by `sum v . mul(inv(sum w . 1), τ)` and
/// `lmean u~v . τ` by `sum v . mul(inv(sum w . E(u,w)), mul(E(u,v), τ))`,
/// with `w` fresh.
pub fn desugar_means(t: &Term, reg: &Registry) -> Result<Term> {
    let inv = unary(reg, "inv")?;
    let mul = reg.resolve("mul", None, 2)?;
    let mut fresh = Fresh::new(t);
    Ok(rebuild(t, &mut |node, mut kids| match node {
        Term::Agg(AggKind::Mean, v, _) => {
            let w = fresh.name();
            let count = Term::Apply(inv.clone(), vec![Term::sum(&w, Term::Const(1.0))]);
            Term::sum(v, Term::Apply(mul.clone(), vec![count, kids.remove(0)]))
        }
        Term::LMean { anchor, bound, .. } => {
            let w = fresh.name();
            let degree = Term::Apply(inv.clone(), vec![Term::sum(&w, Term::edge(anchor, &w))]);
            let gated = Term::Apply(mul.clone(), vec![Term::edge(anchor, bound), kids.remove(0)]);
            Term::sum(bound, Term::Apply(mul.clone(), vec![degree, gated]))
        }
        _ => with_children(node, kids),
    }))
}

/// Both desugarings, Min first.
pub fn desugar_all(t: &Term, reg: &Registry) -> Result<Term> {
    desugar_means(&desugar_min(t, reg)?, reg)
}
