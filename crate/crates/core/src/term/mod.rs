//! Terms of the aggregate logic: AST, printer, metrics and desugarings.

mod desugar;
pub mod gen;
mod parse;

pub use desugar::{desugar_all, desugar_means, desugar_min};
pub use parse::{parse, parse_with};

use crate::connective::Connective;
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AggKind {
    Sum,
    Max,
    Min,
    Mean,
}

impl AggKind {
    pub fn keyword(self) -> &'static str {
        match self {
            AggKind::Sum => "sum",
            AggKind::Max => "max",
            AggKind::Min => "min",
            AggKind::Mean => "mean",
        }
    }
}

#[derive(Clone, Debug)]
pub enum Term {
    Const(f64),
    Edge(String, String),
    Eq(String, String),
    Apply(Arc<Connective>, Vec<Term>),
    Agg(AggKind, String, Box<Term>),
    /// Average of `body` over the neighbours `bound` of `anchor`.
    LMean {
        anchor: String,
        bound: String,
        body: Box<Term>,
    },
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        use Term::*;
        match (self, other) {
            (Const(a), Const(b)) => a == b,
            (Edge(a, b), Edge(c, d)) | (Eq(a, b), Eq(c, d)) => a == c && b == d,
            (Apply(f, xs), Apply(g, ys)) => f.as_ref() == g.as_ref() && xs == ys,
            (Agg(k1, v1, b1), Agg(k2, v2, b2)) => k1 == k2 && v1 == v2 && b1 == b2,
            (
                LMean { anchor: a1, bound: v1, body: b1 },
                LMean { anchor: a2, bound: v2, body: b2 },
            ) => a1 == a2 && v1 == v2 && b1 == b2,
            _ => false,
        }
    }
}

/// Free variables, binder depth and variable count of a term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermMetrics {
    pub free_vars: Vec<String>,
    pub depth: usize,
    pub width: usize,
}

impl Term {
    pub fn constant(c: f64) -> Term {
        Term::Const(c)
    }

    pub fn edge(x: &str, y: &str) -> Term {
        Term::Edge(x.into(), y.into())
    }

    pub fn eq(x: &str, y: &str) -> Term {
        Term::Eq(x.into(), y.into())
    }

    pub fn apply(c: Arc<Connective>, args: Vec<Term>) -> Term {
        Term::Apply(c, args)
    }

    pub fn agg(kind: AggKind, v: &str, body: Term) -> Term {
        Term::Agg(kind, v.into(), Box::new(body))
    }

    pub fn sum(v: &str, body: Term) -> Term {
        Term::agg(AggKind::Sum, v, body)
    }

    pub fn max(v: &str, body: Term) -> Term {
        Term::agg(AggKind::Max, v, body)
    }

    pub fn min(v: &str, body: Term) -> Term {
        Term::agg(AggKind::Min, v, body)
    }

    pub fn mean(v: &str, body: Term) -> Term {
        Term::agg(AggKind::Mean, v, body)
    }

    pub fn lmean(anchor: &str, v: &str, body: Term) -> Term {
        Term::LMean {
            anchor: anchor.into(),
            bound: v.into(),
            body: Box::new(body),
        }
    }

    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Const(_) | Term::Edge(..) | Term::Eq(..) => vec![],
            Term::Apply(_, args) => args.iter().collect(),
            Term::Agg(_, _, b) | Term::LMean { body: b, .. } => vec![b.as_ref()],
        }
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        let mut note = |v: &String, bound: &Vec<String>| {
            if !bound.contains(v) && !out.contains(v) {
                out.push(v.clone());
            }
        };
        match self {
            Term::Const(_) => {}
            Term::Edge(x, y) | Term::Eq(x, y) => {
                note(x, bound);
                note(y, bound);
            }
            Term::Apply(_, args) => {
                for a in args {
                    a.collect_free(bound, out);
                }
            }
            Term::Agg(_, v, b) => {
                bound.push(v.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            Term::LMean { anchor, bound: v, body } => {
                note(anchor, bound);
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name occurring in the term, free or bound.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| match t {
            Term::Edge(x, y) | Term::Eq(x, y) => {
                out.insert(x.clone());
                out.insert(y.clone());
            }
            Term::Agg(_, v, _) => {
                out.insert(v.clone());
            }
            Term::LMean { anchor, bound, .. } => {
                out.insert(anchor.clone());
                out.insert(bound.clone());
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut dyn FnMut(&'a Term)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Maximum nesting of aggregation binders.
    pub fn depth(&self) -> usize {
        match self {
            Term::Const(_) | Term::Edge(..) | Term::Eq(..) => 0,
            Term::Apply(_, args) => args.iter().map(Term::depth).max().unwrap_or(0),
            Term::Agg(_, _, b) | Term::LMean { body: b, .. } => 1 + b.depth(),
        }
    }

    pub fn metrics(&self) -> TermMetrics {
        TermMetrics {
            free_vars: self.free_vars(),
            depth: self.depth(),
            width: self.all_vars().len(),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn contains_min(&self) -> bool {
        let mut found = false;
        self.visit(&mut |t| found |= matches!(t, Term::Agg(AggKind::Min, ..)));
        found
    }

    pub fn contains_means(&self) -> bool {
        let mut found = false;
        self.visit(&mut |t| found |= matches!(t, Term::Agg(AggKind::Mean, ..) | Term::LMean { .. }));
        found
    }
}

/// Metrics of a term (free function form).
pub fn metrics(t: &Term) -> TermMetrics {
    t.metrics()
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => write!(f, "{c}"),
            Term::Edge(x, y) => write!(f, "E({x},{y})"),
            Term::Eq(x, y) => write!(f, "eq({x},{y})"),
            Term::Apply(c, args) => {
                write!(f, "{}(", c.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            Term::Agg(k, v, b) => write!(f, "{} {v} . {b}", k.keyword()),
            Term::LMean { anchor, bound, body } => write!(f, "lmean {anchor}~{bound} . {body}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_examples() {
        let m = parse("E(u,v)").unwrap().metrics();
        assert_eq!((m.free_vars, m.depth, m.width), (vec!["u".to_string(), "v".to_string()], 0, 2));
        let m = parse("sum v . E(u,v)").unwrap().metrics();
        assert_eq!((m.free_vars, m.depth, m.width), (vec!["u".to_string()], 1, 2));
        let m = parse("sum u . sum v . sum w . mul(E(u,v),E(v,w),E(u,w))").unwrap().metrics();
        assert_eq!((m.free_vars.len(), m.depth, m.width), (0, 3, 3));
    }

    #[test]
    fn application_adds_no_depth() {
        let t = parse("mul(sum v . E(u,v), max w . sum x . E(w,x))").unwrap();
        assert_eq!(t.depth(), 2);
        assert_eq!(t.metrics().width, 4);
    }
}
