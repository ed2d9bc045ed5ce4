//! Random well-scoped terms for property tests and oracle comparisons.

use super::{AggKind, Term};
use crate::connective::{Connective, Registry};
use rand::seq::SliceRandom;
use rand::Rng;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub free_vars: Vec<String>,
    pub max_depth: usize,
    /// Bound on AST nodes per generated term (soft).
    pub max_size: usize,
    pub kinds: Vec<AggKind>,
    pub lmean: bool,
    /// Connective calls as `(name, params, arity)`.
    pub connectives: Vec<(String, Option<String>, usize)>,
    pub constants: Vec<f64>,
}

impl Default for GenConfig {
    fn default() -> Self {
        let c = |n: &str, p: Option<&str>, a| (n.to_string(), p.map(str::to_string), a);
        GenConfig {
            free_vars: vec![],
            max_depth: 3,
            max_size: 24,
            kinds: vec![AggKind::Sum, AggKind::Max, AggKind::Min, AggKind::Mean],
            lmean: true,
            connectives: vec![
                c("mul", None, 2),
                c("add", None, 2),
                c("vmax", None, 2),
                c("vmin", None, 2),
                c("mul", None, 3),
                c("inv", None, 1),
                c("indz", None, 1),
                c("sigmoid", None, 1),
                c("log1p", None, 1),
                c("scale", Some("0.5"), 1),
                c("pow", Some("2"), 1),
                c("mono", Some("1,-1"), 2),
                c("poly", Some("x1*x2 + 2*x1 + 1"), 2),
            ],
            constants: vec![0.0, 0.5, 1.0, 2.0, 3.25],
        }
    }
}

impl GenConfig {
    /// Restricts the generator to the given connective names.
    pub fn with_connectives(mut self, names: &[(&str, Option<&str>, usize)]) -> GenConfig {
        self.connectives = names
            .iter()
            .map(|(n, p, a)| (n.to_string(), p.map(str::to_string), *a))
            .collect();
        self
    }
}

const BOUND_NAMES: [&str; 8] = ["a", "b", "c", "d", "w", "x", "y", "z"];

struct Gen<'a, R: Rng> {
    rng: &'a mut R,
    cfg: &'a GenConfig,
    resolved: Vec<Arc<Connective>>,
    budget: usize,
}

impl<R: Rng> Gen<'_, R> {
    fn leaf(&mut self, scope: &[String]) -> Term {
        let r = self.rng.gen_range(0..10);
        if scope.is_empty() || r < 3 {
            return Term::Const(*self.cfg.constants.choose(self.rng).expect("nonempty constants"));
        }
        let x = scope.choose(self.rng).unwrap().clone();
        let y = scope.choose(self.rng).unwrap().clone();
        if r < 8 {
            Term::Edge(x, y)
        } else {
            Term::Eq(x, y)
        }
    }

    fn fresh_bound(&mut self, scope: &[String]) -> Option<String> {
        let free: Vec<&str> = BOUND_NAMES
            .iter()
            .copied()
            .filter(|n| !scope.iter().any(|s| s == n) && !self.cfg.free_vars.iter().any(|s| s == n))
            .collect();
        free.choose(self.rng).map(|s| s.to_string())
    }

    fn term(&mut self, scope: &mut Vec<String>, depth_left: usize) -> Term {
        if self.budget == 0 {
            return self.leaf(scope);
        }
        self.budget -= 1;
        let r = self.rng.gen_range(0..10);
        if depth_left > 0 && (r < 5 || scope.is_empty()) {
            if let Some(v) = self.fresh_bound(scope) {
                let use_lmean = self.cfg.lmean && !scope.is_empty() && self.rng.gen_bool(0.2);
                scope.push(v.clone());
                let body = self.term(scope, depth_left - 1);
                scope.pop();
                if use_lmean {
                    let anchor = scope.choose(self.rng).unwrap().clone();
                    return Term::LMean {
                        anchor,
                        bound: v,
                        body: Box::new(body),
                    };
                }
                let kind = *self.cfg.kinds.choose(self.rng).expect("nonempty kinds");
                return Term::Agg(kind, v, Box::new(body));
            }
        }
        if r < 8 && !self.resolved.is_empty() {
            let c = self.resolved.choose(self.rng).unwrap().clone();
            let args = (0..c.arity()).map(|_| self.term(scope, depth_left)).collect();
            return Term::Apply(c, args);
        }
        self.leaf(scope)
    }
}

/// A random term whose free variables are among `cfg.free_vars` and whose
/// binder depth is at most `cfg.max_depth`.
pub fn random_term<R: Rng>(rng: &mut R, cfg: &GenConfig, reg: &Registry) -> Term {
    let resolved = cfg
        .connectives
        .iter()
        .map(|(n, p, a)| reg.resolve(n, p.as_deref(), *a).expect("generator connective resolves"))
        .collect();
    let mut g = Gen {
        rng,
        cfg,
        resolved,
        budget: cfg.max_size,
    };
    let mut scope = cfg.free_vars.clone();
    g.term(&mut scope, cfg.max_depth)
}
