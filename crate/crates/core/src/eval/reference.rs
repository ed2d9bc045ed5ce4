//! Naive oracle: direct recursion over the AST with a name-keyed environment,
//! plain summation and vertices visited in descending order.

use super::Environment;
use crate::error::{Error, Result};
use crate::term::{AggKind, Term};
use std::collections::HashMap;

/// `⟦τ⟧` computed without compilation, pruning or caching.
pub fn eval_reference(t: &Term, env: &Environment) -> Result<f64> {
    let g = env.graph;
    if g.n() == 0 {
        return Err(Error::Input("terms are evaluated on graphs with at least one vertex".into()));
    }
    let free = t.free_vars();
    if free.len() != env.assignment.len() {
        return Err(Error::Input(format!(
            "term has {} free variables but {} values were assigned",
            free.len(),
            env.assignment.len()
        )));
    }
    let mut names = HashMap::new();
    for (v, &x) in free.iter().zip(&env.assignment) {
        if x >= g.n() {
            return Err(Error::Input(format!("assigned vertex {x} is out of range")));
        }
        names.insert(v.clone(), x);
    }
    walk(t, env, &mut names)
}

fn lookup(names: &HashMap<String, usize>, v: &str) -> Result<usize> {
    names
        .get(v)
        .copied()
        .ok_or_else(|| Error::Input(format!("unbound variable {v:?}")))
}

fn walk(t: &Term, env: &Environment, names: &mut HashMap<String, usize>) -> Result<f64> {
    let g = env.graph;
    let n = g.n();
    Ok(match t {
        Term::Const(c) => *c,
        Term::Edge(x, y) => {
            let (a, b) = (lookup(names, x)?, lookup(names, y)?);
            if a != b && g.neighbors(a).iter().any(|&w| w as usize == b) {
                1.0
            } else {
                0.0
            }
        }
        Term::Eq(x, y) => {
            if lookup(names, x)? == lookup(names, y)? {
                1.0
            } else {
                0.0
            }
        }
        Term::Apply(c, args) => {
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                vals.push(walk(a, env, names)?);
            }
            c.eval(&vals)
        }
        Term::Agg(kind, v, body) => {
            let mut values = Vec::with_capacity(n);
            for x in (0..n).rev() {
                names.insert(v.clone(), x);
                values.push(walk(body, env, names)?);
            }
            names.remove(v);
            match kind {
                AggKind::Sum => values.iter().sum(),
                AggKind::Mean => values.iter().sum::<f64>() / n as f64,
                AggKind::Max => values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                AggKind::Min => values.iter().cloned().fold(f64::INFINITY, f64::min),
            }
        }
        Term::LMean { anchor, bound, body } => {
            let a = lookup(names, anchor)?;
            let mut total = 0.0;
            let mut count = 0usize;
            for x in (0..n).rev() {
                if x != a && g.has_edge(a, x) {
                    names.insert(bound.clone(), x);
                    total += walk(body, env, names)?;
                    count += 1;
                }
            }
            names.remove(bound);
            if count == 0 {
                0.0
            } else {
                total / count as f64
            }
        }
    })
}
