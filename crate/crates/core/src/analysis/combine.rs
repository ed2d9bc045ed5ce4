use crate::connective::Connective;
use std::sync::Arc;

/// The closure operations of the relative Lipschitz class.
#[derive(Clone, Debug, PartialEq)]
pub enum Combination {
    Sum,
    Product,
    Power(f64),
    Max,
    Min,
    /// `outer(inner_1, …, inner_k)`.
    Compose,
}

/// Builds the combination as a user connective on positive inputs. For
/// `Compose`, `parts[0]` is the outer function and the rest are the inner
/// ones; otherwise `parts` holds one (power) or two operands of equal arity.
pub fn combine(op: &Combination, parts: &[Arc<Connective>]) -> Connective {
    let m = match op {
        Combination::Compose => parts[1].arity(),
        _ => parts[0].arity(),
    };
    let non_full: Vec<u32> = (1u32..(1 << m) - 1).collect();
    let p: Vec<Arc<Connective>> = parts.to_vec();
    let (name, f): (String, crate::connective::PointFn) = match op {
        Combination::Sum => (
            format!("({} + {})", p[0].name(), p[1].name()),
            Arc::new(move |x: &[f64]| p[0].eval(x) + p[1].eval(x)),
        ),
        Combination::Product => (
            format!("({} * {})", p[0].name(), p[1].name()),
            Arc::new(move |x: &[f64]| p[0].eval(x) * p[1].eval(x)),
        ),
        Combination::Power(b) => {
            let b = *b;
            (
                format!("({})^{b}", p[0].name()),
                Arc::new(move |x: &[f64]| p[0].eval(x).powf(b)),
            )
        }
        Combination::Max => (
            format!("max({}, {})", p[0].name(), p[1].name()),
            Arc::new(move |x: &[f64]| p[0].eval(x).max(p[1].eval(x))),
        ),
        Combination::Min => (
            format!("min({}, {})", p[0].name(), p[1].name()),
            Arc::new(move |x: &[f64]| p[0].eval(x).min(p[1].eval(x))),
        ),
        Combination::Compose => {
            let inner: Vec<&str> = p[1..].iter().map(|c| c.name()).collect();
            (
                format!("{}({})", p[0].name(), inner.join(", ")),
                Arc::new(move |x: &[f64]| {
                    let ys: Vec<f64> = p[1..].iter().map(|g| g.eval(x)).collect();
                    p[0].eval(&ys)
                }),
            )
        }
    };
    Connective::custom(&name, m, f, non_full)
}

/// The constant the closure argument gives for the combination, from the
/// constants of its parts (outer first for `Compose`).
pub fn predicted_constant(op: &Combination, c: &[f64]) -> f64 {
    match op {
        Combination::Sum => c[0].max(c[1]),
        Combination::Product => (2.0 * c[1] + c[0]).max(2.0 * c[0] + c[1]),
        Combination::Power(b) => {
            if *b == 0.0 {
                0.0
            } else {
                2.0 * c[0]
            }
        }
        Combination::Max | Combination::Min => 2.0 * (c[0] + c[1]),
        Combination::Compose => c[0] * c[1..].iter().sum::<f64>(),
    }
}
