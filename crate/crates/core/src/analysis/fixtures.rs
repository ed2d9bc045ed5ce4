use super::LipConfig;
use crate::connective::{Connective, Poly};
use std::sync::Arc;

/// A named function with its expected class verdicts.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub connective: Arc<Connective>,
    pub expect_rellip: bool,
    pub expect_asympoly: bool,
    /// Box wide enough to reach the refuting pairs at large coordinates.
    pub config: LipConfig,
}

fn wide() -> LipConfig {
    LipConfig {
        lo: 1e-3,
        hi: 1e14,
        samples: 40_000,
        seed: 7,
        c_bound: 1e6,
        metric: Default::default(),
    }
}

fn custom(name: &str, arity: usize, f: fn(&[f64]) -> f64) -> Arc<Connective> {
    Arc::new(Connective::custom(name, arity, Arc::new(f), vec![]))
}

/// The positive and negative examples for the relative Lipschitz class.
pub fn fixtures() -> Vec<Fixture> {
    let sq_plus_x1 = Connective::domdiff(
        Poly::parse("2*x1^2 + x2^2", 2).expect("valid"),
        Poly::parse("2*x1*x2", 2).expect("valid"),
        0.1,
    )
    .expect("2x1^2 + x2^2 dominates 2x1x2 by a factor sqrt 2");
    let entries: Vec<(&'static str, Arc<Connective>, bool, bool)> = vec![
        ("(x1-x2)^2", custom("(x1-x2)^2", 2, |x| (x[0] - x[1]).powi(2)), false, false),
        ("(x1-x2)^2+x2", custom("(x1-x2)^2+x2", 2, |x| (x[0] - x[1]).powi(2) + x[1]), false, false),
        ("(x1-x2)^2+x1^2", Arc::new(sq_plus_x1), true, true),
        ("2+sin(x)", custom("2+sin(x)", 1, |x| 2.0 + x[0].sin()), false, false),
        ("ln(1+x)", Arc::new(Connective::log1p()), true, false),
        ("2+sin(ln(2+x))", Arc::new(Connective::sinlog()), true, false),
        ("sigmoid", Arc::new(Connective::sigmoid()), true, true),
    ];
    entries
        .into_iter()
        .map(|(name, connective, expect_rellip, expect_asympoly)| Fixture {
            name,
            connective,
            expect_rellip,
            expect_asympoly,
            config: wide(),
        })
        .collect()
}
