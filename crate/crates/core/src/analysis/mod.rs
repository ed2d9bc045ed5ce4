//! Sampled checks for the connective classes: relative Lipschitz, power
//! bounds, concentration transfer, and the leading-order calculus.

mod combine;
mod fit;
mod fixtures;
mod transfer;

pub use combine::{combine, predicted_constant, Combination};
pub use fit::{fit_leading_order, LeadingFit};
pub use fixtures::{fixtures, Fixture};
pub use transfer::{check_concentration_transfer, TransferReport, TrialSpec};

use crate::connective::{Connective, Spec};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Relative tolerance on ratio comparisons.
pub const RATIO_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Distance used on the input side of the relative Lipschitz inequality.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `sqrt(Σ_i ((x_i−y_i)/(x_i+y_i))²)`. Scale-free per coordinate, so
    /// projections, monomials and compositions behave as the closure rules
    /// require.
    #[default]
    Coordinatewise,
    /// `‖x−y‖ / ‖x+y‖` with Euclidean norms. Agrees with the coordinatewise
    /// form in one variable; in several variables it refutes even `x1` on
    /// boxes where the coordinates have very different scales.
    Euclidean,
}

impl Metric {
    pub fn distance(self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            Metric::Coordinatewise => norm(x.iter().zip(y).map(|(a, b)| (a - b) / (a + b))),
            Metric::Euclidean => {
                norm(x.iter().zip(y).map(|(a, b)| a - b)) / norm(x.iter().zip(y).map(|(a, b)| a + b))
            }
        }
    }
}

/// Sampling box and budget for [`check_relative_lipschitz`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LipConfig {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
    pub seed: u64,
    pub c_bound: f64,
    #[serde(default)]
    pub metric: Metric,
}

impl Default for LipConfig {
    fn default() -> Self {
        LipConfig {
            lo: 1e-3,
            hi: 1e3,
            samples: 20_000,
            seed: 0,
            c_bound: 1e6,
            metric: Metric::Coordinatewise,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipWitness {
    /// Support of the specialisation the pair lives on.
    pub mask: u32,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `|f(x)−f(y)| / (f(x)+f(y))`.
    pub lhs: f64,
    /// Input distance under the configured [`Metric`].
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipReport {
    pub connective: String,
    pub verdict: Verdict,
    /// Largest observed `lhs / rhs`.
    pub estimated_c: f64,
    /// The pair attaining `estimated_c`; on failure it exceeds `c_bound`.
    pub witness: Option<LipWitness>,
    pub samples: usize,
    #[serde(rename = "box")]
    pub bounds: Vec<(f64, f64)>,
    pub c_bound: f64,
}

impl LipReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

const CHUNK: usize = 512;

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..=hi.ln())).exp().clamp(lo, hi)
}

/// One sampled pair on `d` coordinates. The families are: independent
/// points, multiplicative near-diagonal steps `x(1 ± 1/k)`, single-coordinate
/// steps along rays, the pairs `t·1 + σ`, `t·1 − σ√t` with `σ ∈ {±1}^d`, and
/// additive offsets `t·1 ± d` at large `t`.
fn sample_pair(rng: &mut ChaCha8Rng, d: usize, lo: f64, hi: f64, family: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    let mut x = vec![0.0; d];
    let mut y = vec![0.0; d];
    match family {
        0 => {
            for i in 0..d {
                x[i] = log_uniform(rng, lo, hi);
                y[i] = log_uniform(rng, lo, hi);
            }
        }
        1 => {
            let k = log_uniform(rng, 2.0, 1e6);
            for i in 0..d {
                x[i] = log_uniform(rng, lo, hi);
                let s = [-1.0, 0.0, 1.0][rng.gen_range(0..3)];
                y[i] = x[i] * (1.0 + s / k);
            }
        }
        2 => {
            let t = log_uniform(rng, lo, hi);
            let k = log_uniform(rng, 2.0, 1e6);
            for xi in x.iter_mut() {
                *xi = t * rng.gen_range(0.05..=1.0);
            }
            y.copy_from_slice(&x);
            let j = rng.gen_range(0..d);
            y[j] *= if rng.gen_bool(0.5) { 1.0 + 1.0 / k } else { 1.0 - 1.0 / k };
        }
        3 => {
            let t = log_uniform(rng, lo.max(4.0), hi);
            let r = t.sqrt();
            for i in 0..d {
                let s = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                x[i] = t + s;
                y[i] = t - s * r;
            }
        }
        _ => {
            let t = log_uniform(rng, lo.max(4.0), hi);
            for i in 0..d {
                let off = rng.gen_range(-2.0..=2.0);
                x[i] = t + off;
                y[i] = t - off;
            }
        }
    }
    let inside = |v: &[f64]| v.iter().all(|&a| a > 0.0 && a >= lo * (1.0 - 1e-12) && a <= hi * (1.0 + 1e-12));
    if inside(&x) && inside(&y) && x != y {
        Some((x, y))
    } else {
        None
    }
}

fn norm(v: impl Iterator<Item = f64>) -> f64 {
    v.map(|a| a * a).sum::<f64>().sqrt()
}

/// Both sides of the relative Lipschitz inequality at a pair, and their quotient.
pub fn lipschitz_quotient(metric: Metric, fx: f64, fy: f64, x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let lhs = if fx + fy > 0.0 { (fx - fy).abs() / (fx + fy) } else { 0.0 };
    let rhs = metric.distance(x, y);
    let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    (lhs, rhs, ratio)
}

/// Sampled check of `|f(x)−f(y)|/(f(x)+f(y)) ≤ C·d(x, y)` on every positive
/// specialisation, over the box `[lo, hi]^|I|`, with `d` from the config.
pub fn check_relative_lipschitz(f: &Connective, cfg: &LipConfig) -> Result<LipReport> {
    check_relative_lipschitz_fn(f.name(), f.arity(), &|mask, y| f.eval_on_support(mask, y), &|mask| f.spec(mask), cfg)
}

/// The check restricted to strictly positive inputs (the full support).
/// Connectives of equal arity checked with the same config see the same pairs.
pub fn check_relative_lipschitz_positive(f: &Connective, cfg: &LipConfig) -> Result<LipReport> {
    let full = (1u32 << f.arity()) - 1;
    check_relative_lipschitz_fn(
        f.name(),
        f.arity(),
        &|mask, y| f.eval_on_support(mask, y),
        &|mask| if mask == full { Spec::Positive } else { Spec::Zero },
        cfg,
    )
}

/// As [`check_relative_lipschitz`] for an arbitrary evaluator on supports.
pub fn check_relative_lipschitz_fn(
    name: &str,
    arity: usize,
    eval: &(dyn Fn(u32, &[f64]) -> f64 + Sync),
    spec: &(dyn Fn(u32) -> Spec + Sync),
    cfg: &LipConfig,
) -> Result<LipReport> {
    if !(cfg.lo > 0.0 && cfg.hi > cfg.lo) {
        return Err(Error::Input(format!("box ({}, {}) must satisfy 0 < lo < hi", cfg.lo, cfg.hi)));
    }
    let masks: Vec<u32> = (1u32..(1u32 << arity)).filter(|&m| spec(m) == Spec::Positive).collect();
    let per_mask = (cfg.samples / masks.len().max(1)).max(1);
    let chunks = per_mask.div_ceil(CHUNK);
    let jobs: Vec<(u32, usize)> = masks
        .iter()
        .flat_map(|&m| (0..chunks).map(move |c| (m, c)))
        .collect();
    let results: Vec<Result<Option<LipWitness>>> = jobs
        .par_iter()
        .map(|&(mask, chunk)| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(((mask as u64) << 32) | chunk as u64);
            let d = mask.count_ones() as usize;
            let count = CHUNK.min(per_mask - chunk * CHUNK);
            let mut best: Option<LipWitness> = None;
            let mut drawn = 0;
            let mut attempts = 0;
            while drawn < count && attempts < count * 20 {
                attempts += 1;
                let Some((x, y)) = sample_pair(&mut rng, d, cfg.lo, cfg.hi, drawn % 5) else {
                    continue;
                };
                drawn += 1;
                let (fx, fy) = (eval(mask, &x), eval(mask, &y));
                for (v, p) in [(fx, &x), (fy, &y)] {
                    if !v.is_finite() || v < 0.0 {
                        return Err(Error::Eval(format!("{name} returned {v} at {p:?}")));
                    }
                }
                let (lhs, rhs, ratio) = lipschitz_quotient(cfg.metric, fx, fy, &x, &y);
                if best.as_ref().map_or(true, |b| ratio > b.ratio) {
                    best = Some(LipWitness { mask, x, y, lhs, rhs, ratio });
                }
            }
            Ok(best)
        })
        .collect();
    let mut best: Option<LipWitness> = None;
    for r in results {
        if let Some(w) = r? {
            if best.as_ref().map_or(true, |b| w.ratio > b.ratio) {
                best = Some(w);
            }
        }
    }
    let estimated_c = best.as_ref().map_or(0.0, |w| w.ratio);
    let verdict = if estimated_c > cfg.c_bound * (1.0 + RATIO_TOL) {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    Ok(LipReport {
        connective: name.to_string(),
        verdict,
        estimated_c,
        witness: best,
        samples: per_mask * masks.len(),
        bounds: vec![(cfg.lo, cfg.hi); arity],
        c_bound: cfg.c_bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerBoundReport {
    pub verdict: Verdict,
    /// Smallest sampled `C + Σ x_i^k + x_i^{−k} − f(x)`.
    pub min_slack: f64,
    pub witness: Vec<f64>,
    pub samples: usize,
    pub k: f64,
    pub c: f64,
}

/// Samples `f(x) < C + Σ_i (x_i^k + x_i^{−k})` over positive points of the
/// box, including geometric ladders toward both ends of every coordinate.
pub fn check_power_bound(f: &Connective, k: f64, c: f64, lo: f64, hi: f64, samples: usize, seed: u64) -> PowerBoundReport {
    let m = f.arity();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = (f64::INFINITY, Vec::new());
    let mut consider = |x: Vec<f64>| {
        let bound = c + x.iter().map(|&a| a.powf(k) + a.powf(-k)).sum::<f64>();
        let v = f.eval(&x);
        let slack = if v.is_finite() { bound - v } else { f64::NEG_INFINITY };
        if slack < worst.0 || worst.1.is_empty() {
            worst = (slack, x);
        }
    };
    let mut count = 0;
    let steps = 40;
    for j in 0..=steps {
        let t = lo * (hi / lo).powf(j as f64 / steps as f64);
        for i in 0..m {
            let mut x = vec![1.0; m];
            x[i] = t;
            consider(x);
            count += 1;
        }
        consider(vec![t; m]);
        count += 1;
    }
    while count < samples {
        let x: Vec<f64> = (0..m).map(|_| log_uniform(&mut rng, lo, hi)).collect();
        consider(x);
        count += 1;
    }
    PowerBoundReport {
        verdict: if worst.0 > 0.0 { Verdict::Pass } else { Verdict::Fail },
        min_slack: worst.0,
        witness: worst.1,
        samples: count,
        k,
        c,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn cfg(hi: f64) -> LipConfig {
        LipConfig {
            hi,
            samples: 20_000,
            ..LipConfig::default()
        }
    }

    #[test]
    fn identity_has_constant_one() {
        let f = Connective::scale(1.0).unwrap();
        let r = check_relative_lipschitz(&f, &cfg(1e3)).unwrap();
        assert!(r.passed());
        assert!((r.estimated_c - 1.0).abs() < 1e-9, "{}", r.estimated_c);
    }

    #[test]
    fn squared_difference_refuted() {
        let f = Connective::custom("sqdiff", 2, Arc::new(|x: &[f64]| (x[0] - x[1]).powi(2)), vec![]);
        let r = check_relative_lipschitz(&f, &cfg(1e14)).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let w = r.witness.unwrap();
        let (fx, fy) = (f.eval_on_support(w.mask, &w.x), f.eval_on_support(w.mask, &w.y));
        assert!(lipschitz_quotient(Metric::Coordinatewise, fx, fy, &w.x, &w.y).2 > 1e6);
    }

    #[test]
    fn euclidean_form_refutes_products_on_wide_boxes() {
        let c = LipConfig { metric: Metric::Euclidean, ..cfg(1e6) };
        assert_eq!(check_relative_lipschitz(&Connective::mul(2), &c).unwrap().verdict, Verdict::Fail);
        let one_d = check_relative_lipschitz(&Connective::inv(), &c).unwrap();
        assert!(one_d.passed());
    }

    #[test]
    fn non_finite_output_is_an_error() {
        let f = Connective::custom("blowup", 1, Arc::new(|x: &[f64]| 1.0 / (x[0] - x[0])), vec![]);
        assert!(matches!(check_relative_lipschitz(&f, &cfg(1e3)), Err(Error::Eval(_))));
    }

    #[test]
    fn builtin_estimates_stable_across_seeds() {
        for f in [Connective::mul(2), Connective::vmax(2), Connective::sigmoid(), Connective::inv()] {
            let a = check_relative_lipschitz(&f, &LipConfig { seed: 1, ..cfg(1e6) }).unwrap();
            let b = check_relative_lipschitz(&f, &LipConfig { seed: 2, ..cfg(1e6) }).unwrap();
            assert!(a.passed() && b.passed(), "{} {:?}", f.name(), a.witness);
            let gap = (a.estimated_c - b.estimated_c).abs() / a.estimated_c.max(b.estimated_c);
            assert!(gap < 0.25, "{}: {} vs {}", f.name(), a.estimated_c, b.estimated_c);
        }
    }

    #[test]
    fn power_bounds() {
        let prod = Connective::mul(2);
        assert_eq!(check_power_bound(&prod, 3.0, 3.0, 1e-3, 1e3, 5000, 1).verdict, Verdict::Pass);
        assert_eq!(check_power_bound(&Connective::sigmoid(), 1.0, 2.0, 1e-3, 1e3, 5000, 1).verdict, Verdict::Pass);
        let exp = Connective::custom("exp", 1, Arc::new(|x: &[f64]| x[0].exp()), vec![]);
        assert_eq!(check_power_bound(&exp, 5.0, 3.0, 1e-3, 1e3, 5000, 1).verdict, Verdict::Fail);
    }
}
