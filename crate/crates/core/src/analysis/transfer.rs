use crate::connective::{Connective, Spec};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Draws one realisation of `(ξ_1, …, ξ_m)` given the targets `φ`.
pub type Simulator = Arc<dyn Fn(&mut ChaCha8Rng, &[f64]) -> Vec<f64> + Send + Sync>;

/// Hypotheses and simulator for a concentration-transfer trial.
#[derive(Clone)]
pub struct TrialSpec {
    pub phi: Vec<f64>,
    pub k: f64,
    pub delta: f64,
    pub delta_prime: f64,
    pub trials: usize,
    pub simulator: Simulator,
}

impl TrialSpec {
    /// `ξ_i = φ_i(1 + δ′η_i)` with `η_i` uniform on `[−1, 1]`; with probability
    /// `δ` a coordinate is replaced by a log-uniform draw from `[1/K, K]`.
    /// Coordinates with `φ_i = 0` are 0 except on those bad draws.
    pub fn multiplicative(phi: Vec<f64>, k: f64, delta: f64, delta_prime: f64, trials: usize) -> TrialSpec {
        let simulator: Simulator = Arc::new(move |rng: &mut ChaCha8Rng, phi: &[f64]| {
            phi.iter()
                .map(|&p| {
                    if rng.gen_bool(delta) {
                        (rng.gen_range(-k.ln()..=k.ln())).exp()
                    } else if p == 0.0 {
                        0.0
                    } else {
                        (p * (1.0 + delta_prime * rng.gen_range(-1.0..=1.0))).clamp(1.0 / k, k)
                    }
                })
                .collect()
        });
        TrialSpec {
            phi,
            k,
            delta,
            delta_prime,
            trials,
            simulator,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub phi: f64,
    /// `φ = 0`, i.e. the specialisation on the support of the targets is zero.
    pub zero_branch: bool,
    pub p_zero: f64,
    /// `(a, ℙ(|ξ−φ| > a·δ′·φ))` over the grid.
    pub deviation: Vec<(f64, f64)>,
    /// Allowed probability: `mδ` plus three binomial standard errors.
    pub threshold: f64,
    pub a_min: Option<f64>,
    pub b_min: Option<f64>,
    pub trials: usize,
}

const A_GRID: [f64; 12] = [1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 64.0];
const B_GRID: [f64; 10] = [1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 32.0];

/// Monte-Carlo check of the transfer of concentration through `f`: estimates
/// the smallest grid `a` with `ℙ(|ξ−φ| > a·δ′·φ) ≤ mδ` and the smallest grid
/// `b` with `ξ ∈ {0} ∪ [K^{−b}, K^b]`.
pub fn check_concentration_transfer(f: &Connective, spec: &TrialSpec, seed: u64) -> Result<TransferReport> {
    let m = f.arity();
    if spec.phi.len() != m {
        return Err(Error::Input(format!("{} targets for an arity-{m} connective", spec.phi.len())));
    }
    if !(spec.k > 2.0) || !(spec.delta > 0.0) || !(spec.delta_prime > 0.0) || spec.trials < 10 {
        return Err(Error::Input("trial needs K > 2, δ > 0, δ′ > 0 and at least 10 trials".into()));
    }
    for &p in &spec.phi {
        if p != 0.0 && !(p >= 1.0 / spec.k && p <= spec.k) {
            return Err(Error::Input(format!("target {p} is neither 0 nor in [1/K, K]")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trials = spec.trials;
    let slack = |p: f64| p + 3.0 * (p * (1.0 - p).max(0.0) / trials as f64).sqrt();
    let mut bad = vec![0usize; m];
    let mut xis = Vec::with_capacity(trials);
    for _ in 0..trials {
        let xi = (spec.simulator)(&mut rng, &spec.phi);
        if xi.len() != m {
            return Err(Error::Input("simulator returned the wrong number of coordinates".into()));
        }
        for (i, (&x, &p)) in xi.iter().zip(&spec.phi).enumerate() {
            let support_ok = x == 0.0 || (x >= 1.0 / spec.k && x <= spec.k);
            if !support_ok {
                return Err(Error::Input(format!("simulated ξ_{} = {x} outside {{0}} ∪ [1/K, K]", i + 1)));
            }
            let off = if p == 0.0 { x != 0.0 } else { (x - p).abs() > spec.delta_prime * p };
            if off {
                bad[i] += 1;
            }
        }
        xis.push(f.eval(&xi));
    }
    for (i, &b) in bad.iter().enumerate() {
        if b as f64 / trials as f64 > slack(spec.delta) {
            return Err(Error::Input(format!(
                "simulator violates its hypothesis on coordinate {}: {b}/{trials} off-target draws",
                i + 1
            )));
        }
    }
    let phi = f.eval(&spec.phi);
    let support = spec
        .phi
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .fold(0u32, |acc, (i, _)| acc | 1 << i);
    let zero_branch = support != 0 && f.spec(support) == Spec::Zero;
    let threshold = slack((m as f64 * spec.delta).min(1.0));
    let p_zero = xis.iter().filter(|&&x| x == 0.0).count() as f64 / trials as f64;
    let deviation: Vec<(f64, f64)> = A_GRID
        .iter()
        .map(|&a| {
            let off = xis.iter().filter(|&&x| (x - phi).abs() > a * spec.delta_prime * phi).count();
            (a, off as f64 / trials as f64)
        })
        .collect();
    let a_min = if phi == 0.0 {
        None
    } else {
        deviation.iter().find(|(_, pr)| *pr <= threshold).map(|(a, _)| *a)
    };
    let b_min = B_GRID
        .iter()
        .copied()
        .find(|&b| {
            let (lo, hi) = (spec.k.powf(-b), spec.k.powf(b));
            let inside = |x: f64| x == 0.0 || (x >= lo && x <= hi);
            xis.iter().all(|&x| inside(x)) && inside(phi)
        });
    Ok(TransferReport {
        phi,
        zero_branch,
        p_zero,
        deviation,
        threshold,
        a_min,
        b_min,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_needs_nothing_extra() {
        let f = Connective::scale(1.0).unwrap();
        let r = check_concentration_transfer(&f, &TrialSpec::multiplicative(vec![2.0], 10.0, 0.05, 0.1, 20_000), 1).unwrap();
        assert_eq!(r.a_min, Some(1.0));
        assert_eq!(r.b_min, Some(1.0));
    }

    #[test]
    fn product_within_three() {
        let f = Connective::mul(2);
        let r = check_concentration_transfer(&f, &TrialSpec::multiplicative(vec![2.0, 3.0], 10.0, 0.02, 0.2, 20_000), 2)
            .unwrap();
        assert!(r.a_min.unwrap() <= 3.0, "{r:?}");
    }

    #[test]
    fn zero_specialisation_gives_zero() {
        let f = Connective::mul(2);
        let r = check_concentration_transfer(&f, &TrialSpec::multiplicative(vec![2.0, 0.0], 10.0, 0.02, 0.2, 20_000), 3)
            .unwrap();
        assert!(r.zero_branch);
        assert_eq!(r.phi, 0.0);
        assert!(r.p_zero >= 1.0 - 2.0 * 0.02 - 0.01);
    }

    #[test]
    fn rejects_bad_hypotheses() {
        let f = Connective::scale(1.0).unwrap();
        assert!(check_concentration_transfer(&f, &TrialSpec::multiplicative(vec![0.01], 10.0, 0.05, 0.1, 100), 1).is_err());
        let liar: Simulator = Arc::new(|_: &mut ChaCha8Rng, _: &[f64]| vec![5.0]);
        let spec = TrialSpec { simulator: liar, ..TrialSpec::multiplicative(vec![2.0], 10.0, 0.05, 0.1, 100) };
        assert!(check_concentration_transfer(&f, &spec, 1).is_err());
    }
}
