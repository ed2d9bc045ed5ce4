use crate::asym::Asym;
use crate::connective::Connective;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeadingFit {
    pub c: f64,
    pub gamma: f64,
    /// True when every sampled value was exactly zero.
    pub zero: bool,
}

/// Evaluates `f` on inputs `c_i·n^{γ_i}` along the ladder `ns` and fits
/// `(c, γ)` by least squares on the last four points of `log f` vs `log n`.
pub fn fit_leading_order(f: &Connective, args: &[Asym], ns: &[f64]) -> Result<LeadingFit> {
    if ns.len() < 2 {
        return Err(Error::Input("need at least two ladder points".into()));
    }
    let vals: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let x: Vec<f64> = args.iter().map(|a| a.value_at(n)).collect();
            f.eval(&x)
        })
        .collect();
    if vals.iter().all(|&v| v == 0.0) {
        return Ok(LeadingFit { c: 0.0, gamma: 0.0, zero: true });
    }
    if vals.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::Eval(format!("{} is not positive along the ladder", f.name())));
    }
    let tail = ns.len().saturating_sub(4);
    let xs: Vec<f64> = ns[tail..].iter().map(|n| n.ln()).collect();
    let ys: Vec<f64> = vals[tail..].iter().map(|v| v.ln()).collect();
    let (slope, _) = crate::stats::linear_fit(&xs, &ys);
    let c = (xs.iter().zip(&ys).map(|(x, y)| y - slope * x).sum::<f64>() / xs.len() as f64).exp();
    Ok(LeadingFit { c, gamma: slope, zero: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_fit() {
        let ns: Vec<f64> = (10..=20).map(|k| 2f64.powi(k)).collect();
        let fit = fit_leading_order(&Connective::mul(2), &[Asym::pow(2.0, 1.0), Asym::pow(3.0, 0.5)], &ns).unwrap();
        assert!((fit.gamma - 1.5).abs() < 1e-9);
        assert!((fit.c - 6.0).abs() < 1e-6);
    }
}
