//! Seeded Erdős–Rényi samplers for the constant-`p` and `p = n^{-α}` regimes.
//!
//! Every replicate draws from its own ChaCha8 stream of the seed, so
//! replicate `r` of `(n, regime, seed)` is the same graph whichever thread
//! produces it and in whatever order.

use crate::error::{input, Result};
use crate::graph::{Graph, GraphBuilder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regime {
    Dense { p: f64 },
    Sparse { alpha: f64 },
}

impl Regime {
    pub fn dense(p: f64) -> Result<Regime> {
        if !(p > 0.0 && p < 1.0) {
            return input(format!("dense edge probability must lie in (0,1), got {p}"));
        }
        Ok(Regime::Dense { p })
    }

    pub fn sparse(alpha: f64) -> Result<Regime> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return input(format!("sparse exponent must lie in (0,1), got {alpha}"));
        }
        Ok(Regime::Sparse { alpha })
    }

    pub fn edge_probability(&self, n: usize) -> f64 {
        edge_probability(*self, n)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Dense { p } => write!(f, "dense:p={p}"),
            Regime::Sparse { alpha } => write!(f, "sparse:alpha={alpha}"),
        }
    }
}

impl FromStr for Regime {
    type Err = crate::error::Error;

    /// Accepts `dense:p=<x>` and `sparse:alpha=<x>`.
    fn from_str(s: &str) -> Result<Regime> {
        let bad = || crate::error::Error::Input(format!("regime {s:?} is not dense:p=<x> or sparse:alpha=<x>"));
        let (kind, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        let (key, value) = rest.split_once('=').ok_or_else(bad)?;
        let x: f64 = value.trim().parse().map_err(|_| bad())?;
        match (kind.trim(), key.trim()) {
            ("dense", "p") => Regime::dense(x),
            ("sparse", "alpha") => Regime::sparse(x),
            _ => Err(bad()),
        }
    }
}

/// `p` for dense regimes, `n^{-α}` for sparse ones.
pub fn edge_probability(regime: Regime, n: usize) -> f64 {
    match regime {
        Regime::Dense { p } => p,
        Regime::Sparse { alpha } => (n.max(1) as f64).powf(-alpha),
    }
}

/// The generator for replicate `replicate` of `seed`.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// `G(n, p(n))` from replicate stream 0 of `seed`.
pub fn sample(n: usize, regime: Regime, seed: u64) -> Graph {
    sample_replicate(n, regime, seed, 0)
}

pub fn sample_replicate(n: usize, regime: Regime, seed: u64, replicate: u64) -> Graph {
    let mut rng = replicate_rng(seed, replicate);
    sample_gnp(n, edge_probability(regime, n), &mut rng)
}

/// Includes each pair `u < v` independently with probability `p`. Small `p`
/// uses geometric skips over the lexicographic pair order.
pub fn sample_gnp<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut b = GraphBuilder::new(n);
    if n < 2 || p <= 0.0 {
        return b.build();
    }
    if p >= 1.0 {
        return Graph::complete(n);
    }
    if p > 0.25 {
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<f64>() < p {
                    b.push_unchecked(u, v);
                }
            }
        }
        return b.build();
    }
    let log_q = (-p).ln_1p();
    let (mut u, mut v) = (0usize, 0usize);
    loop {
        let r: f64 = 1.0 - rng.gen::<f64>();
        let skip = (r.ln() / log_q).floor();
        if !skip.is_finite() || skip >= (n * n) as f64 {
            break;
        }
        v += skip as usize + 1;
        while u < n && v >= n {
            u += 1;
            v = v - n + u + 1;
        }
        if u >= n - 1 {
            break;
        }
        b.push_unchecked(u, v);
    }
    b.build()
}
