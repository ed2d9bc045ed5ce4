//! Shared inputs for the benchmarks.

use aggconc::random::{sample, Regime};
use aggconc::Graph;

pub const TRIANGLE: &str = "sum u . sum v . sum w . mul(E(u,v), E(v,w), E(u,w))";

pub fn sparse_graph(n: usize, alpha: f64, seed: u64) -> Graph {
    sample(n, Regime::Sparse { alpha }, seed)
}

pub fn dense_graph(n: usize, p: f64, seed: u64) -> Graph {
    sample(n, Regime::Dense { p }, seed)
}
