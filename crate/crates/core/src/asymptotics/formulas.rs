//! Closed forms for subgraph counts and maximal extension counts.

use crate::asym::Asym;
use crate::error::{input, Result};
use crate::graph::{count_automorphisms, count_rooted_automorphisms, ExtensionPair, Graph};
use crate::random::Regime;
use crate::types::{below_inverse_alpha, classify_pair, PairClass};

/// Expected number of copies of `h` in `G(n, p)`: `(n)_{|V|} p^{|E|} / aut(h)`.
pub fn expected_subgraph_count(h: &Graph, regime: Regime, n: usize) -> Result<f64> {
    let p = regime.edge_probability(n);
    let falling: f64 = (0..h.n()).map(|i| (n as f64 - i as f64).max(0.0)).product();
    let aut = count_automorphisms(h)? as f64;
    Ok(falling * p.powi(h.edge_count() as i32) / aut)
}

/// Leading order of the copy count of `h`. In the sparse regime this is the
/// typical count only when every subgraph has density below `1/α`.
pub fn expected_subgraph_asym(h: &Graph, regime: Regime) -> Result<Asym> {
    let aut = count_automorphisms(h)? as f64;
    let (v, e) = (h.n() as f64, h.edge_count() as i32);
    match regime {
        Regime::Dense { p } => Ok(Asym::pow(p.powi(e) / aut, v)),
        Regime::Sparse { alpha } => {
            if !below_inverse_alpha(h, alpha)? {
                return input(format!("pattern has a subgraph of density at least 1/{alpha}"));
            }
            Ok(Asym::pow(1.0 / aut, v - alpha * e as f64))
        }
    }
}

/// Leading order of the largest number of extensions of `h` over any
/// placement of `roots`, which must be pairwise non-adjacent in `h`.
pub fn expected_max_extension_asym(h: &Graph, roots: &[usize], regime: Regime) -> Result<Asym> {
    for (i, &a) in roots.iter().enumerate() {
        if roots[i + 1..].iter().any(|&b| h.has_edge(a, b)) {
            return input("roots of a maximal extension pattern must be independent");
        }
    }
    let pair = ExtensionPair::rooted(h.clone(), roots.to_vec())?;
    let aut = count_rooted_automorphisms(&pair)? as f64;
    let (v, e) = pair.extension_counts();
    match regime {
        Regime::Dense { p } => Ok(Asym::pow(p.powi(e as i32) / aut, v as f64)),
        Regime::Sparse { alpha } => {
            if classify_pair(&pair, alpha)? != PairClass::Sparse {
                return input(format!("extension is not sparse at alpha = {alpha}"));
            }
            Ok(Asym::pow(1.0 / aut, v as f64 - alpha * e as f64))
        }
    }
}
