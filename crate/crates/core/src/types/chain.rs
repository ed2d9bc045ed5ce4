//! Strictly balanced chains `F₁ = H₁ ⊂ … ⊂ H_r = F₂`.

use crate::error::{capacity, input, Result};
use crate::graph::{ExtensionPair, Graph};
use num_rational::Ratio;
use serde::Serialize;

/// Largest top graph handled by the exhaustive subset searches.
pub const CHAIN_VERTEX_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chain {
    /// Vertex sets of `pair.top()`, each sorted, starting with the base.
    pub levels: Vec<Vec<usize>>,
    /// `ρ(H_{i−1}, H_i)` for each step.
    pub densities: Vec<Ratio<i64>>,
}

impl Chain {
    /// The level graphs, induced from `top`.
    pub fn graphs(&self, top: &Graph) -> Result<Vec<Graph>> {
        self.levels.iter().map(|l| top.induced_ordered(l)).collect()
    }
}

fn edges_of(masks: &[u64], set: u64) -> i64 {
    Graph::edges_within_mask(masks, set) as i64
}

/// `ρ(H, T) = (e(T) − e(H)) / (|T| − |H|)` for `H ⊊ T` given as masks.
fn step_density(masks: &[u64], h: u64, t: u64) -> Ratio<i64> {
    let v = (t.count_ones() - h.count_ones()) as i64;
    Ratio::new(edges_of(masks, t) - edges_of(masks, h), v)
}

fn mask_to_vec(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// Submasks of `free`, nonempty, in increasing numeric order.
fn submasks(free: u64) -> impl Iterator<Item = u64> {
    let bits = mask_to_vec(free);
    (1u64..1 << bits.len()).map(move |sel| {
        bits.iter()
            .enumerate()
            .filter(|(i, _)| sel >> i & 1 == 1)
            .fold(0u64, |m, (_, &b)| m | 1 << b)
    })
}

/// Lexicographic order on sorted vertex lists, for tie-breaking.
fn lex_less(a: u64, b: u64) -> bool {
    mask_to_vec(a) < mask_to_vec(b)
}

fn check(pair: &ExtensionPair) -> Result<(Vec<u64>, u64, u64)> {
    let top = pair.top();
    if top.n() > CHAIN_VERTEX_CAP {
        return capacity(format!("chain search over {} vertices exceeds the cap {CHAIN_VERTEX_CAP}", top.n()));
    }
    let base = pair.base_vertices().iter().fold(0u64, |m, &v| m | 1 << v);
    let full = (1u64 << top.n()) - 1;
    if base == full {
        return input("the pair adds no vertices");
    }
    Ok((top.masks(), base, full))
}

/// Greedy chain: each step adds the set maximising the step density, ties
/// broken by fewest vertices and then lexicographically, so every step is an
/// inclusion-minimal maximiser.
pub fn strictly_balanced_chain(pair: &ExtensionPair) -> Result<Chain> {
    let (masks, base, full) = check(pair)?;
    let mut h = base;
    let mut levels = vec![mask_to_vec(h)];
    let mut densities = Vec::new();
    while h != full {
        let mut best: Option<(Ratio<i64>, u64)> = None;
        for s in submasks(full & !h) {
            let r = step_density(&masks, h, h | s);
            let better = match best {
                None => true,
                Some((br, bs)) => {
                    r > br
                        || (r == br && s.count_ones() < bs.count_ones())
                        || (r == br && s.count_ones() == bs.count_ones() && lex_less(s, bs))
                }
            };
            if better {
                best = Some((r, s));
            }
        }
        let (r, s) = best.expect("at least one vertex remains");
        h |= s;
        levels.push(mask_to_vec(h));
        densities.push(r);
    }
    Ok(Chain { levels, densities })
}

/// Every `T` with `H ⊊ T ⊊ top` has `ρ(H, T) < ρ(H, top)`; sets given as
/// vertex lists of `g`.
pub fn is_strictly_balanced(g: &Graph, h: &[usize], t: &[usize]) -> Result<bool> {
    if g.n() > CHAIN_VERTEX_CAP {
        return capacity(format!("balance check over {} vertices exceeds the cap {CHAIN_VERTEX_CAP}", g.n()));
    }
    let hm = h.iter().fold(0u64, |m, &v| m | 1 << v);
    let tm = t.iter().fold(0u64, |m, &v| m | 1 << v);
    if hm & !tm != 0 || hm == tm {
        return input("balance check needs H ⊊ T");
    }
    let masks = g.masks();
    let whole = step_density(&masks, hm, tm);
    Ok(submasks(tm & !hm)
        .filter(|&s| hm | s != tm)
        .all(|s| step_density(&masks, hm, hm | s) < whole))
}
