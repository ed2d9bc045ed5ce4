//! Decisive comparisons of `α·e` against `v` and pair classification.

use crate::error::{input, Error, Result};
use crate::graph::ExtensionPair;
use serde::Serialize;

/// Relative margin below which `α·e` and `v` are considered indistinguishable.
pub const GUARD_TOL: f64 = 1e-9;

/// Outcome of [`irrationality_guard`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Guard {
    Pass,
    Conflict { e: u64, v: u64 },
}

/// Looks for a ratio `v/e` with `v ≤ max_pattern_size` within tolerance of
/// `alpha`. Conflicts are reported with the smallest `e`, then smallest `v`.
pub fn irrationality_guard(alpha: f64, max_pattern_size: u64) -> Guard {
    irrationality_guard_tol(alpha, max_pattern_size, GUARD_TOL)
}

pub fn irrationality_guard_tol(alpha: f64, max_pattern_size: u64, tol: f64) -> Guard {
    if !(alpha > 0.0 && alpha < 1.0) || max_pattern_size == 0 {
        return Guard::Pass;
    }
    let e_max = (max_pattern_size as f64 / alpha).ceil() as u64 + 1;
    for e in 1..=e_max {
        for v in 1..=max_pattern_size.min(e.saturating_mul(max_pattern_size)) {
            if (alpha * e as f64 - v as f64).abs() <= tol * e as f64 {
                return Guard::Conflict { e, v };
            }
        }
    }
    Guard::Pass
}

/// `α·e > v`, or an irrationality error when the two are within the guard margin.
pub fn alpha_exceeds(alpha: f64, e: u64, v: u64) -> Result<bool> {
    let d = alpha * e as f64 - v as f64;
    if d.abs() <= GUARD_TOL * (e.max(1)) as f64 {
        return Err(Error::Irrationality { e, v });
    }
    Ok(d > 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairClass {
    Dense,
    Sparse,
    Neither,
}

/// Per-subset edge counts of an extension, indexed by masks over the added
/// vertices. `touching[R]` counts edges of the top graph with an endpoint in
/// `R`; `incident[R]` counts edges of `top↾(base ∪ R)` with an endpoint in `R`.
pub(crate) struct Layers {
    pub(crate) m: usize,
    pub(crate) touching: Vec<u64>,
    pub(crate) incident: Vec<u64>,
}

impl Layers {
    pub(crate) fn new(top: &crate::graph::Graph, new: &[usize]) -> Result<Layers> {
        let m = new.len();
        let mut index = vec![usize::MAX; top.n()];
        for (i, &v) in new.iter().enumerate() {
            index[v] = i;
        }
        let mut base_deg = vec![0u64; m];
        let mut inner = vec![0u64; m];
        for (i, &v) in new.iter().enumerate() {
            for &w in top.neighbors(v) {
                match index[w as usize] {
                    usize::MAX => base_deg[i] += 1,
                    j => inner[i] |= 1 << j,
                }
            }
        }
        Layers::from_degrees(&base_deg, &inner)
    }

    /// `base_deg[i]`: edges from added vertex `i` into the base; `inner[i]`:
    /// mask of its added neighbours.
    pub(crate) fn from_degrees(base_deg: &[u64], inner: &[u64]) -> Result<Layers> {
        let m = base_deg.len();
        if m == 0 {
            return input("the pair adds no vertices");
        }
        if m > 20 {
            return crate::error::capacity(format!("{m} added vertices exceed the classification cap 20"));
        }
        let size = 1usize << m;
        let mut touching = vec![0u64; size];
        let mut incident = vec![0u64; size];
        for mask in 1..size {
            let i = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            let into_rest = (inner[i] & rest as u64).count_ones() as u64;
            let deg = base_deg[i] + inner[i].count_ones() as u64;
            touching[mask] = touching[rest] + deg - into_rest;
            incident[mask] = incident[rest] + base_deg[i] + into_rest;
        }
        Ok(Layers { m, touching, incident })
    }

    fn full(&self) -> usize {
        (1usize << self.m) - 1
    }

    /// For every `S` with the base inside and some added vertex outside,
    /// `α·e(S, top) > v(S, top)`.
    pub(crate) fn is_dense(&self, alpha: f64) -> Result<bool> {
        for rest in 1..=self.full() {
            if !alpha_exceeds(alpha, self.touching[rest], rest.count_ones() as u64)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// For every `S` adding at least one vertex, `α·e(base, top↾S) < v(base, top↾S)`.
    pub(crate) fn is_sparse(&self, alpha: f64) -> Result<bool> {
        for inside in 1..=self.full() {
            if alpha_exceeds(alpha, self.incident[inside], inside.count_ones() as u64)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Dense when every `S` with `V(F₁) ⊆ S ⊂ V(F₂)` has `α·e(S,F₂) > v(S,F₂)`;
/// sparse when every `S` with `V(F₁) ⊂ S ⊆ V(F₂)` has `α·e(F₁,F₂↾S) < v(F₁,F₂↾S)`.
pub fn classify_pair(pair: &ExtensionPair, alpha: f64) -> Result<PairClass> {
    let layers = Layers::new(pair.top(), &pair.new_vertices())?;
    if layers.is_dense(alpha)? {
        Ok(PairClass::Dense)
    } else if layers.is_sparse(alpha)? {
        Ok(PairClass::Sparse)
    } else {
        Ok(PairClass::Neither)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn guard_examples() {
        assert_eq!(irrationality_guard(0.7, 12), Guard::Conflict { e: 10, v: 7 });
        assert_eq!(irrationality_guard(0.5, 12), Guard::Conflict { e: 2, v: 1 });
        let a: f64 = format!("{:.15}", 1.0 / 2f64.sqrt()).parse().unwrap();
        assert_eq!(irrationality_guard(a, 12), Guard::Pass);
        assert_eq!(irrationality_guard(0.7, 5), Guard::Pass);
        assert_eq!(irrationality_guard(0.6, 5), Guard::Conflict { e: 5, v: 3 });
    }

    #[test]
    fn comparisons() {
        assert!(alpha_exceeds(0.8, 3, 2).unwrap());
        assert!(!alpha_exceeds(0.6, 3, 2).unwrap());
        assert_eq!(alpha_exceeds(0.5, 2, 1), Err(Error::Irrationality { e: 2, v: 1 }));
    }

    fn triangle_from_vertex() -> ExtensionPair {
        ExtensionPair::rooted(Graph::complete(3), vec![0]).unwrap()
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_pair(&triangle_from_vertex(), 0.8).unwrap(), PairClass::Dense);
        // At α = 0.6 every initial segment stays below the line: S = {a,b}
        // gives 1 < 1/0.6 and S = V(F₂) gives 3 < 2/0.6.
        assert_eq!(classify_pair(&triangle_from_vertex(), 0.6).unwrap(), PairClass::Sparse);
        let top = Graph::from_edges(3, &[(0, 2)]).unwrap();
        let pair = ExtensionPair::rooted(top, vec![0, 1]).unwrap();
        for a in [0.1, 0.45, 0.73, 0.99] {
            assert_eq!(classify_pair(&pair, a).unwrap(), PairClass::Sparse);
        }
        let same = ExtensionPair::rooted(Graph::complete(2), vec![0, 1]).unwrap();
        assert!(classify_pair(&same, 0.5).is_err());
    }

    /// Classification straight from the subset definitions on induced subgraphs.
    fn brute(g: &Graph, base: &[usize], alpha: f64) -> PairClass {
        let n = g.n();
        let bm = base.iter().fold(0u64, |m, &v| m | 1 << v);
        let full = (1u64 << n) - 1;
        let masks = g.masks();
        let e = |s: u64| Graph::edges_within_mask(&masks, s) as f64;
        let v = |s: u64| s.count_ones() as f64;
        let supersets: Vec<u64> = (0..=full).filter(|s| s & bm == bm).collect();
        let dense = supersets
            .iter()
            .filter(|&&s| s != full)
            .all(|&s| alpha * (e(full) - e(s)) > v(full) - v(s));
        let sparse = supersets
            .iter()
            .filter(|&&s| s != bm)
            .all(|&s| alpha * (e(s) - e(bm)) < v(s) - v(bm));
        if dense {
            PairClass::Dense
        } else if sparse {
            PairClass::Sparse
        } else {
            PairClass::Neither
        }
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (2..=max_n)
            .prop_flat_map(|n| (Just(n), proptest::collection::vec(0.0f64..1.0, n * (n - 1) / 2), 0.2f64..0.8))
            .prop_map(|(n, draws, p)| {
                let mut edges = Vec::new();
                let mut i = 0;
                for a in 0..n {
                    for b in a + 1..n {
                        if draws[i] < p {
                            edges.push((a, b));
                        }
                        i += 1;
                    }
                }
                Graph::from_edges(n, &edges).unwrap()
            })
    }

    const ALPHAS: [f64; 5] = [0.31, 0.47, 0.62, 0.73, 0.86];

    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig { cases: 300, max_global_rejects: 200_000, ..ProptestConfig::default() })]
        #[test]
        fn matches_definition(g in arb_graph(7), k in 0usize..6, ai in 0usize..5) {
            let k = k.min(g.n() - 1);
            let base: Vec<usize> = (0..k).collect();
            let alpha = ALPHAS[ai];
            let pair = ExtensionPair::rooted(g.clone(), base.clone()).unwrap();
            match classify_pair(&pair, alpha) {
                Ok(c) => prop_assert_eq!(c, brute(&g, &base, alpha)),
                Err(Error::Irrationality { .. }) => {}
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }

        /// Dense pairs stay dense over any larger base that still leaves
        /// vertices to add.
        #[test]
        fn dense_sub_extension(g in arb_graph(7), k in 0usize..6, ai in 0usize..5, grow in any::<u64>()) {
            let k = k.min(g.n() - 1);
            let alpha = ALPHAS[ai];
            let pair = ExtensionPair::rooted(g.clone(), (0..k).collect()).unwrap();
            prop_assume!(matches!(classify_pair(&pair, alpha), Ok(PairClass::Dense)));
            let mut bigger: Vec<usize> = (0..k).collect();
            bigger.extend((k..g.n()).filter(|i| grow >> i & 1 == 1));
            prop_assume!(bigger.len() < g.n());
            let sub = ExtensionPair::rooted(g, bigger).unwrap();
            prop_assert_eq!(classify_pair(&sub, alpha).unwrap(), PairClass::Dense);
        }
    }
}
