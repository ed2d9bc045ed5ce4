//! Atomic types: the equality pattern of a tuple plus the graph induced on
//! its distinct entries.

use crate::graph::{Graph, GraphBuilder};
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::Serialize;
use std::fmt;

/// `pattern[i]` is the class of position `i`; classes are numbered by first
/// occurrence, so the representation is canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AtomicType {
    pub pattern: Vec<usize>,
    pub class_graph: Graph,
}

impl AtomicType {
    pub fn empty() -> AtomicType {
        AtomicType {
            pattern: vec![],
            class_graph: Graph::empty(0),
        }
    }

    pub fn arity(&self) -> usize {
        self.pattern.len()
    }

    pub fn classes(&self) -> usize {
        self.class_graph.n()
    }

    /// Type of the sub-tuple at `positions` (in that order).
    pub fn restrict(&self, positions: &[usize]) -> AtomicType {
        let mut order: Vec<usize> = Vec::new();
        let pattern = positions
            .iter()
            .map(|&p| {
                let c = self.pattern[p];
                match order.iter().position(|&x| x == c) {
                    Some(i) => i,
                    None => {
                        order.push(c);
                        order.len() - 1
                    }
                }
            })
            .collect();
        let class_graph = self.class_graph.induced_ordered(&order).expect("classes are distinct");
        AtomicType { pattern, class_graph }
    }

    /// Appends a position equal to existing class `class`.
    pub fn extend_existing(&self, class: usize) -> AtomicType {
        let mut t = self.clone();
        t.pattern.push(class);
        t
    }

    /// Appends a new class adjacent exactly to the classes in `adjacent` (bit mask).
    pub fn extend_new(&self, adjacent: u64) -> AtomicType {
        let c = self.classes();
        let edges: Vec<(usize, usize)> = (0..c).filter(|&i| adjacent >> i & 1 == 1).map(|i| (i, c)).collect();
        let mut pattern = self.pattern.clone();
        pattern.push(c);
        AtomicType {
            pattern,
            class_graph: self.class_graph.extended(1, &edges).expect("valid extension"),
        }
    }

    pub fn same_class(&self, i: usize, j: usize) -> bool {
        self.pattern[i] == self.pattern[j]
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        let (a, b) = (self.pattern[i], self.pattern[j]);
        a != b && self.class_graph.has_edge(a, b)
    }
}

impl fmt::Display for AtomicType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pattern={:?} edges={:?}", self.pattern, self.class_graph.edge_vec())
    }
}

/// The atomic type of `u` in `g` (repeats allowed).
pub fn atomic_type(g: &Graph, u: &[usize]) -> crate::Result<AtomicType> {
    let mut distinct: Vec<usize> = Vec::new();
    let mut pattern = Vec::with_capacity(u.len());
    for &x in u {
        if x >= g.n() {
            return crate::error::input(format!("vertex {x} out of range for a graph on {} vertices", g.n()));
        }
        match distinct.iter().position(|&y| y == x) {
            Some(i) => pattern.push(i),
            None => {
                distinct.push(x);
                pattern.push(distinct.len() - 1);
            }
        }
    }
    let mut b = GraphBuilder::new(distinct.len());
    for i in 0..distinct.len() {
        for j in i + 1..distinct.len() {
            if g.has_edge(distinct[i], distinct[j]) {
                b.push_unchecked(i, j);
            }
        }
    }
    Ok(AtomicType {
        pattern,
        class_graph: b.build(),
    })
}

/// One-vertex extension types of `t0` with a new distinct vertex, each with
/// its limiting share `p^{|S|}(1-p)^{c-|S|}` where `S` is the set of classes
/// the new vertex is adjacent to. Entries are ordered by the mask of `S`.
pub fn extension_percentages(t0: &AtomicType, p: f64) -> Vec<(AtomicType, f64)> {
    let c = t0.classes();
    (0..1u64 << c)
        .map(|s| {
            let k = s.count_ones() as i32;
            (t0.extend_new(s), p.powi(k) * (1.0 - p).powi(c as i32 - k))
        })
        .collect()
}

/// Exact form of [`extension_percentages`] for rational `p`.
pub fn extension_percentages_exact(t0: &AtomicType, p: Ratio<i64>) -> Vec<(AtomicType, Ratio<i64>)> {
    let c = t0.classes();
    let q = Ratio::one() - p;
    (0..1u64 << c)
        .map(|s| {
            let k = s.count_ones() as usize;
            let mut w = Ratio::one();
            for _ in 0..k {
                w *= p;
            }
            for _ in k..c {
                w *= q;
            }
            (t0.extend_new(s), w)
        })
        .collect()
}

/// Sum of a list of exact shares (used by the normalisation check).
pub fn total_share(entries: &[(AtomicType, Ratio<i64>)]) -> Ratio<i64> {
    entries.iter().fold(Ratio::zero(), |acc, (_, w)| acc + w)
}
