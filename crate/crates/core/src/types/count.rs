//! Counting `(F₁, F₂)`-extensions of a tuple and their expectations.

use super::alpha::{classify_pair, PairClass};
use crate::asym::Asym;
use crate::error::{input, Result};
use crate::graph::{count_rooted_automorphisms, ExtensionPair, Graph};
use rayon::prelude::*;

/// Host size above which the first search level is split across threads.
const PARALLEL_THRESHOLD: usize = 256;

struct Plan {
    /// New vertices of the pattern in search order.
    order: Vec<usize>,
    /// For each step, pattern vertices (already placed) that must be adjacent.
    required: Vec<Vec<usize>>,
    /// Pattern vertex → slot in the assignment, roots first.
    slot: Vec<usize>,
    roots: usize,
}

fn plan(pair: &ExtensionPair) -> Plan {
    let top = pair.top();
    let base = pair.base_vertices();
    let mut slot = vec![usize::MAX; top.n()];
    for (i, &b) in base.iter().enumerate() {
        slot[b] = i;
    }
    let mut placed: Vec<bool> = (0..top.n()).map(|v| base.contains(&v)).collect();
    let mut order = Vec::new();
    let mut remaining = pair.new_vertices();
    // Most constrained first: prefer vertices with many placed neighbours.
    while !remaining.is_empty() {
        let (at, _) = remaining
            .iter()
            .enumerate()
            .max_by_key(|(_, &v)| {
                let anchored = top.neighbors(v).iter().filter(|&&w| placed[w as usize]).count();
                (anchored, top.degree(v), std::cmp::Reverse(v))
            })
            .unwrap();
        let v = remaining.remove(at);
        slot[v] = base.len() + order.len();
        placed[v] = true;
        order.push(v);
    }
    let required = order
        .iter()
        .map(|&v| {
            top.neighbors(v)
                .iter()
                .map(|&w| w as usize)
                .filter(|&w| slot[w] < slot[v])
                .collect()
        })
        .collect();
    Plan {
        order,
        required,
        slot,
        roots: base.len(),
    }
}

fn search(g: &Graph, plan: &Plan, assign: &mut Vec<usize>, used: &mut [bool]) -> u64 {
    let step = assign.len() - plan.roots;
    if step == plan.order.len() {
        return 1;
    }
    let req = &plan.required[step];
    let mut total = 0;
    let try_vertex = |x: usize, assign: &mut Vec<usize>, used: &mut [bool]| {
        if used[x] || !req.iter().all(|&w| g.has_edge(assign[plan.slot[w]], x)) {
            return 0;
        }
        used[x] = true;
        assign.push(x);
        let c = search(g, plan, assign, used);
        assign.pop();
        used[x] = false;
        c
    };
    match req.first() {
        Some(&w) => {
            let anchor = assign[plan.slot[w]];
            for &x in g.neighbors(anchor) {
                total += try_vertex(x as usize, assign, used);
            }
        }
        None => {
            for x in 0..g.n() {
                total += try_vertex(x, assign, used);
            }
        }
    }
    total
}

/// Injective maps of the added vertices into `g ∖ u` realising every edge
/// of `F₂` outside `F₁`, with base vertex `i` sent to `u[i]`.
pub fn count_embeddings(g: &Graph, u: &[usize], pair: &ExtensionPair) -> Result<u64> {
    if u.len() != pair.base_vertices().len() {
        return input(format!(
            "tuple has {} entries but the pattern has {} base vertices",
            u.len(),
            pair.base_vertices().len()
        ));
    }
    let mut used = vec![false; g.n()];
    for &x in u {
        if x >= g.n() {
            return input(format!("vertex {x} out of range for a graph on {} vertices", g.n()));
        }
        if used[x] {
            return input("extension roots must be distinct");
        }
        used[x] = true;
    }
    let plan = plan(pair);
    if plan.order.is_empty() {
        return Ok(1);
    }
    let assign = u.to_vec();
    let first_free = plan.required[0].is_empty();
    if g.n() < PARALLEL_THRESHOLD || !first_free {
        let mut assign = assign;
        return Ok(search(g, &plan, &mut assign, &mut used));
    }
    Ok((0..g.n())
        .into_par_iter()
        .filter(|&x| !used[x])
        .map(|x| {
            let mut used = used.clone();
            let mut assign = assign.clone();
            used[x] = true;
            assign.push(x);
            search(g, &plan, &mut assign, &mut used)
        })
        .sum())
}

/// Number of `(F₁, F₂)`-extensions of `u`: embeddings divided by the
/// automorphisms of `F₂` fixing `F₁` pointwise, so each extension subgraph
/// counts once.
pub fn count_extensions(g: &Graph, u: &[usize], pair: &ExtensionPair) -> Result<u64> {
    let emb = count_embeddings(g, u, pair)?;
    let aut = count_rooted_automorphisms(pair)?;
    Ok(emb / aut)
}

/// `𝔼` of [`count_extensions`] in `G(n, p)`: `(n − |V(F₁)|)_v · p^e / aut(F₁, F₂)`.
pub fn mu_all(pair: &ExtensionPair, n: usize, p: f64) -> Result<f64> {
    let (v, e) = pair.extension_counts();
    let k = pair.base_vertices().len();
    if n < k {
        return input(format!("n = {n} is smaller than the base size {k}"));
    }
    let falling: f64 = (0..v).map(|i| (n - k) as f64 - i as f64).map(|x| x.max(0.0)).product();
    let aut = count_rooted_automorphisms(pair)? as f64;
    Ok(falling * p.powi(e as i32) / aut)
}

/// Leading order of [`mu_all`] at `p = n^{−α}`: `Pow(1/aut, v − α·e)`.
/// Only sparse pairs have this expectation as their typical count.
pub fn mu_asym(pair: &ExtensionPair, alpha: f64) -> Result<Asym> {
    if classify_pair(pair, alpha)? != PairClass::Sparse {
        return input("mu_asym needs a sparse pair");
    }
    let (v, e) = pair.extension_counts();
    let aut = count_rooted_automorphisms(pair)? as f64;
    Ok(Asym::pow(1.0 / aut, v as f64 - alpha * e as f64))
}
