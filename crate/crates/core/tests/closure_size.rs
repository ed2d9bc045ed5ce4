//! Empirical closure boundedness on sparse samples.
//!
//! At n = 500 and α = 0.72 a two-vertex path between closure vertices is a
//! 2-dense extension; such paths number about |H|²·n^{2−3α} ≈ 0.37·|H|² for a
//! closure H, so 2-closures percolate well before the asymptotic bound kicks
//! in. The test records what it sees and fails when any closure hits the cap.

use aggconc::random::{sample_replicate, Regime};
use aggconc::types::{closure_with_cap, ell};
use aggconc::Error;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Default)]
struct Tally {
    probes: usize,
    over_cap: usize,
    largest: usize,
}

#[test]
fn pair_closures_stay_under_cap() {
    let (n, alpha, s) = (500, 0.72, 2);
    let cap = ell(2, s).unwrap() as usize;
    let regime = Regime::sparse(alpha).unwrap();
    let tallies: Vec<Tally> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let g = sample_replicate(n, regime, 1200, i);
            let mut r = ChaCha8Rng::seed_from_u64(12_000 + i);
            let edges: Vec<(usize, usize)> = g.edges().collect();
            let mut probes: Vec<[usize; 2]> = edges.choose_multiple(&mut r, 30).map(|&(a, b)| [a, b]).collect();
            probes.extend((0..30).map(|_| [r.gen_range(0..n), r.gen_range(0..n)]));
            let mut t = Tally::default();
            for u in probes {
                t.probes += 1;
                match closure_with_cap(&g, &u, s, alpha, cap) {
                    Ok(c) => t.largest = t.largest.max(c.len()),
                    Err(Error::Capacity(_)) => t.over_cap += 1,
                    Err(e) => panic!("closure of {u:?}: {e}"),
                }
            }
            t
        })
        .collect();
    let probes: usize = tallies.iter().map(|t| t.probes).sum();
    let over: usize = tallies.iter().map(|t| t.over_cap).sum();
    let largest = tallies.iter().map(|t| t.largest).max().unwrap_or(0);
    let samples_over = tallies.iter().filter(|t| t.over_cap > 0).count();
    println!(
        "closure size: {probes} probes on 100 samples, {over} past the cap {cap} in {samples_over} samples, \
         largest completed closure {largest}"
    );
    assert_eq!(over, 0, "{over} of {probes} 2-closures grew past {cap} vertices");
}
