use super::{size_seed, NRow, Provenance, Report, Runtime, TypeRow, Verdict, SCHEMA_VERSION};
use crate::error::Result;
use crate::random::{replicate_rng, sample_replicate, Regime};
use crate::types::{extension_percentages, AtomicType};
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;

/// Attempts at drawing a tuple of the requested type from one sample.
const TUPLE_ATTEMPTS: usize = 1000;

/// Required share of (tuple, type) counts inside the band.
const COVERAGE: f64 = 0.95;

/// Random distinct vertices inducing `t0.class_graph`, in class order.
fn find_tuple<R: Rng>(g: &crate::graph::Graph, t0: &AtomicType, rng: &mut R) -> Option<Vec<usize>> {
    let c = t0.classes();
    if c > g.n() {
        return None;
    }
    (0..TUPLE_ATTEMPTS).find_map(|_| {
        let vs = sample(rng, g.n(), c).into_vec();
        let ok = (0..c).all(|i| (i + 1..c).all(|j| g.has_edge(vs[i], vs[j]) == t0.class_graph.has_edge(i, j)));
        ok.then_some(vs)
    })
}

/// Counts, for one sampled tuple of type `t0` per replicate graph of
/// `G(n, p)`, the vertices realising each one-vertex extension type, and
/// checks each count against `%(t)·n ± %(t)·√n·(ln n)^{0.9}`.
///
/// Raw values are the counts, replicate-major, extension types in mask order
/// (bit `i` set when the new vertex is adjacent to class `i`).
pub fn verify_stabilization(t0: &AtomicType, n: usize, p: f64, replicates: usize, seed: u64) -> Result<Report> {
    let regime = Regime::dense(p)?;
    super::validate_ladder(&[n], replicates)?;
    let shares = extension_percentages(t0, p);
    let c = t0.classes();
    let stream = size_seed(seed, n);
    let counts: Vec<Option<Vec<u64>>> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            let g = sample_replicate(n, regime, stream, r);
            let mut rng = replicate_rng(stream.rotate_left(17) ^ 0x5bd1_e995, r);
            let u = find_tuple(&g, t0, &mut rng)?;
            let mut counts = vec![0u64; 1 << c];
            for w in (0..n).filter(|w| !u.contains(w)) {
                let mask = (0..c).filter(|&i| g.has_edge(u[i], w)).fold(0usize, |m, i| m | 1 << i);
                counts[mask] += 1;
            }
            Some(counts)
        })
        .collect();

    let x = n as f64;
    let spread = x.sqrt() * x.ln().powf(0.9);
    let mut types: Vec<TypeRow> = shares
        .iter()
        .map(|(t, share)| TypeRow {
            extension_type: t.to_string(),
            share: *share,
            checked: 0,
            violations: 0,
            violation_fraction: 0.0,
        })
        .collect();
    let mut values = Vec::new();
    let mut missing = 0;
    for row in &counts {
        let Some(row) = row else {
            missing += 1;
            continue;
        };
        for (mask, &k) in row.iter().enumerate() {
            let share = types[mask].share;
            types[mask].checked += 1;
            if (k as f64 - share * x).abs() > share * spread {
                types[mask].violations += 1;
            }
            values.push(k as f64);
        }
    }
    for t in &mut types {
        t.violation_fraction = if t.checked == 0 { 0.0 } else { t.violations as f64 / t.checked as f64 };
    }
    let checked: usize = types.iter().map(|t| t.checked).sum();
    let within = checked - types.iter().map(|t| t.violations).sum::<usize>();
    let mut notes = Vec::new();
    if missing > 0 {
        notes.push(format!("{missing} of {replicates} samples had no tuple of type {t0}"));
    }
    let coverage = if checked == 0 {
        notes.push("no tuple of the requested type was found; verdict is vacuous".into());
        1.0
    } else {
        within as f64 / checked as f64
    };
    let mut row = NRow::from_values(n, spread / x, values);
    row.within_band = within;
    row.fraction_within_band = coverage;
    Ok(Report {
        schema_version: SCHEMA_VERSION.into(),
        provenance: Provenance {
            schema_version: SCHEMA_VERSION.into(),
            library_version: env!("CARGO_PKG_VERSION").into(),
            kind: "stabilization".into(),
            subject: t0.to_string(),
            regime,
            seed,
            replicates,
            n_ladder: vec![n],
            bands: None,
            thresholds: None,
            caps: None,
            budget: None,
        },
        statistic: "one-vertex extension counts, replicate-major, types in mask order".into(),
        per_n: vec![row],
        prediction_check: None,
        types,
        envelope: None,
        verdicts: vec![Verdict::at_least(format!("stabilization@{n}"), coverage, COVERAGE, Some((within, checked)))],
        notes,
        runtime: Runtime {
            estimated_work: (replicates * n) as f64,
            graphs_sampled: replicates,
            seconds: None,
        },
    })
}
