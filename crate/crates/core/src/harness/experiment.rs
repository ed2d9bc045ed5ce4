use super::{
    log_log_fit, size_seed, ExperimentConfig, NRow, PredictionCheck, Provenance, Report, Runtime, Verdict,
    SCHEMA_VERSION,
};
use crate::asym::Asym;
use crate::asymptotics::{analyze_dense, analyze_sparse, MeanMode, SparseConfig};
use crate::connective::Registry;
use crate::error::{input, Error, Result};
use crate::eval::{cost_bound, EvalOptions, Evaluator};
use crate::random::{sample_replicate, Regime};
use crate::term::Term;
use crate::types::ExtensionCaps;
use rayon::prelude::*;
use std::time::Instant;

/// Engine prediction for a closed term in `regime`.
pub fn predict(t: &Term, regime: Regime, reg: &Registry, mean_mode: MeanMode, caps: ExtensionCaps) -> Result<Asym> {
    match regime {
        Regime::Dense { p } => Ok(analyze_dense(t, p, reg)?.value),
        Regime::Sparse { alpha } => {
            let cfg = SparseConfig {
                mean_mode,
                caps,
                ..SparseConfig::new(alpha)
            };
            Ok(analyze_sparse(t, &cfg, reg)?.value)
        }
    }
}

/// Samples `replicates` graphs at each ladder size, evaluates the closed
/// term on each, and checks band coverage and the predicted growth.
pub fn run_concentration_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    if !cfg.term.is_closed() {
        return input(format!("experiment term {} has free variables", cfg.term));
    }
    let estimated: f64 = cfg
        .n_ladder
        .iter()
        .map(|&n| cost_bound(&cfg.term, n) * cfg.replicates as f64)
        .sum();
    if estimated > cfg.budget {
        return Err(Error::Budget {
            estimated,
            budget: cfg.budget,
        });
    }
    let start = Instant::now();
    let ev = Evaluator::with_options(&cfg.term, EvalOptions { cache: true })?;
    let mut per_n = Vec::with_capacity(cfg.n_ladder.len());
    for &n in &cfg.n_ladder {
        let stream = size_seed(cfg.seed, n);
        let values = (0..cfg.replicates as u64)
            .into_par_iter()
            .map(|r| ev.eval(&sample_replicate(n, cfg.regime, stream, r), &[]))
            .collect::<Result<Vec<f64>>>()?;
        per_n.push(NRow::from_values(n, cfg.bands.width(cfg.regime, n), values));
    }

    let mut verdicts = Vec::new();
    let mut notes = Vec::new();
    let top = per_n.last().expect("ladder is non-empty");
    let mut prediction_check = None;
    match cfg.prediction {
        None => {
            let why = cfg.prediction_note.as_deref().unwrap_or("not requested");
            notes.push(format!("no Asym available ({why}); prediction check skipped"));
            push_coverage(cfg, &per_n, &mut verdicts);
        }
        Some(Asym::Zero) => {
            let threshold = 1.0 - 1.0 / cfg.replicates as f64;
            verdicts.push(Verdict::at_least(
                format!("zero_fraction@{}", top.n),
                top.zero_fraction,
                threshold,
                Some((top.zeros, top.replicates)),
            ));
        }
        Some(pred) => {
            push_coverage(cfg, &per_n, &mut verdicts);
            let ns: Vec<f64> = per_n.iter().map(|r| r.n as f64).collect();
            let means: Vec<f64> = per_n.iter().map(|r| r.empirical_mean).collect();
            let ratio_at_top = top.empirical_mean / pred.value_at(top.n as f64);
            match log_log_fit(&ns, &means) {
                Some((slope, intercept)) if per_n.len() >= 2 => {
                    let check = PredictionCheck {
                        predicted: pred,
                        fitted_gamma: slope,
                        fitted_c: intercept.exp(),
                        slope_gap: (slope - pred.gamma().expect("nonzero prediction")).abs(),
                        ratio_at_top,
                    };
                    verdicts.push(Verdict::at_most("slope_gap", check.slope_gap, cfg.thresholds.slope_gap));
                    prediction_check = Some(check);
                }
                _ => notes.push("log-log fit needs two or more sizes with positive means".into()),
            }
            verdicts.push(Verdict::at_most(
                format!("constant_gap@{}", top.n),
                (ratio_at_top - 1.0).abs(),
                cfg.thresholds.constant_gap,
            ));
        }
    }
    let seconds = cfg.record_timing.then(|| start.elapsed().as_secs_f64());
    Ok(Report {
        schema_version: SCHEMA_VERSION.into(),
        provenance: Provenance {
            schema_version: SCHEMA_VERSION.into(),
            library_version: env!("CARGO_PKG_VERSION").into(),
            kind: "concentration".into(),
            subject: cfg.term.to_string(),
            regime: cfg.regime,
            seed: cfg.seed,
            replicates: cfg.replicates,
            n_ladder: cfg.n_ladder.clone(),
            bands: Some(cfg.bands),
            thresholds: Some(cfg.thresholds),
            caps: cfg.caps,
            budget: Some(cfg.budget),
        },
        statistic: "term value".into(),
        per_n,
        prediction_check,
        types: vec![],
        envelope: None,
        verdicts,
        notes,
        runtime: Runtime {
            estimated_work: estimated,
            graphs_sampled: cfg.n_ladder.len() * cfg.replicates,
            seconds,
        },
    })
}

fn push_coverage(cfg: &ExperimentConfig, per_n: &[NRow], verdicts: &mut Vec<Verdict>) {
    for row in per_n {
        verdicts.push(Verdict::at_least(
            format!("coverage@{}", row.n),
            row.fraction_within_band,
            cfg.thresholds.coverage,
            Some((row.within_band, row.replicates)),
        ));
    }
}
