//! Monte-Carlo runner: samples replicate graphs along an `n` ladder, checks
//! concentration bands and compares fitted growth with engine predictions.
//!
//! Every verdict stores its observed value, threshold and raw counts, and
//! every report keeps the raw sample values, so verdicts can be recomputed
//! from an emitted report. Replicate `r` at size `n` uses ChaCha stream `r`
//! of a seed derived from `(seed, n)`, so results do not depend on the worker count.

mod experiment;
mod extension;
mod report;
mod stabilization;

pub use experiment::{predict, run_concentration_experiment};
pub use extension::verify_extension_concentration;
pub use report::{emit_plot, emit_report, load_report, plot_data, to_csv, ReportFormat};
pub use stabilization::verify_stabilization;

use crate::asym::Asym;
use crate::asymptotics::MeanMode;
use crate::connective::Registry;
use crate::error::{input, Result};
use crate::random::Regime;
use crate::term::{parse_with, Term};
use crate::types::ExtensionCaps;
use serde::{Deserialize, Serialize};

/// Version tag of the emitted report layout; equals the library version.
pub const SCHEMA_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default evaluation budget (estimated body evaluations per experiment).
pub const DEFAULT_BUDGET: f64 = 1e13;

/// Relative error bands around the empirical mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bands {
    /// Dense band `λ·ln n/√n`.
    pub dense_lambda: f64,
    /// Sparse band `n^{-ε}`.
    pub sparse_epsilon: f64,
}

impl Default for Bands {
    fn default() -> Bands {
        Bands {
            dense_lambda: 3.0,
            sparse_epsilon: 0.1,
        }
    }
}

impl Bands {
    pub fn width(&self, regime: Regime, n: usize) -> f64 {
        let x = n as f64;
        match regime {
            Regime::Dense { .. } => self.dense_lambda * x.ln() / x.sqrt(),
            Regime::Sparse { .. } => x.powf(-self.sparse_epsilon),
        }
    }
}

/// Pass thresholds used by [`run_concentration_experiment`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Minimum share of replicates inside the band at each `n`.
    pub coverage: f64,
    /// Maximum `|fitted γ − γ|`.
    pub slope_gap: f64,
    /// Maximum `|mean/(c·n^γ) − 1|` at the top of the ladder.
    pub constant_gap: f64,
}

impl Default for Thresholds {
    fn default() -> Thresholds {
        Thresholds {
            coverage: 0.95,
            slope_gap: 0.05,
            constant_gap: 0.15,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub term: Term,
    pub regime: Regime,
    pub n_ladder: Vec<usize>,
    pub replicates: usize,
    pub seed: u64,
    pub bands: Bands,
    pub thresholds: Thresholds,
    pub prediction: Option<Asym>,
    /// Why no prediction is attached, when known.
    pub prediction_note: Option<String>,
    pub budget: f64,
    /// Caps used to compute the prediction, kept for provenance.
    pub caps: Option<ExtensionCaps>,
    /// Record wall-clock time; off by default so reports are bit-stable.
    pub record_timing: bool,
}

impl ExperimentConfig {
    pub fn new(term: Term, regime: Regime, n_ladder: Vec<usize>, replicates: usize, seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            term,
            regime,
            n_ladder,
            replicates,
            seed,
            bands: Bands::default(),
            thresholds: Thresholds::default(),
            prediction: None,
            prediction_note: None,
            budget: DEFAULT_BUDGET,
            caps: None,
            record_timing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_ladder(&self.n_ladder, self.replicates)
    }
}

pub(crate) fn validate_ladder(ladder: &[usize], replicates: usize) -> Result<()> {
    if replicates < 2 {
        return input(format!("need at least 2 replicates, got {replicates}"));
    }
    if ladder.is_empty() {
        return input("n ladder is empty");
    }
    if ladder.windows(2).any(|w| w[0] >= w[1]) {
        return input(format!("n ladder {ladder:?} is not strictly increasing"));
    }
    if ladder[0] == 0 {
        return input("n ladder must start above 0");
    }
    Ok(())
}

/// Flat key-value form of [`ExperimentConfig`], as read from a config file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    pub term: String,
    /// `dense:p=<x>` or `sparse:alpha=<x>`.
    pub regime: String,
    pub n_ladder: Vec<usize>,
    pub replicates: usize,
    pub seed: u64,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub budget: Option<f64>,
    #[serde(default)]
    pub coverage: Option<f64>,
    #[serde(default)]
    pub slope_gap: Option<f64>,
    #[serde(default)]
    pub constant_gap: Option<f64>,
    /// Attach an engine prediction (default true).
    #[serde(default)]
    pub predict: Option<bool>,
    /// `desugar` or `native` for sparse predictions.
    #[serde(default)]
    pub mean_mode: Option<String>,
    #[serde(default)]
    pub max_new_vertices: Option<usize>,
    #[serde(default)]
    pub record_timing: Option<bool>,
}

impl ExperimentFile {
    pub fn into_config(self, reg: &Registry) -> Result<ExperimentConfig> {
        let term = parse_with(&self.term, reg)?;
        let regime: Regime = self.regime.parse()?;
        let mut cfg = ExperimentConfig::new(term, regime, self.n_ladder, self.replicates, self.seed);
        let d = Bands::default();
        cfg.bands = Bands {
            dense_lambda: self.lambda.unwrap_or(d.dense_lambda),
            sparse_epsilon: self.epsilon.unwrap_or(d.sparse_epsilon),
        };
        let d = Thresholds::default();
        cfg.thresholds = Thresholds {
            coverage: self.coverage.unwrap_or(d.coverage),
            slope_gap: self.slope_gap.unwrap_or(d.slope_gap),
            constant_gap: self.constant_gap.unwrap_or(d.constant_gap),
        };
        cfg.budget = self.budget.unwrap_or(DEFAULT_BUDGET);
        cfg.record_timing = self.record_timing.unwrap_or(false);
        let mean_mode = match self.mean_mode.as_deref() {
            None | Some("desugar") => MeanMode::Desugar,
            Some("native") => MeanMode::Native,
            Some(other) => return input(format!("mean_mode must be desugar or native, got {other:?}")),
        };
        let mut caps = ExtensionCaps::default();
        if let Some(m) = self.max_new_vertices {
            caps.max_new_vertices = m;
        }
        if matches!(regime, Regime::Sparse { .. }) {
            cfg.caps = Some(caps);
        }
        if self.predict.unwrap_or(true) {
            match predict(&cfg.term, regime, reg, mean_mode, caps) {
                Ok(a) => cfg.prediction = Some(a),
                Err(e) => cfg.prediction_note = Some(e.to_string()),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Summary of the replicate values at one ladder size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NRow {
    pub n: usize,
    pub replicates: usize,
    pub empirical_mean: f64,
    pub empirical_sd: f64,
    /// Relative band half-width used at this `n`.
    pub band: f64,
    pub within_band: usize,
    pub fraction_within_band: f64,
    pub min: f64,
    pub max: f64,
    pub zeros: usize,
    pub zero_fraction: f64,
    /// Raw values in replicate order.
    pub values: Vec<f64>,
}

impl NRow {
    pub(crate) fn from_values(n: usize, band: f64, values: Vec<f64>) -> NRow {
        NRow::around(n, band, None, values)
    }

    /// Band coverage around `reference`, or around the empirical mean.
    pub(crate) fn around(n: usize, band: f64, reference: Option<f64>, values: Vec<f64>) -> NRow {
        let mean = if values.is_empty() { 0.0 } else { crate::stats::mean(&values) };
        let center = reference.unwrap_or(mean);
        let within = values
            .iter()
            .filter(|&&v| if center == 0.0 { v == 0.0 } else { (v / center - 1.0).abs() <= band })
            .count();
        let zeros = values.iter().filter(|&&v| v == 0.0).count();
        let k = values.len().max(1) as f64;
        NRow {
            n,
            replicates: values.len(),
            empirical_mean: mean,
            empirical_sd: crate::stats::sd(&values),
            band,
            within_band: within,
            fraction_within_band: within as f64 / k,
            min: values.iter().cloned().reduce(f64::min).unwrap_or(0.0),
            max: values.iter().cloned().reduce(f64::max).unwrap_or(0.0),
            zeros,
            zero_fraction: zeros as f64 / k,
            values,
        }
    }
}

/// Log-log fit of the empirical means against the predicted `(c, γ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionCheck {
    pub predicted: Asym,
    pub fitted_gamma: f64,
    pub fitted_c: f64,
    pub slope_gap: f64,
    /// `mean/(c·n^γ)` at the top of the ladder.
    pub ratio_at_top: f64,
}

/// A pass/fail decision with everything needed to recompute it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub criterion: String,
    pub pass: bool,
    pub observed: f64,
    pub threshold: f64,
    /// `>=`, `>` or `<=`: how `observed` is compared with `threshold`.
    pub comparison: String,
    /// Raw counts behind `observed` (successes, trials) when it is a share.
    pub counts: Option<(usize, usize)>,
}

impl Verdict {
    pub fn at_least(criterion: impl Into<String>, observed: f64, threshold: f64, counts: Option<(usize, usize)>) -> Verdict {
        Verdict {
            criterion: criterion.into(),
            pass: observed >= threshold,
            observed,
            threshold,
            comparison: ">=".into(),
            counts,
        }
    }

    pub fn at_most(criterion: impl Into<String>, observed: f64, threshold: f64) -> Verdict {
        Verdict {
            criterion: criterion.into(),
            pass: observed <= threshold,
            observed,
            threshold,
            comparison: "<=".into(),
            counts: None,
        }
    }

    pub fn above(criterion: impl Into<String>, observed: f64, threshold: f64) -> Verdict {
        Verdict {
            criterion: criterion.into(),
            pass: observed > threshold,
            observed,
            threshold,
            comparison: ">".into(),
            counts: None,
        }
    }

    /// Recomputes `pass` from the stored numbers.
    pub fn recompute(&self) -> bool {
        match self.comparison.as_str() {
            ">=" => self.observed >= self.threshold,
            ">" => self.observed > self.threshold,
            _ => self.observed <= self.threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub schema_version: String,
    pub library_version: String,
    pub kind: String,
    pub subject: String,
    pub regime: Regime,
    pub seed: u64,
    pub replicates: usize,
    pub n_ladder: Vec<usize>,
    pub bands: Option<Bands>,
    pub thresholds: Option<Thresholds>,
    pub caps: Option<ExtensionCaps>,
    pub budget: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Runtime {
    /// Estimated body evaluations (or pattern searches) performed.
    pub estimated_work: f64,
    pub graphs_sampled: usize,
    /// Wall-clock seconds, present only when timing was requested.
    pub seconds: Option<f64>,
}

/// Share of tuple-type counts inside the stabilization band, per extension type.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeRow {
    pub extension_type: String,
    pub share: f64,
    pub checked: usize,
    pub violations: usize,
    pub violation_fraction: f64,
}

/// Per-`n` extension-count ratios and the fitted decay envelope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeFit {
    pub max_deviation: Vec<f64>,
    pub expected: Vec<f64>,
    /// `None` when the deviations admit no log-log fit.
    pub epsilon: Option<f64>,
    /// Smallest `C` with `max deviation ≤ C·n^{-ε}` on the whole ladder.
    pub constant: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub provenance: Provenance,
    /// What the per-`n` values measure.
    pub statistic: String,
    pub per_n: Vec<NRow>,
    pub prediction_check: Option<PredictionCheck>,
    pub types: Vec<TypeRow>,
    pub envelope: Option<EnvelopeFit>,
    pub verdicts: Vec<Verdict>,
    pub notes: Vec<String>,
    pub runtime: Runtime,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn verdict(&self, criterion: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.criterion == criterion)
    }
}

/// Stream seed of size `n`; replicate `r` is stream `r` of this seed.
pub(crate) fn size_seed(seed: u64, n: usize) -> u64 {
    seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Slope and intercept of `ln y` against `ln x`; `None` when a `y` is not positive.
pub(crate) fn log_log_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    if xs.len() < 2 || ys.iter().any(|&y| !(y > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    Some(crate::stats::linear_fit(&lx, &ly))
}
