//! Convergence, extrapolation, and spectral-statistics analyses.
//!
//! Everything in this module consumes either a [`SweepDataset`] (one row per
//! prime cutoff `c`, carrying the minimal even eigenvalue and the
//! zero-approximation errors for that cell) or plain slices of
//! arbitrary-precision numbers.  The operations are organised by theme:
//!
//! * [`fit`] — least-squares model fits of the error decay (eight candidate
//!   laws plus a log-periodic refinement), power-law refits of the eigenvalue
//!   itself, Sobolev-exponent estimates, and coupling regressions.
//! * [`accel`] — Aitken Δ² sequence acceleration, the closed-form eigenvalue
//!   predictor, and the precision-floor classifier.
//! * [`spectra`] — eigenvalue unfolding, Brody-parameter fits, and
//!   Kolmogorov–Smirnov distances against the classical spacing families.
//! * [`vectors`] — ground-vector overlaps, overlap-decay fits, and principal
//!   component analysis of eigenvector families.
//! * [`steps`] — per-prime decomposition of the error trajectory.
//! * [`fixtures`] — recorded reference datasets embedded in the crate, used
//!   by the regression tests and runnable through the CLI without recomputing
//!   multi-hour cells.
//!
//! All numerical work happens at a caller-supplied [`Ctx`] precision; no
//! `f64` arithmetic is used anywhere in the pipeline.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mpkit::Ctx;
use rug::Float;

pub mod accel;
pub mod fit;
pub mod fixtures;
mod linalg;
pub mod spectra;
pub mod steps;
pub mod vectors;

pub use accel::{
    aitken, aitken_report, classify_floor, connes_64_breakdown, connes_64_prediction,
    floor_estimate, AitkenReport, FloorBin, PredictionBreakdown,
};
pub use fit::{
    coupling_ratios, fit_linear_ls, fit_log_periodic, fit_models, log_periodic_predict,
    log_ratio_table, multi_zero_rates, power_law_predict, power_law_refit, ratio_coupling_fit,
    sobolev_exponent, LogRatioRow, PowerLawFit, SobolevFit, ZeroRate,
};
pub use spectra::{brody_fit, ks_distance, unfold_spectrum, SpacingFamily};
pub use steps::{per_prime_decomposition, StepPowerLaw, StepRecord, StepsReport};
pub use vectors::{
    overlap, overlap_decay_fit, overlap_matrix, pca, OverlapDecayGroup, PcaResult,
};

/// Where a dataset's numbers come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Transcribed reference values shipped with the crate.
    Fixture,
    /// Produced by this tool (e.g. by the `sweep` command).
    Computed,
}

/// One sweep cell: the summary of a single `(c, N, T, dps)` computation.
///
/// Large-magnitude quantities are carried as decimal strings so that a
/// dataset can be reparsed at any precision without loss beyond the recorded
/// digits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    /// Prime cutoff (decimal string, e.g. `"13"`).
    pub c: String,
    /// Interval half-length `L = log c`.
    pub l: String,
    /// Minimal even-sector eigenvalue.
    pub lambda_min: String,
    /// Absolute errors of the extracted zero ordinates, ascending in `k`.
    #[serde(default)]
    pub gamma_errors: Vec<String>,
    /// `log10` of the first zero's error.  Optional for ad-hoc rows that
    /// carry only an eigenvalue (e.g. large-`c` eigenvalue-only cells).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log10_gamma1_err: Option<String>,
    /// Count of negative eigenvalues in the even sector.
    #[serde(default)]
    pub negative_count: u32,
    /// Optional pass-through of the cell's spectral invariants.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariants: Option<serde_json::Value>,
}

/// A family of sweep cells ordered by ascending cutoff.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepDataset {
    /// Format tag, currently `"sweep-dataset/1"`.
    pub schema: String,
    pub provenance: Provenance,
    /// Free-form origin note (tool version, fixture name, ...).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub rows: Vec<SweepRow>,
}

pub(crate) const SWEEP_SCHEMA: &str = "sweep-dataset/1";

/// Checks a `name/major` schema tag against the supported major version.
pub(crate) fn check_schema(found: &str, name: &str, major: u32) -> Result<()> {
    let want = format!("{name}/{major}");
    if found == want {
        return Ok(());
    }
    Err(Error::config(format!(
        "unsupported schema {found:?}: this tool reads {want:?}"
    )))
}

impl SweepDataset {
    /// Parses and validates a dataset from JSON text.
    pub fn from_json(text: &str) -> Result<Self> {
        let ds: SweepDataset = serde_json::from_str(text)?;
        ds.validate()?;
        Ok(ds)
    }

    /// Serialises the dataset as pretty JSON.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Structural checks: supported schema, non-empty, strictly ascending
    /// cutoffs, `l` consistent with `log c` to 5e-3, parseable eigenvalues
    /// and errors, and (when present) a finite `log10_gamma1_err` that is
    /// negative and within 0.01 of `log10(gamma_errors[0])`.
    pub fn validate(&self) -> Result<()> {
        check_schema(&self.schema, "sweep-dataset", 1)?;
        if self.rows.is_empty() {
            return Err(Error::config("sweep dataset has no rows"));
        }
        let ctx = Ctx::new(60)?;
        let mut prev_c: Option<Float> = None;
        for (i, row) in self.rows.iter().enumerate() {
            let c = ctx.parse(&row.c)?;
            if c <= 1 {
                return Err(Error::config(format!("row {i}: cutoff {} must exceed 1", row.c)));
            }
            if let Some(p) = &prev_c {
                if c <= *p {
                    return Err(Error::config(format!(
                        "rows must be strictly ascending in c; row {i} has c = {}",
                        row.c
                    )));
                }
            }
            let l = ctx.parse(&row.l)?;
            let lnc = c.clone().ln();
            if (l - &lnc).abs() > 5e-3 {
                return Err(Error::config(format!(
                    "row {i}: l = {} is not log({}) to within 5e-3",
                    row.l, row.c
                )));
            }
            let lam = ctx.parse(&row.lambda_min)?;
            if !lam.is_finite() {
                return Err(Error::config(format!("row {i}: lambda_min is not finite")));
            }
            for (k, e) in row.gamma_errors.iter().enumerate() {
                let v = ctx.parse(e)?;
                if !v.is_finite() || v < 0 {
                    return Err(Error::config(format!(
                        "row {i}: gamma_errors[{k}] must be a finite non-negative value"
                    )));
                }
            }
            if let Some(lg) = &row.log10_gamma1_err {
                let v = ctx.parse(lg)?;
                if !v.is_finite() {
                    return Err(Error::config(format!(
                        "row {i}: log10_gamma1_err is not finite"
                    )));
                }
                if v >= 0 {
                    return Err(Error::config(format!(
                        "row {i}: log10_gamma1_err = {lg} should be negative (errors below 1)"
                    )));
                }
                if let Some(e0) = row.gamma_errors.first() {
                    let direct = ctx.parse(e0)?.log10();
                    if (v - direct).abs() > 0.011 {
                        return Err(Error::config(format!(
                            "row {i}: log10_gamma1_err = {lg} disagrees with log10(gamma_errors[0])"
                        )));
                    }
                }
            } else if self.provenance == Provenance::Fixture && !row.gamma_errors.is_empty() {
                return Err(Error::config(format!(
                    "row {i}: fixture rows with zero errors must record log10_gamma1_err"
                )));
            }
            prev_c = Some(c);
        }
        Ok(())
    }

    /// Cutoffs parsed at `ctx` precision.
    pub fn c_values(&self, ctx: &Ctx) -> Result<Vec<Float>> {
        self.rows.iter().map(|r| ctx.parse(&r.c)).collect()
    }

    /// Interval half-lengths `L = log c` parsed at `ctx` precision.
    pub fn l_values(&self, ctx: &Ctx) -> Result<Vec<Float>> {
        self.rows.iter().map(|r| ctx.parse(&r.l)).collect()
    }

    /// Minimal eigenvalues parsed at `ctx` precision.
    pub fn lambda_values(&self, ctx: &Ctx) -> Result<Vec<Float>> {
        self.rows.iter().map(|r| ctx.parse(&r.lambda_min)).collect()
    }

    /// `log10` of the first zero error per row, computed from the recorded
    /// error value (model fits regress against this quantity).
    pub fn log10_err_values(&self, ctx: &Ctx) -> Result<Vec<Float>> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let e = r.gamma_errors.first().ok_or_else(|| {
                    Error::config(format!("row {i} records no zero errors"))
                })?;
                let v = ctx.parse(e)?;
                if v <= 0 {
                    return Err(Error::config(format!(
                        "row {i}: zero error must be positive to take log10"
                    )));
                }
                Ok(v.log10())
            })
            .collect()
    }

    /// The recorded `log10_gamma1_err` column parsed at `ctx` precision.
    /// The per-prime step decomposition takes differences of exactly this
    /// column so that step sizes match the recorded table digits.
    pub fn log10_err_recorded(&self, ctx: &Ctx) -> Result<Vec<Float>> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let s = r.log10_gamma1_err.as_ref().ok_or_else(|| {
                    Error::config(format!("row {i} records no log10_gamma1_err"))
                })?;
                ctx.parse(s)
            })
            .collect()
    }
}

/// Outcome of a least-squares model fit.
#[derive(Debug, Clone)]
pub struct FitResult {
    /// Short identifier, e.g. `"M1"`, `"linear"`, `"log-periodic"`.
    pub model_id: String,
    /// Fitted parameters in the model's documented order.
    pub params: Vec<Float>,
    /// Per-point residuals `observed − predicted`.
    pub residuals: Vec<Float>,
    /// `max_i |residuals[i]|`.
    pub max_abs_residual: Float,
    /// Centered coefficient of determination `1 − SSR/SST`.  For constant
    /// observations this is 1 when the fit is exact and −∞ otherwise.
    pub r_squared: Float,
    /// `Some(max_abs_residual ≤ threshold)` when the caller supplied an
    /// acceptance threshold, `None` otherwise.
    pub pass_threshold: Option<bool>,
}

impl FitResult {
    /// Applies an acceptance threshold to the stored maximal residual.
    pub fn with_threshold(mut self, threshold: &Float) -> Self {
        self.pass_threshold = Some(self.max_abs_residual <= *threshold);
        self
    }
}

#[cfg(test)]
mod tests;
