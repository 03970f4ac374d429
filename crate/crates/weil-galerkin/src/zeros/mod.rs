//! The even-sector Fourier–Mellin test function of an eigenvector, location
//! of its real zeros, and scoring against embedded reference zeros.
//!
//! The k-th even basis mode on `[0, L]` transforms, centered symmetrically
//! about `L/2`, into a combination of stable phase integrals at frequencies
//! `γ ± 2πk/L`. Summing against an eigenvector gives a real, even function
//! `F(γ)` whose positive zeros approximate the ordinates of the
//! corresponding L-function when the eigenvector is a near-null ground
//! state.

#[cfg(test)]
mod tests;

use crate::error::{Error, Result};
use crate::mpkit::{refine_root, scan_sign_changes, stable_phase_integral, Ctx};
use crate::weil_kernel::{CharacterKind, CharacterSpec, CutoffSpec};
use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

/// Schema tag of the embedded reference-zeros data file.
pub const REFERENCE_SCHEMA: &str = "reference-zeros/1";

const REFERENCE_DATA: &str = include_str!("reference_zeros.json");

/// Which L-function a reference table belongs to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReferenceKind {
    Zeta,
    Dirichlet {
        modulus: u32,
        character_digest: String,
    },
}

/// A table of high-precision zero ordinates, stored as decimal strings so
/// no precision is fixed at load time.
#[derive(Clone, Debug)]
pub struct ReferenceZeros {
    kind: ReferenceKind,
    values: Vec<String>,
    provenance: String,
}

#[derive(Serialize, Deserialize)]
struct ReferenceFile {
    schema: String,
    sets: Vec<ReferenceSet>,
}

#[derive(Serialize, Deserialize)]
struct ReferenceSet {
    kind: String,
    #[serde(default)]
    modulus: Option<u32>,
    #[serde(default)]
    character_digest: Option<String>,
    provenance: String,
    values: Vec<String>,
}

fn significant_digits_str(s: &str) -> usize {
    s.chars().filter(|c| c.is_ascii_digit()).count()
}

impl ReferenceZeros {
    /// Load the embedded reference table for a character, or a config error
    /// when none is shipped for it.
    pub fn embedded(character: &CharacterSpec) -> Result<ReferenceZeros> {
        let file: ReferenceFile = serde_json::from_str(REFERENCE_DATA)?;
        if file.schema != REFERENCE_SCHEMA {
            return Err(Error::config(format!(
                "embedded reference data has schema {}, expected {REFERENCE_SCHEMA}",
                file.schema
            )));
        }
        for set in file.sets {
            let matched = match character.kind() {
                CharacterKind::Zeta => set.kind == "zeta",
                CharacterKind::Dirichlet => {
                    set.kind == "dirichlet"
                        && set.modulus == Some(character.modulus())
                        && set.character_digest.as_deref() == Some(character.digest().as_str())
                }
            };
            if matched {
                return ReferenceZeros::validated(set);
            }
        }
        Err(Error::config(
            "no embedded reference zeros for this character",
        ))
    }

    fn validated(set: ReferenceSet) -> Result<ReferenceZeros> {
        let kind = match set.kind.as_str() {
            "zeta" => ReferenceKind::Zeta,
            "dirichlet" => ReferenceKind::Dirichlet {
                modulus: set
                    .modulus
                    .ok_or_else(|| Error::config("dirichlet reference set lacks a modulus"))?,
                character_digest: set.character_digest.clone().ok_or_else(|| {
                    Error::config("dirichlet reference set lacks a character digest")
                })?,
            },
            other => {
                return Err(Error::config(format!(
                    "unknown reference-zeros kind {other:?}"
                )))
            }
        };
        if set.values.is_empty() {
            return Err(Error::config("reference-zeros table is empty"));
        }
        let ctx = Ctx::new(40)?;
        let mut prev = ctx.zero();
        for (k, s) in set.values.iter().enumerate() {
            if significant_digits_str(s) < 400 {
                return Err(Error::config(format!(
                    "reference ordinate {k} has fewer than 400 digits"
                )));
            }
            let x = ctx.parse(s)?;
            if !(x > prev) {
                return Err(Error::config(
                    "reference ordinates must be strictly ascending and positive",
                ));
            }
            prev = x;
        }
        Ok(ReferenceZeros {
            kind,
            values: set.values,
            provenance: set.provenance,
        })
    }

    #[cfg(test)]
    pub(crate) fn from_parts(
        kind: ReferenceKind,
        values: Vec<String>,
        provenance: String,
    ) -> ReferenceZeros {
        ReferenceZeros {
            kind,
            values,
            provenance,
        }
    }

    pub fn kind(&self) -> &ReferenceKind {
        &self.kind
    }

    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn raw_value(&self, k: usize) -> &str {
        &self.values[k]
    }

    pub fn significant_digits(&self, k: usize) -> usize {
        significant_digits_str(&self.values[k])
    }

    /// The k-th ordinate parsed at working precision.
    pub fn value(&self, k: usize, ctx: &Ctx) -> Result<Float> {
        ctx.parse(&self.values[k])
    }
}

/// Zeros extracted from one eigenvector, with optional reference scoring.
#[derive(Clone, Debug)]
pub struct ZeroReport {
    spec: CutoffSpec,
    gammas: Vec<Float>,
    abs_errors: Vec<Float>,
    matching_digits: Vec<i64>,
    fm_slopes: Vec<Float>,
    /// True when fewer sign changes than requested were found in the window.
    partial: bool,
}

impl ZeroReport {
    pub fn spec(&self) -> &CutoffSpec {
        &self.spec
    }

    pub fn gammas(&self) -> &[Float] {
        &self.gammas
    }

    /// Absolute errors against the reference table; empty until scored.
    pub fn abs_errors(&self) -> &[Float] {
        &self.abs_errors
    }

    /// floor(−log₁₀ error) per zero; empty until scored.
    pub fn matching_digits(&self) -> &[i64] {
        &self.matching_digits
    }

    /// F′ at each zero (centered finite difference).
    pub fn fm_slopes(&self) -> &[Float] {
        &self.fm_slopes
    }

    pub fn partial(&self) -> bool {
        self.partial
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }
}

/// Centered Fourier–Mellin transform M_k(γ) of the k-th even basis mode
/// over `[0, L]`: real, even in γ, expressed through stable phase integrals
/// at `γ ± 2πk/L`.
pub fn mellin_mode_transform(k: usize, gamma: &Float, l: &Float, ctx: &Ctx) -> Result<Float> {
    if !(*l > 0u32) {
        return Err(Error::config("mode transform requires L > 0"));
    }
    let prec = ctx.prec();
    let half = Float::with_val(prec, l / 2u32);
    if k == 0 {
        let phi = stable_phase_integral(gamma, &half, ctx);
        let num = Float::with_val(prec, phi.real() * 2u32);
        return Ok(num / l.clone().sqrt());
    }
    let omega = Float::with_val(prec, ctx.pi() * 2u32) * ctx.f(k as u64) / l;
    let beta_minus = Float::with_val(prec, gamma - &omega);
    let beta_plus = Float::with_val(prec, gamma + &omega);
    let phi_minus = stable_phase_integral(&beta_minus, &half, ctx);
    let phi_plus = stable_phase_integral(&beta_plus, &half, ctx);
    let mut sum = Float::with_val(prec, phi_minus.real() + phi_plus.real());
    if k % 2 == 1 {
        sum = -sum;
    }
    let norm = (ctx.f(2u32) / l).sqrt();
    Ok(sum * norm)
}

/// F(γ) = Σ_k v_k · M_k(γ) for an even-sector eigenvector `v`.
pub fn f_even(gamma: &Float, v: &[Float], l: &Float, ctx: &Ctx) -> Result<Float> {
    if v.is_empty() {
        return Err(Error::config("eigenvector must be nonempty"));
    }
    let prec = ctx.prec();
    let mut acc = ctx.zero();
    for (k, vk) in v.iter().enumerate() {
        let m = mellin_mode_transform(k, gamma, l, ctx)?;
        acc += Float::with_val(prec, vk * &m);
    }
    Ok(acc)
}

/// Locate the first `count` positive zeros of `F` in `window` by sampling at
/// `step`, bracketing sign changes, and refining each bracket to `tol`.
/// Slopes are centered finite differences at `h = 10^(−dps/4)`. When fewer
/// than `count` brackets exist the report is returned partial.
pub fn extract_zeros(
    spec: &CutoffSpec,
    v: &[Float],
    count: usize,
    window: (&Float, &Float),
    step: &Float,
    tol: &Float,
) -> Result<ZeroReport> {
    if count == 0 {
        return Err(Error::config("zero count must be at least 1"));
    }
    let (lo, hi) = window;
    if !(*lo > 0u32) || !(hi > lo) {
        return Err(Error::config(
            "scan window must satisfy 0 < lo < hi (zeros are real and positive)",
        ));
    }
    if !(*step > 0u32) {
        return Err(Error::config("scan step must be positive"));
    }
    let ctx = spec.ctx()?;
    let prec = ctx.prec();
    let l = spec.l(&ctx);
    let approx_steps = Float::with_val(prec, hi - lo) / step;
    if approx_steps.to_f64() > 200_000.0 {
        return Err(Error::config(
            "scan grid would exceed 200000 samples; widen the step",
        ));
    }

    let mut xs = Vec::new();
    let mut x = lo.clone();
    while x <= *hi {
        xs.push(x.clone());
        x += step;
    }
    let ys = xs
        .par_iter()
        .map(|g| f_even(g, v, &l, &ctx))
        .collect::<Result<Vec<Float>>>()?;
    let brackets = scan_sign_changes(&xs, &ys)?;
    let partial = brackets.len() < count;

    let h = ctx.decade(-((spec.dps() / 4) as i32));
    let two_h = Float::with_val(prec, &h * &ctx.f(2u32));
    let mut gammas = Vec::new();
    let mut slopes = Vec::new();
    for (a, b) in brackets.into_iter().take(count) {
        let gamma = refine_root(|g| f_even(g, v, &l, &ctx), &a, &b, tol, &ctx)?;
        let right = Float::with_val(prec, &gamma + &h);
        let left = Float::with_val(prec, &gamma - &h);
        let df = Float::with_val(prec, f_even(&right, v, &l, &ctx)? - f_even(&left, v, &l, &ctx)?);
        let slope = df / &two_h;
        if slope.is_zero() {
            return Err(Error::numerical(format!(
                "vanishing F' at reported zero near {gamma}"
            )));
        }
        gammas.push(gamma);
        slopes.push(slope);
    }

    Ok(ZeroReport {
        spec: spec.clone(),
        gammas,
        abs_errors: Vec::new(),
        matching_digits: Vec::new(),
        fm_slopes: slopes,
        partial,
    })
}

/// Score a single zero against one reference string: the absolute error and
/// floor(−log₁₀ error). Errors at or below the reference's own resolution
/// are rejected rather than silently truncated.
pub(crate) fn score_one(gamma: &Float, reference: &str, ctx: &Ctx) -> Result<(Float, i64)> {
    let prec = ctx.prec();
    let r = ctx.parse(reference)?;
    let err = Float::with_val(prec, gamma - &r).abs();
    let digits = significant_digits_str(reference);
    let guard = ctx.decade(-(digits.saturating_sub(5) as i32));
    if err < guard {
        return Err(Error::numerical(format!(
            "zero agrees with its reference to within the reference's own \
             resolution ({digits} digits); a longer reference is required"
        )));
    }
    // floor(−log₁₀ err), snapped to the nearest integer when the error is a
    // clean power of ten (so an error of exactly 1e−55 scores 55, not 54).
    let d = -err.clone().log10();
    let nearest = d.clone().round();
    let snap = Float::with_val(prec, &d - &nearest).abs();
    let scored = if snap <= ctx.decade(-20) {
        nearest
    } else {
        d.floor()
    };
    Ok((err, scored.to_f64() as i64))
}

/// Score a report in place against a reference table, filling `abs_errors`
/// and `matching_digits`, and return the digit counts.
pub fn matching_digits(report: &mut ZeroReport, refs: &ReferenceZeros) -> Result<Vec<i64>> {
    let ctx = report.spec.ctx()?;
    if refs.count() < report.gammas.len() {
        return Err(Error::config(format!(
            "reference table has {} ordinates but the report holds {} zeros",
            refs.count(),
            report.gammas.len()
        )));
    }
    let mut errors = Vec::with_capacity(report.gammas.len());
    let mut digits = Vec::with_capacity(report.gammas.len());
    for (k, gamma) in report.gammas.iter().enumerate() {
        let (err, d) = score_one(gamma, refs.raw_value(k), &ctx)?;
        errors.push(err);
        digits.push(d);
    }
    report.abs_errors = errors;
    report.matching_digits = digits.clone();
    Ok(digits)
}
