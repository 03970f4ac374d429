//! Sequence acceleration, the closed-form eigenvalue predictor, and the
//! precision-floor classifier.

use rug::ops::{CompleteRound, Pow};
use rug::Float;

use crate::error::{Error, Result};
use crate::mpkit::Ctx;

/// Aitken Δ² extrapolation of three consecutive sequence values:
/// `x0 − (x1 − x0)² / ((x2 − x1) − (x1 − x0))`.
///
/// Exact on geometric sequences.  Fails when the two consecutive differences
/// are equal (zero denominator), which happens exactly for arithmetic input.
pub fn aitken(x0: &Float, x1: &Float, x2: &Float, ctx: &Ctx) -> Result<Float> {
    let d1 = (x1 - x0).complete(ctx.prec());
    let d2 = (x2 - x1).complete(ctx.prec());
    let denom = d2 - &d1;
    if denom.is_zero() {
        return Err(Error::numerical(
            "Aitken acceleration undefined: consecutive differences are equal",
        ));
    }
    Ok(x0.clone() - d1.square() / denom)
}

/// Diagnostics of a four-term extrapolation.
#[derive(Debug, Clone)]
pub struct AitkenReport {
    /// `|Δ₂/Δ₁|` and `|Δ₃/Δ₂|` — near-constant ratios indicate geometric
    /// convergence, where Aitken anchors are trustworthy.
    pub ratios: [Float; 2],
    /// Aitken limits of the two overlapping triples.
    pub anchors: [Float; 2],
}

/// Consecutive difference ratios and both overlapping Aitken anchors of a
/// four-term sequence.
pub fn aitken_report(x: &[Float; 4], ctx: &Ctx) -> Result<AitkenReport> {
    let d1 = (&x[1] - &x[0]).complete(ctx.prec());
    let d2 = (&x[2] - &x[1]).complete(ctx.prec());
    let d3 = (&x[3] - &x[2]).complete(ctx.prec());
    if d1.is_zero() || d2.is_zero() {
        return Err(Error::numerical(
            "difference ratios undefined: a consecutive difference is zero",
        ));
    }
    let r1 = (&d2 / &d1).complete(ctx.prec()).abs();
    let r2 = (&d3 / &d2).complete(ctx.prec()).abs();
    let a1 = aitken(&x[0], &x[1], &x[2], ctx)?;
    let a2 = aitken(&x[1], &x[2], &x[3], ctx)?;
    Ok(AitkenReport {
        ratios: [r1, r2],
        anchors: [a1, a2],
    })
}

/// Term-by-term breakdown of the closed-form predictor.
#[derive(Debug, Clone)]
pub struct PredictionBreakdown {
    /// `log10(2^14 · √2 · π^5 / 3)` — the constant prefactor.
    pub prefactor: Float,
    /// `−4πc / ln 10` — the dominant linear decay.
    pub main_term: Float,
    /// `(9/2) · log10 c` — the polynomial correction.
    pub correction: Float,
    /// Sum of the three terms: the predicted `log10 λ_min`.
    pub total: Float,
}

/// Closed-form continuum prediction of `log10 λ_min` at cutoff `c > 1`:
/// `log10(2^14·√2·π^5/3) − 4πc/ln 10 + (9/2)·log10 c`.
pub fn connes_64_breakdown(c: &Float, ctx: &Ctx) -> Result<PredictionBreakdown> {
    if !(c.is_finite() && *c > 1) {
        return Err(Error::config(
            "eigenvalue predictor needs a cutoff c > 1 (the asymptotic regime)",
        ));
    }
    let pi = ctx.pi();
    let prefactor = (ctx.f(2).pow(14u32) * ctx.f(2).sqrt() * pi.clone().pow(5u32) / 3u32).log10();
    let main_term = -(ctx.f(4) * &pi * c) / ctx.ln10();
    let correction = ctx.f(9) * c.clone().log10() / 2u32;
    let total = prefactor.clone() + &main_term + &correction;
    Ok(PredictionBreakdown {
        prefactor,
        main_term,
        correction,
        total,
    })
}

/// The predictor's total only; see [`connes_64_breakdown`].
pub fn connes_64_prediction(c: &Float, ctx: &Ctx) -> Result<Float> {
    Ok(connes_64_breakdown(c, ctx)?.total)
}

/// Estimated numerical floor of an eigenvalue computed at `dps` decimal
/// digits on a matrix of Frobenius norm `q_norm`: `10^(−dps) · q_norm`.
pub fn floor_estimate(dps: u32, q_norm: &Float, ctx: &Ctx) -> Result<Float> {
    if !(q_norm.is_finite() && *q_norm > 0) {
        return Err(Error::config("floor estimate needs a positive matrix norm"));
    }
    Ok(ctx.decade(-(dps as i32)) * q_norm)
}

/// Verdict bins for the precision-floor audit.
///
/// `delta` is `log10(λ at high precision) − log10(λ at working precision)`;
/// a genuine eigenvalue is precision-independent (`delta ≈ 0`) while a
/// precision artifact tracks the floor downward (`delta ≪ 0`).  Boundaries
/// belong to the lower bin (each interval is closed on the right).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FloorBin {
    /// `delta ≤ −15`: the working-precision value was pure artifact.
    Artifact,
    /// `−15 < delta ≤ −5.29`: ambiguous partial floor.
    Ambiguous,
    /// `−5.29 < delta ≤ −1`: a live (converging) eigenvalue with visible
    /// floor contamination.
    LiveContaminated,
    /// `−1 < delta ≤ 0`: a stable eigenvalue.
    Stable,
    /// `delta > 0`: the eigenvalue grew at higher precision (reversal).
    Reversal,
}

impl FloorBin {
    /// Human-readable bin label.
    pub fn label(self) -> &'static str {
        match self {
            FloorBin::Artifact => "artifact floor",
            FloorBin::Ambiguous => "ambiguous partial floor",
            FloorBin::LiveContaminated => "live, floor-contaminated",
            FloorBin::Stable => "stable",
            FloorBin::Reversal => "reversal",
        }
    }

    /// 1-based bin position, most artifact-like first.
    pub fn bin_index(self) -> usize {
        match self {
            FloorBin::Artifact => 1,
            FloorBin::Ambiguous => 2,
            FloorBin::LiveContaminated => 3,
            FloorBin::Stable => 4,
            FloorBin::Reversal => 5,
        }
    }
}

/// Classifies a precision-retest shift `delta = log10 λ_high − log10 λ_work`.
pub fn classify_floor(delta: &Float) -> Result<FloorBin> {
    if !delta.is_finite() {
        return Err(Error::config("floor classification needs a finite delta"));
    }
    // Thresholds are decimal constants; parse at the input's precision.
    let prec = delta.prec().max(64);
    let at = |s: &str| Float::with_val(prec, Float::parse(s).expect("fixed threshold literal"));
    Ok(if *delta <= at("-15") {
        FloorBin::Artifact
    } else if *delta <= at("-5.29") {
        FloorBin::Ambiguous
    } else if *delta <= at("-1") {
        FloorBin::LiveContaminated
    } else if *delta <= at("0") {
        FloorBin::Stable
    } else {
        FloorBin::Reversal
    })
}
