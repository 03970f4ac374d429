//! Stable evaluation of the oscillatory phase integrals
//!
//! ```text
//! phi (β, L) = ∫₀ᴸ e^{iβt} dt          = (e^{iβL} - 1) / (iβ)
//! phi1(β, L) = ∫₀ᴸ (t/L) e^{iβt} dt    = (1 + iβL - e^{iβL}) / (β²L)
//! ```
//!
//! Both are entire in β but their closed forms cancel catastrophically as
//! β → 0, so below a precision-dependent threshold they switch to short
//! Taylor series in βL. The two branches agree far below working epsilon
//! at the seam.

use super::Ctx;
use rug::ops::Pow;
use rug::{Complex, Float};

/// Number of Taylor terms used in the small-argument branch.
pub fn phase_series_terms(dps: u32) -> usize {
    let t = (dps as usize).div_ceil(40) + 3;
    t.max(5)
}

/// Threshold on |βL| below which the series branch is used: 10^(-dps/4).
fn series_threshold(ctx: &Ctx) -> Float {
    Float::with_val(ctx.prec(), 10u32).pow(-(ctx.dps() as f64) / 4.0)
}

/// `phi(β, L) = (e^{iβL} - 1)/(iβ)`, stable for all real β including β = 0
/// (where it equals L).
pub fn stable_phase_integral(beta: &Float, l: &Float, ctx: &Ctx) -> Complex {
    let prec = ctx.prec();
    let u = Float::with_val(prec, beta * l);
    let au = Float::with_val(prec, u.abs_ref());
    if au < series_threshold(ctx) {
        // phi = L · Σ_{k≥0} (iβL)^k / (k+1)!
        let iu = Complex::with_val(prec, (0, &u));
        let mut term = Complex::with_val(prec, l);
        let mut acc = term.clone();
        for k in 1..phase_series_terms(ctx.dps()) {
            term *= &iu;
            term /= (k + 1) as u32;
            acc += &term;
        }
        acc
    } else {
        // Re = sin(βL)/β, Im = 2 sin²(βL/2)/β — no cancellation.
        let re = Float::with_val(prec, u.sin_ref()) / beta;
        let half_sin = Float::with_val(prec, u.clone() / 2u32).sin();
        let im = Float::with_val(prec, half_sin.square_ref()) * 2u32 / beta;
        Complex::with_val(prec, (re, im))
    }
}

/// `phi1(β, L) = (1 + iβL - e^{iβL})/(β²L)`, stable for all real β
/// including β = 0 (where it equals L/2).
pub fn stable_phase_integral_1(beta: &Float, l: &Float, ctx: &Ctx) -> Complex {
    let prec = ctx.prec();
    let u = Float::with_val(prec, beta * l);
    let au = Float::with_val(prec, u.abs_ref());
    if au < series_threshold(ctx) {
        // phi1 = L · Σ_{j≥0} (iβL)^j / (j+2)!
        let iu = Complex::with_val(prec, (0, &u));
        let mut term = Complex::with_val(prec, l);
        term /= 2u32;
        let mut acc = term.clone();
        for j in 1..(phase_series_terms(ctx.dps()) + 2) {
            term *= &iu;
            term /= (j + 2) as u32;
            acc += &term;
        }
        acc
    } else {
        let b2l = Float::with_val(prec, beta.square_ref()) * l;
        let half_sin = Float::with_val(prec, u.clone() / 2u32).sin();
        let re = Float::with_val(prec, half_sin.square_ref()) * 2u32 / &b2l;
        let im = (u.clone() - Float::with_val(prec, u.sin_ref())) / &b2l;
        Complex::with_val(prec, (re, im))
    }
}
