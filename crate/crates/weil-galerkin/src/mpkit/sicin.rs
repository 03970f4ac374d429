//! Sine integral Si(x) and the entire cosine integral
//! Cin(x) = ∫₀ˣ (1 - cos t)/t dt = γ + ln|x| - Ci(|x|).
//!
//! Small and moderate |x| use the convergent power series evaluated with a
//! precision boost proportional to |x| (the series alternates with terms up
//! to ~e^|x| before decaying, so ~0.4343·|x| digits cancel). Large |x| uses
//! the divergent asymptotic expansions for the auxiliary functions f, g,
//! whose optimal truncation error ~e^{-|x|} is below target once
//! |x| ≥ ln(10)·(dps + 20).

use super::{Ctx, GUARD_DIGITS, LOG2_10};
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

/// Si(x), odd in x.
pub fn si(x: &Float, ctx: &Ctx) -> Float {
    cos_integral_cin_pair(x, ctx).0
}

/// Cin(x), even in x, Cin(0) = 0.
pub fn cin(x: &Float, ctx: &Ctx) -> Float {
    cos_integral_cin_pair(x, ctx).1
}

/// (Si(x), Cin(x)) computed together, sharing the series/asymptotic work.
pub fn cos_integral_cin_pair(x: &Float, ctx: &Ctx) -> (Float, Float) {
    let prec = ctx.prec();
    if x.is_zero() {
        return (Float::new(prec), Float::new(prec));
    }
    let neg = x.is_sign_negative();
    let ax = Float::with_val(prec, x.abs_ref());

    let switch = ctx.ln10() * (ctx.dps() + 20);
    let (si_abs, cin_abs) = if ax >= switch {
        pair_asymptotic(&ax, ctx)
    } else {
        pair_series(&ax, ctx)
    };
    let si_val = if neg { -si_abs } else { si_abs };
    (si_val, cin_abs)
}

/// Convergent series at boosted precision (x > 0).
fn pair_series(x: &Float, ctx: &Ctx) -> (Float, Float) {
    let boost_digits = (0.4342944819032518 * x.to_f64() + 10.0).ceil();
    let prec2 = ctx.prec() + (boost_digits * LOG2_10).ceil() as u32;
    let xx = Float::with_val(prec2, x);
    let mx2 = -Float::with_val(prec2, xx.square_ref());
    let target = Float::with_val(prec2, 10u32).pow(-((ctx.dps() + GUARD_DIGITS + 5) as i32));

    // Si  = Σ_{k≥0} (-1)^k x^{2k+1} / ((2k+1)(2k+1)!)   with p_k = (-1)^k x^{2k+1}/(2k+1)!
    // Cin = Σ_{k≥1} (-1)^{k+1} x^{2k} / ((2k)(2k)!)      with c_k = (-1)^{k+1} x^{2k}/(2k)!
    let mut p = xx.clone();
    let mut si_sum = xx.clone();
    let mut c = Float::with_val(prec2, xx.square_ref()) / 2u32;
    let mut cin_sum = Float::with_val(prec2, &c / 2u32);
    for k in 1u32..200_000 {
        p *= &mx2;
        p /= 2 * k;
        p /= 2 * k + 1;
        si_sum += Float::with_val(prec2, &p / (2 * k + 1));

        c *= &mx2;
        c /= 2 * k + 1;
        c /= 2 * k + 2;
        cin_sum += Float::with_val(prec2, &c / (2 * k + 2));

        if Float::with_val(prec2, p.abs_ref()) < target
            && Float::with_val(prec2, c.abs_ref()) < target
        {
            break;
        }
    }
    (
        Float::with_val(ctx.prec(), si_sum),
        Float::with_val(ctx.prec(), cin_sum),
    )
}

/// Asymptotic expansion (x large and positive):
/// f ~ Σ (-1)^k (2k)!  / x^{2k+1},  g ~ Σ (-1)^k (2k+1)! / x^{2k+2},
/// Si = π/2 - f cos x - g sin x,  Ci = f sin x - g cos x,
/// Cin = γ + ln x - Ci.
fn pair_asymptotic(x: &Float, ctx: &Ctx) -> (Float, Float) {
    let prec = ctx.prec();
    let x2inv = Float::with_val(prec, x.square_ref()).recip();
    let target = ctx.decade(-((ctx.dps() + GUARD_DIGITS) as i32));

    let mut f_term = Float::with_val(prec, x.recip_ref());
    let mut g_term = Float::with_val(prec, &f_term / x);
    let mut f = f_term.clone();
    let mut g = g_term.clone();
    let mut last = Float::with_val(prec, f64::INFINITY);
    for k in 1u64..100_000 {
        f_term *= &x2inv;
        f_term *= -Float::with_val(prec, (2 * k) * (2 * k - 1));
        g_term *= &x2inv;
        g_term *= -Float::with_val(prec, (2 * k + 1) * (2 * k));
        let mag = Float::with_val(prec, f_term.abs_ref());
        if mag > last {
            break;
        }
        f += &f_term;
        g += &g_term;
        if mag < target {
            break;
        }
        last = mag;
    }

    let (sinx, cosx) = Float::with_val(prec, x).sin_cos(Float::new(prec));
    let si_val =
        ctx.pi() / 2u32 - Float::with_val(prec, &f * &cosx) - Float::with_val(prec, &g * &sinx);
    let ci = Float::with_val(prec, &f * &sinx) - Float::with_val(prec, &g * &cosx);
    let cin_val = Float::with_val(prec, Constant::Euler) + Float::with_val(prec, x.ln_ref()) - ci;
    (si_val, cin_val)
}
