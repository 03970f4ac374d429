//! Bracketed root location: sign-change scanning over a sampled function
//! and Illinois-style refinement with a guaranteed bisection fallback.

use super::Ctx;
use crate::error::{Error, Result};
use rug::Float;
use std::cmp::Ordering;

fn sign_of(y: &Float, what: &str) -> Result<Ordering> {
    y.cmp0().ok_or_else(|| {
        Error::numerical(format!("{what} evaluated to NaN during root location"))
    })
}

/// Scan parallel samples `(xs[i], ys[i])` of a function for sign changes.
/// Returns the bracketing intervals `(xs[i], xs[i+1])` of every consecutive
/// pair with strictly opposite signs, plus a degenerate bracket `(x, x)`
/// wherever a sample is exactly zero, in ascending order.
pub fn scan_sign_changes(xs: &[Float], ys: &[Float]) -> Result<Vec<(Float, Float)>> {
    if xs.len() != ys.len() {
        return Err(Error::config(format!(
            "sample mismatch: {} abscissae vs {} values",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::config(
            "need at least two samples to scan for sign changes".to_string(),
        ));
    }
    for w in xs.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::config(
                "sample abscissae must be strictly ascending".to_string(),
            ));
        }
    }
    let mut out = Vec::new();
    let mut signs = Vec::with_capacity(ys.len());
    for y in ys {
        signs.push(sign_of(y, "sample")?);
    }
    for i in 0..ys.len() {
        if signs[i] == Ordering::Equal {
            out.push((xs[i].clone(), xs[i].clone()));
        } else if i + 1 < ys.len()
            && signs[i + 1] != Ordering::Equal
            && signs[i] != signs[i + 1]
        {
            out.push((xs[i].clone(), xs[i + 1].clone()));
        }
    }
    Ok(out)
}

/// Refine a root of `f` inside the bracket `[a, b]` (where `f(a)` and `f(b)`
/// have opposite signs) until the bracket width is at most `tol`, or until
/// the bracket can no longer shrink at working precision. Uses the Illinois
/// variant of regula falsi with a forced bisection every fourth step, so the
/// bracket width is guaranteed to contract. The result always lies inside
/// the original bracket.
pub fn refine_root<F>(mut f: F, a: &Float, b: &Float, tol: &Float, ctx: &Ctx) -> Result<Float>
where
    F: FnMut(&Float) -> Result<Float>,
{
    let prec = ctx.prec();
    if !tol.is_finite() || !(*tol > 0) {
        return Err(Error::config(
            "root tolerance must be a finite positive number".to_string(),
        ));
    }
    if a > b {
        return Err(Error::config(
            "root bracket must satisfy a <= b".to_string(),
        ));
    }
    let mut lo = Float::with_val(prec, a);
    let mut hi = Float::with_val(prec, b);
    if lo == hi {
        return Ok(lo);
    }
    let mut flo = f(&lo)?;
    let mut fhi = f(&hi)?;
    let slo = sign_of(&flo, "function")?;
    let shi = sign_of(&fhi, "function")?;
    if slo == Ordering::Equal {
        return Ok(lo);
    }
    if shi == Ordering::Equal {
        return Ok(hi);
    }
    if slo == shi {
        return Err(Error::numerical(
            "no sign change across the supplied root bracket".to_string(),
        ));
    }

    // Track which endpoint the previous step retained, for the Illinois
    // down-weighting that prevents one-sided stalls.
    let mut retained_lo = false;
    let mut retained_hi = false;
    for iter in 0u64..200_000 {
        let width = Float::with_val(prec, &hi - &lo);
        if width <= *tol {
            break;
        }
        let mid = Float::with_val(prec, &lo + &hi) / 2u32;
        if mid <= lo || mid >= hi {
            // Adjacent floats: the working precision floor is reached.
            break;
        }
        let x = if iter % 4 == 3 {
            mid
        } else {
            // False-position point; fall back to the midpoint when it
            // degenerates onto an endpoint.
            let denom = Float::with_val(prec, &fhi - &flo);
            if denom.is_zero() {
                mid
            } else {
                let cand = Float::with_val(prec, &hi - Float::with_val(prec, &fhi * &width) / denom);
                if cand <= lo || cand >= hi {
                    mid
                } else {
                    cand
                }
            }
        };
        let fx = f(&x)?;
        let sx = sign_of(&fx, "function")?;
        if sx == Ordering::Equal {
            return Ok(x);
        }
        if sx == slo {
            lo = x;
            flo = fx;
            if retained_hi {
                fhi /= 2u32; // Illinois: relax the stale endpoint value
            }
            retained_hi = true;
            retained_lo = false;
        } else {
            hi = x;
            fhi = fx;
            if retained_lo {
                flo /= 2u32;
            }
            retained_lo = true;
            retained_hi = false;
        }
    }
    Ok(Float::with_val(prec, &lo + &hi) / 2u32)
}
