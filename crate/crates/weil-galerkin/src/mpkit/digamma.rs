//! Complex digamma via upward recurrence plus the Stirling asymptotic
//! series with exact Bernoulli-number coefficients.

use super::Ctx;
use crate::error::{Error, Result};
use once_cell::sync::Lazy;
use rug::{Complex, Float, Integer, Rational};
use std::sync::Mutex;

/// Cache of Bernoulli numbers B_0, B_1, B_2, ... as exact rationals.
static BERNOULLI: Lazy<Mutex<Vec<Rational>>> = Lazy::new(|| {
    Mutex::new(vec![
        Rational::from(1),
        Rational::from((-1, 2)),
    ])
});

/// B_n as an exact rational, extending the cache as needed via the
/// recurrence sum_{j=0}^{m} C(m+1, j) B_j = 0.
pub fn bernoulli(n: usize) -> Rational {
    let mut cache = BERNOULLI.lock().expect("bernoulli cache poisoned");
    while cache.len() <= n {
        let m = cache.len();
        let mut acc = Rational::new();
        for (j, bj) in cache.iter().enumerate() {
            let binom = Integer::from(m as u32 + 1).binomial(j as u32);
            acc += bj * Rational::from(binom);
        }
        acc /= -Rational::from(m as u32 + 1);
        cache.push(acc);
    }
    cache[n].clone()
}

/// Digamma Ψ(z) for complex z, to relative error within a small multiple
/// of `10^-dps`. Errors on the poles z = 0, -1, -2, ...
pub fn digamma_complex(z: &Complex, ctx: &Ctx) -> Result<Complex> {
    let prec = ctx.prec();
    if z.imag().is_zero() && z.real().is_integer() && *z.real() <= 0 {
        return Err(Error::numerical(format!(
            "digamma pole at non-positive integer z = {}",
            z.real()
        )));
    }

    // Upward recurrence Ψ(z) = Ψ(z+1) - 1/z until |z| clears the
    // Stirling switch radius.
    let radius = 10.0f64.max(0.4 * ctx.dps() as f64);
    let mut zz = Complex::with_val(prec, z);
    let mut acc = Complex::with_val(prec, 0);
    loop {
        let m = Float::with_val(prec, zz.abs_ref());
        if m > radius {
            break;
        }
        acc -= Complex::with_val(prec, zz.recip_ref());
        zz += 1u32;
    }

    // Stirling: Ψ(z) ≈ ln z - 1/(2z) - Σ_{k≥1} B_{2k} / (2k · z^{2k}),
    // truncated at the target tolerance (or the smallest term).
    let lnz = Complex::with_val(prec, zz.ln_ref());
    let mut s = lnz;
    s -= Complex::with_val(prec, zz.recip_ref()) / 2u32;
    let z2inv = {
        let z2 = Complex::with_val(prec, zz.square_ref());
        Complex::with_val(prec, z2.recip_ref())
    };
    let tol = ctx.decade(-((ctx.dps() + super::GUARD_DIGITS) as i32));
    let target = Float::with_val(prec, s.abs_ref()) * &tol;
    let mut zpow = z2inv.clone();
    let mut last_mag = Float::with_val(prec, f64::INFINITY);
    for k in 1..10_000usize {
        let b = bernoulli(2 * k);
        let coeff = Rational::from((b.numer().clone(), b.denom() * Integer::from(2 * k)));
        let term = Complex::with_val(prec, &zpow) * Float::with_val(prec, coeff);
        let mag = Float::with_val(prec, term.abs_ref());
        if mag > last_mag {
            // Past the optimal truncation point of the asymptotic series;
            // the switch radius guarantees we are already below contract.
            break;
        }
        s -= &term;
        if mag < target {
            break;
        }
        last_mag = mag;
        zpow *= &z2inv;
    }
    Ok(s + acc)
}
