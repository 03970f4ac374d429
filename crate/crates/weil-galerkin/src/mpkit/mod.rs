//! Arbitrary-precision numeric primitives: precision context, complex
//! digamma, stable oscillatory kernels, fixed-node tanh–sinh quadrature,
//! sine/cosine integrals, and bracketed root finding.
//!
//! Everything here is pure given `(inputs, ctx)`; contexts are immutable
//! and cheap to clone, so values may be computed concurrently.

mod digamma;
mod grid;
mod phase;
mod roots;
mod sicin;

pub use digamma::digamma_complex;
pub use grid::{build_grid, integrate_on_grid, QuadratureGrid};
pub use phase::{phase_series_terms, stable_phase_integral, stable_phase_integral_1};
pub use roots::{refine_root, scan_sign_changes};
pub use sicin::{cin, cos_integral_cin_pair, si};

use crate::error::{Error, Result};
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};

/// Extra decimal digits carried internally beyond the requested `dps`,
/// absorbing roundoff accumulated across long sums and Jacobi sweeps.
pub const GUARD_DIGITS: u32 = 15;

const LOG2_10: f64 = 3.321928094887362;

/// Working-precision context ("make_context"): decimal digits requested plus
/// the derived binary precision and unit-roundoff proxy `eps = 10^-dps`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ctx {
    dps: u32,
    prec: u32,
}

impl Ctx {
    /// Create a context with `dps` decimal digits. Rejects `dps < 30`,
    /// which is below any regime the numerics are calibrated for.
    pub fn new(dps: u32) -> Result<Self> {
        if dps < 30 {
            return Err(Error::config(format!(
                "precision dps={dps} is below the minimum of 30"
            )));
        }
        let prec = (((dps + GUARD_DIGITS) as f64) * LOG2_10).ceil() as u32 + 2;
        Ok(Ctx { dps, prec })
    }

    pub fn dps(&self) -> u32 {
        self.dps
    }

    /// Binary working precision (includes the guard digits).
    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Unit-roundoff proxy: exactly the decade `10^-dps`.
    pub fn eps(&self) -> Float {
        Float::with_val(self.prec, 10u32).pow(-(self.dps as i32))
    }

    /// A context with doubled decimal precision (for precision-doubling checks).
    pub fn doubled(&self) -> Ctx {
        Ctx::new(self.dps * 2).expect("doubled dps is always >= 30")
    }

    pub fn zero(&self) -> Float {
        Float::with_val(self.prec, 0)
    }

    pub fn f<T>(&self, v: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.prec, v)
    }

    /// Parse a decimal string at full working precision.
    pub fn parse(&self, s: &str) -> Result<Float> {
        Float::parse(s)
            .map(|p| Float::with_val(self.prec, p))
            .map_err(|e| Error::config(format!("cannot parse '{s}' as a real number: {e}")))
    }

    pub fn complex(&self, re: Float, im: Float) -> Complex {
        Complex::with_val(self.prec, (re, im))
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.prec, Constant::Pi)
    }

    pub fn ln_pi(&self) -> Float {
        self.pi().ln()
    }

    pub fn euler_gamma(&self) -> Float {
        Float::with_val(self.prec, Constant::Euler)
    }

    pub fn ln2(&self) -> Float {
        Float::with_val(self.prec, Constant::Log2)
    }

    pub fn ln10(&self) -> Float {
        self.f(10u32).ln()
    }

    /// 10^k as a Float at working precision.
    pub fn decade(&self, k: i32) -> Float {
        Float::with_val(self.prec, 10u32).pow(k)
    }
}

/// Decimal-digit agreement between two values: floor(-log10 |x - y|).
/// Returns `None` when they are equal to working precision.
pub fn agreement_digits(x: &Float, y: &Float) -> Option<i64> {
    let d = Float::with_val(x.prec().max(y.prec()), x - y).abs();
    if d.is_zero() {
        None
    } else {
        let l = -d.log10();
        Some(l.to_f64().floor() as i64)
    }
}
