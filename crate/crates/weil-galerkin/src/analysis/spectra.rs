//! Spectral statistics: polynomial unfolding of an eigenvalue bulk,
//! maximum-likelihood Brody-parameter fits, and Kolmogorov–Smirnov distances
//! against the classical spacing families.

use rug::ops::{CompleteRound, Pow};
use rug::Float;

use crate::error::{Error, Result};
use crate::mpkit::Ctx;

use super::linalg::{golden_min, mean, ols};

/// Unfolds an ascending eigenvalue bulk to unit mean spacing.
///
/// A degree-`degree` polynomial is least-squares fitted to the empirical
/// counting function (`N(λ_i) = i − 1/2`), the eigenvalues are mapped through
/// it, and the resulting spacings are normalised so their mean is exactly 1.
/// Needs at least `degree + 2` eigenvalues in non-decreasing order and a
/// non-degenerate spread.
pub fn unfold_spectrum(bulk: &[Float], degree: usize, ctx: &Ctx) -> Result<Vec<Float>> {
    let n = bulk.len();
    if degree == 0 {
        return Err(Error::config("unfolding needs polynomial degree >= 1"));
    }
    if n < degree + 2 {
        return Err(Error::config(format!(
            "unfolding at degree {degree} needs at least {} eigenvalues, got {n}",
            degree + 2
        )));
    }
    for w in bulk.windows(2) {
        if w[1] < w[0] {
            return Err(Error::config("unfolding needs eigenvalues in ascending order"));
        }
    }
    let lo = &bulk[0];
    let hi = &bulk[n - 1];
    let span = (hi - lo).complete(ctx.prec());
    if span.is_zero() {
        return Err(Error::config("unfolding needs a non-degenerate eigenvalue spread"));
    }

    // Map the bulk affinely onto [-1, 1] so the monomial normal equations
    // stay well-conditioned, then fit N(λ) = Σ a_k u^k.
    let us: Vec<Float> = bulk
        .iter()
        .map(|x| {
            let mut u = (x - lo).complete(ctx.prec());
            u *= 2u32;
            u / &span - ctx.f(1)
        })
        .collect();
    let design: Vec<Vec<Float>> = us
        .iter()
        .map(|u| {
            let mut row = Vec::with_capacity(degree + 1);
            let mut p = ctx.f(1);
            for _ in 0..=degree {
                row.push(p.clone());
                p *= u;
            }
            row
        })
        .collect();
    let counts: Vec<Float> = (0..n).map(|i| ctx.f(i as u32) + ctx.f(0.5)).collect();
    let coeff = ols(&design, &counts, ctx)?;

    let mapped: Vec<Float> = design
        .iter()
        .map(|row| {
            let mut s = ctx.zero();
            for (x, a) in row.iter().zip(&coeff) {
                s += (x * a).complete(ctx.prec());
            }
            s
        })
        .collect();
    let spacings: Vec<Float> = mapped
        .windows(2)
        .map(|w| (&w[1] - &w[0]).complete(ctx.prec()))
        .collect();
    let m = mean(&spacings, ctx);
    if m.is_zero() {
        return Err(Error::numerical("unfolded spacings have zero mean"));
    }
    Ok(spacings.into_iter().map(|s| s / &m).collect())
}

/// Maximum-likelihood Brody parameter of a positive spacing sample.
///
/// The Brody density `p(s) = (β+1)·a·s^β·exp(−a·s^{β+1})` with
/// `a = Γ((β+2)/(β+1))^{β+1}` interpolates Poisson (β = 0) and
/// Wigner–GOE (β = 1) statistics; the MLE is found by golden-section search
/// on β ∈ [0, 1].  Needs at least 20 strictly positive spacings.
pub fn brody_fit(spacings: &[Float], ctx: &Ctx) -> Result<Float> {
    if spacings.len() < 20 {
        return Err(Error::config(format!(
            "Brody fit needs at least 20 spacings, got {}",
            spacings.len()
        )));
    }
    if spacings.iter().any(|s| !(s.is_finite() && *s > 0)) {
        return Err(Error::config("Brody fit needs strictly positive spacings"));
    }
    let n = ctx.f(spacings.len() as u32);
    let sum_ln: Float = {
        let mut acc = ctx.zero();
        for s in spacings {
            acc += s.clone().ln();
        }
        acc
    };
    // Negative log-likelihood up to a constant, as a function of beta.
    let nll = |beta: &Float| -> Float {
        let bp1 = beta.clone() + 1u32;
        let bp2 = beta.clone() + 2u32;
        let a = (bp2 / &bp1).gamma().pow(&bp1);
        let mut sum_pow = ctx.zero();
        for s in spacings {
            sum_pow += (s.clone().ln() * &bp1).exp();
        }
        let ll = n.clone() * (bp1.clone().ln() + a.clone().ln()) + (beta * &sum_ln).complete(ctx.prec())
            - a * sum_pow;
        -ll
    };
    Ok(golden_min(nll, &ctx.zero(), &ctx.f(1), 120, ctx))
}

/// Classical nearest-neighbour spacing families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpacingFamily {
    /// Uncorrelated levels: `F(s) = 1 − exp(−s)`.
    Poisson,
    /// Wigner surmise for the orthogonal ensemble:
    /// `F(s) = 1 − exp(−πs²/4)`.
    Goe,
    /// Wigner surmise for the unitary ensemble:
    /// `F(s) = erf(2s/√π) − (4s/π)·exp(−4s²/π)`.
    Gue,
}

impl SpacingFamily {
    /// Cumulative distribution of the unit-mean spacing density.
    pub fn cdf(self, s: &Float, ctx: &Ctx) -> Float {
        if *s <= 0 {
            return ctx.zero();
        }
        match self {
            SpacingFamily::Poisson => ctx.f(1) - (-s.clone()).exp(),
            SpacingFamily::Goe => {
                let e = -(ctx.pi() * s.square_ref().complete(ctx.prec())) / 4u32;
                ctx.f(1) - e.exp()
            }
            SpacingFamily::Gue => {
                let pi = ctx.pi();
                let erf_arg = ctx.f(2) * s / pi.clone().sqrt();
                let gauss = (-(ctx.f(4) * s.square_ref().complete(ctx.prec())) / &pi).exp();
                erf_arg.erf() - ctx.f(4) * s * gauss / &pi
            }
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SpacingFamily::Poisson => "Poisson",
            SpacingFamily::Goe => "GOE",
            SpacingFamily::Gue => "GUE",
        }
    }
}

/// Two-sided Kolmogorov–Smirnov distance between an empirical spacing sample
/// and a family CDF: `max_i max(|i/n − F(x_i)|, |F(x_i) − (i−1)/n|)` over the
/// sorted sample.
pub fn ks_distance(spacings: &[Float], family: SpacingFamily, ctx: &Ctx) -> Result<Float> {
    if spacings.is_empty() {
        return Err(Error::config("KS distance needs a non-empty sample"));
    }
    if spacings.iter().any(|s| !s.is_finite()) {
        return Err(Error::config("KS distance needs finite spacings"));
    }
    let mut sorted = spacings.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values compare"));
    let n = ctx.f(sorted.len() as u32);
    let mut d = ctx.zero();
    for (i, x) in sorted.iter().enumerate() {
        let f = family.cdf(x, ctx);
        let hi = ctx.f((i + 1) as u32) / &n - &f;
        let lo = f - ctx.f(i as u32) / &n;
        for cand in [hi.abs(), lo.abs()] {
            if cand > d {
                d = cand;
            }
        }
    }
    Ok(d)
}
