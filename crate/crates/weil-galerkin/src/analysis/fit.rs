//! Least-squares fits of the convergence data: the eight candidate decay
//! models, the log-periodic refinement, eigenvalue power laws, Sobolev
//! exponents, and error/eigenvalue coupling regressions.

use rug::ops::{CompleteRound, Pow};
use rug::Float;

use crate::error::{Error, Result};
use crate::mpkit::Ctx;
use crate::weil_kernel::primes::prime_powers_upto;

use super::linalg::{golden_min, linear_fit, nelder_mead, ols, summarise};
use super::{FitResult, SweepDataset};

/// Straight-line least squares `y ≈ slope·x + intercept`.
///
/// Parameters are returned as `[slope, intercept]`.  Requires at least three
/// points with non-constant abscissae.
pub fn fit_linear_ls(xs: &[Float], ys: &[Float], ctx: &Ctx) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(Error::config("linear fit needs equally many xs and ys"));
    }
    if xs.len() < 3 {
        return Err(Error::config("linear fit needs at least 3 points"));
    }
    if xs.iter().all(|x| *x == xs[0]) {
        return Err(Error::config("linear fit needs non-constant abscissae"));
    }
    let design: Vec<Vec<Float>> = xs.iter().map(|x| vec![x.clone(), ctx.f(1)]).collect();
    linear_fit("linear", &design, ys, ctx)
}

/// Regressor sets for the eight two-parameter decay models.
///
/// In each case the observation is `y = log10(first zero error)` and the model
/// is `a·g(c) + b` for a model-specific growth function `g`:
/// `M1: g = L`, `M2: g = L²`, `M3: g = L·log L`, `M4: L and log L with two
/// slopes`, `M5: a·exp(bL)` (genuinely nonlinear), `M6: g = π(c)` (prime
/// count), `M7: g = ϑ(c)` (Chebyshev log-prime sum), `M8: g = #pp(c)` (prime
/// power count).
fn model_designs(
    cs: &[Float],
    ls: &[Float],
    ctx: &Ctx,
) -> Result<Vec<(String, Vec<Vec<Float>>)>> {
    let one = || ctx.f(1);
    let mut m1 = Vec::new();
    let mut m2 = Vec::new();
    let mut m3 = Vec::new();
    let mut m4 = Vec::new();
    let mut m6 = Vec::new();
    let mut m7 = Vec::new();
    let mut m8 = Vec::new();
    for (c, l) in cs.iter().zip(ls) {
        let logl = l.clone().ln();
        m1.push(vec![l.clone(), one()]);
        m2.push(vec![l.square_ref().complete(ctx.prec()), one()]);
        m3.push(vec![(l * &logl).complete(ctx.prec()), one()]);
        m4.push(vec![l.clone(), logl.clone()]);
        // Prime-arithmetic growth functions at this cutoff.
        let c_rational = c.to_rational().ok_or_else(|| {
            Error::config("cutoff must be finite to count primes below it")
        })?;
        let pps = prime_powers_upto(&c_rational);
        let mut prime_count = 0u32;
        let mut theta = ctx.zero();
        for pp in &pps {
            if pp.k == 1 {
                prime_count += 1;
                theta += ctx.f(pp.p).ln();
            }
        }
        m6.push(vec![ctx.f(prime_count), one()]);
        m7.push(vec![theta, one()]);
        m8.push(vec![ctx.f(pps.len() as u32), one()]);
    }
    Ok(vec![
        ("M1".to_string(), m1),
        ("M2".to_string(), m2),
        ("M3".to_string(), m3),
        ("M4".to_string(), m4),
        ("M6".to_string(), m6),
        ("M7".to_string(), m7),
        ("M8".to_string(), m8),
    ])
}

/// Fits the eight smooth-convergence models in `log10`-error space and flags
/// each against the 0.5-digit acceptance threshold.
///
/// Results are ordered `M1..M8`; parameters are `[a, b]` throughout (for M4
/// these are the two slopes, for M5 the amplitude and rate).
pub fn fit_models(ds: &SweepDataset, ctx: &Ctx) -> Result<Vec<FitResult>> {
    if ds.rows.len() < 8 {
        return Err(Error::config(format!(
            "model comparison needs at least 8 rows, got {}",
            ds.rows.len()
        )));
    }
    let cs = ds.c_values(ctx)?;
    let ls = ds.l_values(ctx)?;
    let ys = ds.log10_err_values(ctx)?;
    let threshold = ctx.f(0.5);

    let mut results = Vec::with_capacity(8);
    for (id, design) in model_designs(&cs, &ls, ctx)? {
        results.push(linear_fit(&id, &design, &ys, ctx)?.with_threshold(&threshold));
    }
    let m5 = fit_exponential(&ls, &ys, ctx)?.with_threshold(&threshold);
    // Keep canonical M1..M8 ordering (M5 was computed after the linear ones).
    results.insert(4, m5);
    Ok(results)
}

/// Nonlinear fit of `y ≈ a·exp(b·L)` by variable projection: for each rate
/// `b` the optimal amplitude is `a(b) = Σ y·E / Σ E²` with `E = exp(bL)`, so
/// only `b` is searched (coarse grid on [0.001, 3], then golden refinement).
fn fit_exponential(ls: &[Float], ys: &[Float], ctx: &Ctx) -> Result<FitResult> {
    let sum_sq = |b: &Float| -> (Float, Float) {
        let es: Vec<Float> = ls.iter().map(|l| (l * b).complete(ctx.prec()).exp()).collect();
        let mut num = ctx.zero();
        let mut den = ctx.zero();
        for (y, e) in ys.iter().zip(&es) {
            num += (y * e).complete(ctx.prec());
            den += e.square_ref().complete(ctx.prec());
        }
        let a = num / den;
        let mut ss = ctx.zero();
        for (y, e) in ys.iter().zip(&es) {
            let pred = (&a * e).complete(ctx.prec());
            ss += (y - pred).square();
        }
        (ss, a)
    };

    let lo = ctx.f(0.001);
    let hi = ctx.f(3);
    let steps = 600u32;
    let width = (&hi - &lo).complete(ctx.prec()) / steps;
    let mut best_b = lo.clone();
    let mut best_ss = sum_sq(&lo).0;
    for i in 1..=steps {
        let b = lo.clone() + (&width * i).complete(ctx.prec());
        let ss = sum_sq(&b).0;
        if ss < best_ss {
            best_ss = ss;
            best_b = b;
        }
    }
    let bracket_lo = (&best_b - &width).complete(ctx.prec()).max(&lo);
    let bracket_hi = (&best_b + &width).complete(ctx.prec()).min(&hi);
    let b = golden_min(|b| sum_sq(b).0, &bracket_lo, &bracket_hi, 180, ctx);
    let (_, a) = sum_sq(&b);

    let residuals: Vec<Float> = ls
        .iter()
        .zip(ys)
        .map(|(l, y)| y - (l * &b).complete(ctx.prec()).exp() * &a)
        .collect();
    Ok(summarise("M5", vec![a, b], residuals, ys, ctx))
}

/// Evaluates the log-periodic model `a·L + b + A·sin(ω·L + φ)` at `l`.
pub fn log_periodic_predict(params: &[Float], l: &Float, ctx: &Ctx) -> Result<Float> {
    if params.len() != 5 {
        return Err(Error::config("log-periodic model has 5 parameters (a, b, A, omega, phi)"));
    }
    let [a, b, amp, omega, phi] = [&params[0], &params[1], &params[2], &params[3], &params[4]];
    let phase = (omega * l).complete(ctx.prec()) + phi.clone();
    Ok((a * l).complete(ctx.prec()) + b.clone() + phase.sin() * amp)
}

/// Fits the log-periodic refinement `y ≈ aL + b + A sin(ωL + φ)` in
/// `log10`-error space.
///
/// The linear parameters `(a, b, A)` are solved exactly for any `(ω, φ)` by
/// least squares, so the search runs a deterministic Nelder–Mead simplex over
/// `(ω, φ)` only, multi-started from 16 log-spaced frequencies on `[0.5, 10]`
/// (each seeded with the best of four quarter-turn phases).  The result is
/// canonicalised to `A ≥ 0`, `φ ∈ [0, 2π)`.  Parameters are returned as
/// `[a, b, A, ω, φ]`.
pub fn fit_log_periodic(ds: &SweepDataset, ctx: &Ctx) -> Result<FitResult> {
    if ds.rows.len() < 7 {
        return Err(Error::config(format!(
            "log-periodic fit needs at least 7 rows, got {}",
            ds.rows.len()
        )));
    }
    let ls = ds.l_values(ctx)?;
    let ys = ds.log10_err_values(ctx)?;

    // Squared-residual objective after projecting out (a, b, A).
    let projected = |omega: &Float, phi: &Float| -> Option<(Float, Vec<Float>)> {
        if !omega.is_finite() || !phi.is_finite() || *omega <= 0 {
            return None;
        }
        let design: Vec<Vec<Float>> = ls
            .iter()
            .map(|l| {
                let phase = (omega * l).complete(ctx.prec()) + phi.clone();
                vec![l.clone(), ctx.f(1), phase.sin()]
            })
            .collect();
        let beta = ols(&design, &ys, ctx).ok()?;
        let mut ss = ctx.zero();
        for (row, y) in design.iter().zip(&ys) {
            let mut pred = ctx.zero();
            for (x, b) in row.iter().zip(&beta) {
                pred += (x * b).complete(ctx.prec());
            }
            ss += (y - pred).square();
        }
        Some((ss, beta))
    };

    let pi = ctx.pi();
    let tol = ctx.decade(-(ctx.dps() as i32 / 2));
    let mut best: Option<(Float, Float, Float)> = None; // (ss, omega, phi)
    for i in 0..16u32 {
        // omega = 0.5 * 20^(i/15), log-spaced over [0.5, 10].
        let omega0 = ctx.f(0.5) * ctx.f(20).pow(ctx.f(i) / ctx.f(15u32));
        let mut phi0 = ctx.zero();
        let mut phi_ss: Option<Float> = None;
        for q in 0..4u32 {
            let phi = (&pi * q).complete(ctx.prec()) / 2u32;
            if let Some((ss, _)) = projected(&omega0, &phi) {
                if phi_ss.as_ref().map_or(true, |b| ss < *b) {
                    phi_ss = Some(ss);
                    phi0 = phi;
                }
            }
        }
        let start = [omega0.clone(), phi0];
        let steps = [ctx.f(0.1) * &omega0, ctx.f(0.3)];
        let (point, ss) = nelder_mead(
            |p| projected(&p[0], &p[1]).map(|(ss, _)| ss),
            &start,
            &steps,
            400,
            &tol,
            ctx,
        );
        if ss.is_finite() && best.as_ref().map_or(true, |(b, _, _)| ss < *b) {
            best = Some((ss, point[0].clone(), point[1].clone()));
        }
    }
    let (_, omega, phi) = best.ok_or_else(|| {
        Error::numerical("log-periodic fit found no admissible frequency")
    })?;
    let (_, beta) = projected(&omega, &phi)
        .ok_or_else(|| Error::numerical("log-periodic fit lost its optimum on re-solve"))?;
    let (a, b, mut amp) = (beta[0].clone(), beta[1].clone(), beta[2].clone());

    // Canonical form: positive amplitude, phase in [0, 2pi).
    let mut phi = phi;
    if amp < 0 {
        amp = -amp;
        phi += &pi;
    }
    let two_pi = pi.clone() * 2u32;
    let turns = (phi.clone() / &two_pi).floor();
    phi -= turns * &two_pi;

    let params = vec![a, b, amp, omega, phi];
    let residuals: Vec<Float> = ls
        .iter()
        .zip(&ys)
        .map(|(l, y)| Ok(y - log_periodic_predict(&params, l, ctx)?))
        .collect::<Result<_>>()?;
    Ok(summarise("log-periodic", params, residuals, &ys, ctx))
}

/// A two-parameter power law `t ≈ amplitude · c^exponent` for the magnitude
/// `t = |log10 λ_min|`, fit by least squares in log–log space.
#[derive(Debug, Clone)]
pub struct PowerLawFit {
    pub amplitude: Float,
    pub exponent: Float,
    /// Root-mean-square deviation of `t` (in orders of magnitude, i.e. in the
    /// original `t` scale, not log–log space).
    pub rms: Float,
    pub points_used: usize,
}

/// Fits `|log10 λ_min| ≈ A·c^B` over the rows selected by `keep`.
pub fn power_law_refit<F>(ds: &SweepDataset, keep: F, ctx: &Ctx) -> Result<PowerLawFit>
where
    F: Fn(usize, &super::SweepRow) -> bool,
{
    let cs = ds.c_values(ctx)?;
    let lams = ds.lambda_values(ctx)?;
    let mut lnc = Vec::new();
    let mut lnt = Vec::new();
    let mut ts = Vec::new();
    for (i, row) in ds.rows.iter().enumerate() {
        if !keep(i, row) {
            continue;
        }
        let t = lams[i].clone().log10().abs();
        if t.is_zero() || !t.is_finite() {
            return Err(Error::numerical(format!(
                "power-law refit needs |log10 lambda_min| > 0 at row {i}"
            )));
        }
        lnc.push(cs[i].clone().ln());
        lnt.push(t.clone().ln());
        ts.push(t);
    }
    if ts.len() < 3 {
        return Err(Error::config(format!(
            "power-law refit needs at least 3 selected rows, got {}",
            ts.len()
        )));
    }
    let design: Vec<Vec<Float>> = lnc.iter().map(|x| vec![x.clone(), ctx.f(1)]).collect();
    let beta = ols(&design, &lnt, ctx)?;
    let exponent = beta[0].clone();
    let amplitude = beta[1].clone().exp();
    let mut ss = ctx.zero();
    for (x, t) in lnc.iter().zip(&ts) {
        let pred = (x * &exponent).complete(ctx.prec()).exp() * &amplitude;
        ss += (t - pred).square();
    }
    let rms = (ss / ctx.f(ts.len() as u32)).sqrt();
    Ok(PowerLawFit {
        amplitude,
        exponent,
        rms,
        points_used: ts.len(),
    })
}

/// Evaluates a [`PowerLawFit`] at cutoff `c`.
pub fn power_law_predict(fit: &PowerLawFit, c: &Float, _ctx: &Ctx) -> Float {
    let mut v = c.clone().ln();
    v *= &fit.exponent;
    v.exp() * &fit.amplitude
}

/// Sobolev-exponent estimate from an eigenvalue-vs-dimension series.
#[derive(Debug, Clone)]
pub struct SobolevFit {
    /// Estimated smoothness exponent `s = −slope/2`.
    pub s: Float,
    /// Slope of `log10 λ` against `log10 N`.
    pub slope: Float,
    pub intercept: Float,
    pub r_squared: Float,
}

/// Regresses `log10 λ_min` on `log10 N` and reads the Sobolev exponent off
/// the slope (`λ ~ N^{−2s}`).  Needs at least three distinct dimensions.
pub fn sobolev_exponent(points: &[(u32, Float)], ctx: &Ctx) -> Result<SobolevFit> {
    if points.len() < 3 {
        return Err(Error::config("Sobolev estimate needs at least 3 (N, lambda) points"));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (n, lam) in points {
        if *n < 2 {
            return Err(Error::config("Sobolev estimate needs dimensions N >= 2"));
        }
        if !(lam.is_finite() && *lam > 0) {
            return Err(Error::config("Sobolev estimate needs positive eigenvalues"));
        }
        xs.push(ctx.f(*n).log10());
        ys.push(lam.clone().log10());
    }
    let fit = fit_linear_ls(&xs, &ys, ctx)?;
    let slope = fit.params[0].clone();
    Ok(SobolevFit {
        s: -slope.clone() / 2u32,
        slope,
        intercept: fit.params[1].clone(),
        r_squared: fit.r_squared,
    })
}

/// Per-row ratios `gamma1_err / lambda_min` (the error/eigenvalue coupling).
pub fn coupling_ratios(ds: &SweepDataset, ctx: &Ctx) -> Result<Vec<Float>> {
    let lams = ds.lambda_values(ctx)?;
    ds.rows
        .iter()
        .zip(&lams)
        .enumerate()
        .map(|(i, (row, lam))| {
            let e = row.gamma_errors.first().ok_or_else(|| {
                Error::config(format!("row {i} records no zero errors"))
            })?;
            if lam.is_zero() {
                return Err(Error::numerical(format!("row {i}: lambda_min is zero")));
            }
            Ok(ctx.parse(e)? / lam.clone())
        })
        .collect()
}

/// Regresses the coupling ratio `gamma1_err/λ_min` on `log c`.
/// Parameters are `[slope, intercept]`.
pub fn ratio_coupling_fit(ds: &SweepDataset, ctx: &Ctx) -> Result<FitResult> {
    let ratios = coupling_ratios(ds, ctx)?;
    let ls = ds.l_values(ctx)?;
    let mut fit = fit_linear_ls(&ls, &ratios, ctx)?;
    fit.model_id = "coupling".to_string();
    Ok(fit)
}

/// One pairwise comparison of error and eigenvalue decay rates.
#[derive(Debug, Clone)]
pub struct LogRatioRow {
    /// Row indices being compared (earlier, later).
    pub rows: (usize, usize),
    /// `log10(err_i / err_j)`.
    pub log_err_ratio: Float,
    /// `log10(λ_i / λ_j)`.
    pub log_lambda_ratio: Float,
    /// Ratio of the two, ≈ 1 when the error tracks the eigenvalue.
    pub ratio_of_logs: Float,
}

/// Tabulates decade ratios for the requested row pairs.
pub fn log_ratio_table(
    ds: &SweepDataset,
    pairs: &[(usize, usize)],
    ctx: &Ctx,
) -> Result<Vec<LogRatioRow>> {
    let errs = ds.log10_err_values(ctx)?;
    let lams = ds.lambda_values(ctx)?;
    let mut out = Vec::with_capacity(pairs.len());
    for &(i, j) in pairs {
        if i >= ds.rows.len() || j >= ds.rows.len() || i == j {
            return Err(Error::config(format!("invalid row pair ({i}, {j})")));
        }
        let log_err_ratio = (&errs[i] - &errs[j]).complete(ctx.prec());
        let log_lambda_ratio =
            lams[i].clone().log10() - lams[j].clone().log10();
        if log_lambda_ratio.is_zero() {
            return Err(Error::numerical(format!(
                "rows {i} and {j} have equal eigenvalue magnitudes"
            )));
        }
        let ratio_of_logs = log_err_ratio.clone() / &log_lambda_ratio;
        out.push(LogRatioRow {
            rows: (i, j),
            log_err_ratio,
            log_lambda_ratio,
            ratio_of_logs,
        });
    }
    Ok(out)
}

/// Decay-rate comparison for the `k`-th zero against the first.
#[derive(Debug, Clone)]
pub struct ZeroRate {
    /// 1-based zero index.
    pub k: usize,
    /// OLS slope of `log10 err_k` against `log10 err_1`, `None` when fewer
    /// than three rows record this zero.
    pub slope: Option<Float>,
    pub r_squared: Option<Float>,
    pub rows_used: usize,
}

/// Measures how fast each higher zero's error decays relative to the first
/// zero's, as the slope in joint `log10` space across the dataset rows.
pub fn multi_zero_rates(ds: &SweepDataset, ctx: &Ctx) -> Result<Vec<ZeroRate>> {
    let max_k = ds.rows.iter().map(|r| r.gamma_errors.len()).max().unwrap_or(0);
    if max_k == 0 {
        return Err(Error::config("dataset records no zero errors"));
    }
    let mut out = Vec::with_capacity(max_k);
    for k in 0..max_k {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for row in &ds.rows {
            let (Some(e1), Some(ek)) = (row.gamma_errors.first(), row.gamma_errors.get(k)) else {
                continue;
            };
            let e1 = ctx.parse(e1)?;
            let ek = ctx.parse(ek)?;
            if e1 <= 0 || ek <= 0 {
                continue;
            }
            xs.push(e1.log10());
            ys.push(ek.log10());
        }
        let rows_used = xs.len();
        if rows_used < 3 {
            out.push(ZeroRate {
                k: k + 1,
                slope: None,
                r_squared: None,
                rows_used,
            });
            continue;
        }
        let fit = fit_linear_ls(&xs, &ys, ctx)?;
        out.push(ZeroRate {
            k: k + 1,
            slope: Some(fit.params[0].clone()),
            r_squared: Some(fit.r_squared),
            rows_used,
        });
    }
    Ok(out)
}
