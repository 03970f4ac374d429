//! Small dense linear-algebra and statistics helpers shared by the analysis
//! operations: normal-equation least squares, Pearson correlation, population
//! moments, and a deterministic Nelder–Mead simplex minimiser.
//!
//! Everything works on `rug::Float` at the caller's precision.  The systems
//! involved are tiny (≤ 6 unknowns), so Gaussian elimination with partial
//! pivoting on the normal equations is accurate at working precisions far
//! beyond double.

use rug::ops::CompleteRound;
use rug::Float;

use crate::error::{Error, Result};
use crate::mpkit::Ctx;

use super::FitResult;

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
/// `a` is row-major and consumed; `b` is consumed.
pub(crate) fn solve_dense(mut a: Vec<Vec<Float>>, mut b: Vec<Float>, ctx: &Ctx) -> Result<Vec<Float>> {
    let n = a.len();
    if b.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::config("linear system dimensions are inconsistent"));
    }
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row][col].clone().abs() > a[pivot][col].clone().abs() {
                pivot = row;
            }
        }
        if a[pivot][col].is_zero() {
            return Err(Error::numerical(
                "singular normal equations: regressors are linearly dependent",
            ));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = (&a[row][col] / &a[col][col]).complete(ctx.prec());
            if factor.is_zero() {
                continue;
            }
            for k in col..n {
                let t = (&factor * &a[col][k]).complete(ctx.prec());
                a[row][k] -= t;
            }
            let t = factor * &b[col];
            b[row] -= t;
        }
    }
    let mut x = vec![ctx.zero(); n];
    for col in (0..n).rev() {
        let mut s = b[col].clone();
        for k in col + 1..n {
            let t = (&a[col][k] * &x[k]).complete(ctx.prec());
            s -= t;
        }
        x[col] = s / &a[col][col];
    }
    Ok(x)
}

/// Ordinary least squares via the normal equations.
///
/// `design[i]` is the regressor row for observation `i`; returns the
/// coefficient vector minimising `Σ (y_i − design_i · β)²`.
pub(crate) fn ols(design: &[Vec<Float>], ys: &[Float], ctx: &Ctx) -> Result<Vec<Float>> {
    let n = design.len();
    if n == 0 || ys.len() != n {
        return Err(Error::config("least squares needs matching, non-empty inputs"));
    }
    let p = design[0].len();
    if p == 0 || design.iter().any(|row| row.len() != p) {
        return Err(Error::config("design matrix rows must share a positive width"));
    }
    if n < p {
        return Err(Error::config(format!(
            "least squares needs at least {p} observations, got {n}"
        )));
    }
    let mut ata = vec![vec![ctx.zero(); p]; p];
    let mut atb = vec![ctx.zero(); p];
    for (row, y) in design.iter().zip(ys) {
        for j in 0..p {
            for k in j..p {
                let t = (&row[j] * &row[k]).complete(ctx.prec());
                ata[j][k] += t;
            }
            let t = (&row[j] * y).complete(ctx.prec());
            atb[j] += t;
        }
    }
    for j in 0..p {
        for k in 0..j {
            ata[j][k] = ata[k][j].clone();
        }
    }
    solve_dense(ata, atb, ctx)
}

/// Packages an OLS solution as a [`FitResult`] with residual diagnostics.
pub(crate) fn linear_fit(
    model_id: &str,
    design: &[Vec<Float>],
    ys: &[Float],
    ctx: &Ctx,
) -> Result<FitResult> {
    let params = ols(design, ys, ctx)?;
    let predictions: Vec<Float> = design
        .iter()
        .map(|row| {
            let mut s = ctx.zero();
            for (x, b) in row.iter().zip(&params) {
                s += (x * b).complete(ctx.prec());
            }
            s
        })
        .collect();
    let residuals: Vec<Float> = ys
        .iter()
        .zip(&predictions)
        .map(|(y, p)| (y - p).complete(ctx.prec()))
        .collect();
    Ok(summarise(model_id, params, residuals, ys, ctx))
}

/// Builds the shared residual summary (max |r| and centered R²).
pub(crate) fn summarise(
    model_id: &str,
    params: Vec<Float>,
    residuals: Vec<Float>,
    ys: &[Float],
    ctx: &Ctx,
) -> FitResult {
    let mut max_abs = ctx.zero();
    let mut ssr = ctx.zero();
    for r in &residuals {
        let a = r.clone().abs();
        if a > max_abs {
            max_abs = a;
        }
        ssr += r.square_ref().complete(ctx.prec());
    }
    let ybar = mean(ys, ctx);
    let mut sst = ctx.zero();
    for y in ys {
        sst += (y - &ybar).complete(ctx.prec()).square();
    }
    let r_squared = if sst.is_zero() {
        if ssr.is_zero() {
            ctx.f(1)
        } else {
            ctx.f(f64::NEG_INFINITY)
        }
    } else {
        ctx.f(1) - ssr / sst
    };
    FitResult {
        model_id: model_id.to_string(),
        params,
        residuals,
        max_abs_residual: max_abs,
        r_squared,
        pass_threshold: None,
    }
}

pub(crate) fn mean(xs: &[Float], ctx: &Ctx) -> Float {
    let mut s = ctx.zero();
    for x in xs {
        s += x;
    }
    s / ctx.f(xs.len() as u32)
}

/// Population standard deviation (divide by `n`, not `n − 1`).
pub(crate) fn population_std(xs: &[Float], ctx: &Ctx) -> Float {
    let m = mean(xs, ctx);
    let mut s = ctx.zero();
    for x in xs {
        s += (x - &m).complete(ctx.prec()).square();
    }
    (s / ctx.f(xs.len() as u32)).sqrt()
}

/// Pearson correlation coefficient of two equal-length samples.
pub(crate) fn pearson(xs: &[Float], ys: &[Float], ctx: &Ctx) -> Result<Float> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::config("correlation needs two samples of equal length >= 2"));
    }
    let mx = mean(xs, ctx);
    let my = mean(ys, ctx);
    let mut sxy = ctx.zero();
    let mut sxx = ctx.zero();
    let mut syy = ctx.zero();
    for (x, y) in xs.iter().zip(ys) {
        let dx = (x - &mx).complete(ctx.prec());
        let dy = (y - &my).complete(ctx.prec());
        sxy += (&dx * &dy).complete(ctx.prec());
        sxx += dx.square();
        syy += dy.square();
    }
    let denom = (sxx * syy).sqrt();
    if denom.is_zero() {
        return Err(Error::numerical("correlation undefined: a sample is constant"));
    }
    Ok(sxy / denom)
}

/// Deterministic Nelder–Mead minimisation of `f` starting from `start`.
///
/// Standard coefficients (reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2); the initial simplex perturbs each coordinate by the matching
/// entry of `steps`.  Runs `max_iter` iterations or until the simplex spread
/// (in both value and vertex distance) falls below `tol`.  The objective may
/// return `None` to mark a forbidden region (treated as +∞).
pub(crate) fn nelder_mead<F>(
    f: F,
    start: &[Float],
    steps: &[Float],
    max_iter: usize,
    tol: &Float,
    ctx: &Ctx,
) -> (Vec<Float>, Float)
where
    F: Fn(&[Float]) -> Option<Float>,
{
    let dim = start.len();
    let eval = |p: &[Float]| -> Float {
        match f(p) {
            Some(v) if v.is_finite() => v,
            _ => ctx.f(f64::INFINITY),
        }
    };
    let mut simplex: Vec<Vec<Float>> = Vec::with_capacity(dim + 1);
    simplex.push(start.to_vec());
    for i in 0..dim {
        let mut p = start.to_vec();
        p[i] += &steps[i];
        simplex.push(p);
    }
    let mut values: Vec<Float> = simplex.iter().map(|p| eval(p)).collect();

    for _ in 0..max_iter {
        // Order vertices by value (stable selection keeps ties deterministic).
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];

        // Convergence: value spread and simplex diameter both below tol.
        let spread = (&values[worst] - &values[best]).complete(ctx.prec()).abs();
        let mut diam = ctx.zero();
        for i in 0..dim {
            let d = (&simplex[worst][i] - &simplex[best][i]).complete(ctx.prec()).abs();
            if d > diam {
                diam = d;
            }
        }
        if values[best].is_finite() && spread < *tol && diam < *tol {
            break;
        }

        // Centroid of all vertices except the worst.
        let mut centroid = vec![ctx.zero(); dim];
        for (idx, p) in simplex.iter().enumerate() {
            if idx == worst {
                continue;
            }
            for i in 0..dim {
                centroid[i] += &p[i];
            }
        }
        for c in centroid.iter_mut() {
            *c /= ctx.f(dim as u32);
        }

        let blend = |alpha: &Float| -> Vec<Float> {
            // centroid + alpha * (centroid - worst)
            (0..dim)
                .map(|i| {
                    let dir = (&centroid[i] - &simplex[worst][i]).complete(ctx.prec());
                    centroid[i].clone() + dir * alpha
                })
                .collect()
        };

        let reflected = blend(&ctx.f(1));
        let fr = eval(&reflected);
        if fr < values[best] {
            let expanded = blend(&ctx.f(2));
            let fe = eval(&expanded);
            if fe < fr {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
        } else if fr < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = fr;
        } else {
            let contracted = if fr < values[worst] {
                blend(&ctx.f(0.5))
            } else {
                blend(&ctx.f(-0.5))
            };
            let fc = eval(&contracted);
            if fc < values[worst].clone().min(&fr) {
                simplex[worst] = contracted;
                values[worst] = fc;
            } else {
                // Shrink towards the best vertex.
                let anchor = simplex[best].clone();
                for (idx, p) in simplex.iter_mut().enumerate() {
                    if idx == best {
                        continue;
                    }
                    for i in 0..dim {
                        let mid = (&anchor[i] + &p[i]).complete(ctx.prec()) / 2u32;
                        p[i] = mid;
                    }
                    values[idx] = eval(p);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=dim {
        if values[i] < values[best] {
            best = i;
        }
    }
    (simplex[best].clone(), values[best].clone())
}

/// Golden-section search minimising `f` on `[lo, hi]`.
pub(crate) fn golden_min<F>(f: F, lo: &Float, hi: &Float, iters: usize, ctx: &Ctx) -> Float
where
    F: Fn(&Float) -> Float,
{
    // invphi = (sqrt(5) - 1) / 2
    let invphi = (ctx.f(5).sqrt() - ctx.f(1)) / 2u32;
    let mut a = lo.clone();
    let mut b = hi.clone();
    let mut c = b.clone() - (&b - &a).complete(ctx.prec()) * &invphi;
    let mut d = a.clone() + (&b - &a).complete(ctx.prec()) * &invphi;
    let mut fc = f(&c);
    let mut fd = f(&d);
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b.clone() - (&b - &a).complete(ctx.prec()) * &invphi;
            fc = f(&c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a.clone() + (&b - &a).complete(ctx.prec()) * &invphi;
            fd = f(&d);
        }
    }
    (a + b) / 2u32
}
