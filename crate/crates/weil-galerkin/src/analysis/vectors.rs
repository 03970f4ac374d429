//! Eigenvector geometry: normalised overlaps between ground vectors at
//! different cutoffs, decay-law fits for those overlaps, and principal
//! component analysis of vector families.

use rug::ops::CompleteRound;
use rug::Float;

use crate::error::{Error, Result};
use crate::galerkin::eigensym_rows;
use crate::mpkit::Ctx;

use super::linalg::ols;

fn dot(v: &[Float], w: &[Float], ctx: &Ctx) -> Float {
    let mut s = ctx.zero();
    for (a, b) in v.iter().zip(w) {
        s += (a * b).complete(ctx.prec());
    }
    s
}

fn norm(v: &[Float], ctx: &Ctx) -> Float {
    let mut s = ctx.zero();
    for a in v {
        s += a.square_ref().complete(ctx.prec());
    }
    s.sqrt()
}

/// Absolute normalised overlap `|⟨v, w⟩| / (‖v‖·‖w‖)`.
///
/// The vectors must share a dimension and be non-zero.  Expanding both in the
/// same orthonormal basis makes this the geometric overlap of the underlying
/// functions regardless of cutoff.
pub fn overlap(v: &[Float], w: &[Float], ctx: &Ctx) -> Result<Float> {
    if v.len() != w.len() || v.is_empty() {
        return Err(Error::config(
            "overlap needs two non-empty vectors of equal dimension",
        ));
    }
    let nv = norm(v, ctx);
    let nw = norm(w, ctx);
    if nv.is_zero() || nw.is_zero() {
        return Err(Error::config("overlap undefined for a zero vector"));
    }
    Ok((dot(v, w, ctx) / nv / nw).abs())
}

/// Full pairwise overlap matrix; symmetric with unit diagonal.
pub fn overlap_matrix(vectors: &[Vec<Float>], ctx: &Ctx) -> Result<Vec<Vec<Float>>> {
    let m = vectors.len();
    if m < 2 {
        return Err(Error::config("overlap matrix needs at least 2 vectors"));
    }
    let mut out = vec![vec![ctx.zero(); m]; m];
    for i in 0..m {
        out[i][i] = ctx.f(1);
        for j in i + 1..m {
            let ov = overlap(&vectors[i], &vectors[j], ctx)?;
            out[i][j] = ov.clone();
            out[j][i] = ov;
        }
    }
    Ok(out)
}

/// Power-law fit of overlap deficits for one index-distance group.
#[derive(Debug, Clone)]
pub struct OverlapDecayGroup {
    /// Index distance `j − i` of the pairs in this group.
    pub gap_index: usize,
    /// Amplitude of `1 − overlap ≈ amplitude · c_min^(−exponent)`.
    pub amplitude: Float,
    pub exponent: Float,
    pub r_squared: Float,
    pub pairs_used: usize,
    /// Set when the group could not be fit meaningfully: fewer than three
    /// pairs, a deficit that is not strictly positive, or constant deficits
    /// (no trend to regress).  Fit fields are zero in that case.
    pub degenerate: bool,
}

/// Fits `1 − overlap(c_i, c_j) ≈ A · c_i^(−α)` separately for each index
/// distance `j − i`, given the overlap matrix and the ascending cutoffs.
pub fn overlap_decay_fit(
    matrix: &[Vec<Float>],
    cutoffs: &[Float],
    ctx: &Ctx,
) -> Result<Vec<OverlapDecayGroup>> {
    let m = matrix.len();
    if m < 2 || cutoffs.len() != m {
        return Err(Error::config(
            "overlap decay fit needs a square matrix with one cutoff per row",
        ));
    }
    if matrix.iter().any(|row| row.len() != m) {
        return Err(Error::config("overlap matrix must be square"));
    }
    for w in cutoffs.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::config("cutoffs must be strictly ascending"));
        }
    }
    let mut groups = Vec::new();
    for gap in 1..m {
        let mut lnc = Vec::new();
        let mut lndef = Vec::new();
        let mut usable = true;
        let pairs = m - gap;
        for i in 0..pairs {
            let deficit = (ctx.f(1) - &matrix[i][i + gap]).abs();
            if deficit.is_zero() {
                usable = false;
                break;
            }
            lnc.push(cutoffs[i].clone().ln());
            lndef.push(deficit.ln());
        }
        if !usable || pairs < 3 {
            groups.push(OverlapDecayGroup {
                gap_index: gap,
                amplitude: ctx.zero(),
                exponent: ctx.zero(),
                r_squared: ctx.zero(),
                pairs_used: pairs,
                degenerate: true,
            });
            continue;
        }
        // Constant deficits leave nothing to regress: flag rather than fit.
        let constant = lndef.iter().all(|d| *d == lndef[0]);
        if constant {
            groups.push(OverlapDecayGroup {
                gap_index: gap,
                amplitude: ctx.zero(),
                exponent: ctx.zero(),
                r_squared: ctx.zero(),
                pairs_used: pairs,
                degenerate: true,
            });
            continue;
        }
        let design: Vec<Vec<Float>> = lnc.iter().map(|x| vec![x.clone(), ctx.f(1)]).collect();
        let beta = ols(&design, &lndef, ctx)?;
        let exponent = -beta[0].clone();
        let amplitude = beta[1].clone().exp();
        // R² of the log-log regression.
        let mut ssr = ctx.zero();
        let mut sst = ctx.zero();
        let mut mean = ctx.zero();
        for d in &lndef {
            mean += d;
        }
        mean /= ctx.f(lndef.len() as u32);
        for (x, d) in lnc.iter().zip(&lndef) {
            let pred = (x * &beta[0]).complete(ctx.prec()) + &beta[1];
            ssr += (d - pred).square();
            sst += (d - &mean).complete(ctx.prec()).square();
        }
        let r_squared = if sst.is_zero() {
            ctx.f(1)
        } else {
            ctx.f(1) - ssr / sst
        };
        groups.push(OverlapDecayGroup {
            gap_index: gap,
            amplitude,
            exponent,
            r_squared,
            pairs_used: pairs,
            degenerate: false,
        });
    }
    Ok(groups)
}

/// Principal component analysis of a vector family.
#[derive(Debug, Clone)]
pub struct PcaResult {
    /// Variance fractions per component, descending; they sum to 1.
    pub explained_fractions: Vec<Float>,
    /// `scores[p][i]` is the projection of (centred) vector `i` onto
    /// principal component `p`.
    pub scores: Vec<Vec<Float>>,
}

/// PCA of `vectors` (each a point in the coefficient space) via the Gram
/// matrix of the mean-centred family — an `m × m` eigenproblem independent
/// of the ambient dimension.  Needs at least two distinct vectors.
pub fn pca(vectors: &[Vec<Float>], ctx: &Ctx) -> Result<PcaResult> {
    let m = vectors.len();
    if m < 2 {
        return Err(Error::config("PCA needs at least 2 vectors"));
    }
    let dim = vectors[0].len();
    if dim == 0 || vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::config("PCA needs non-empty vectors of equal dimension"));
    }
    // Mean-centre the family.
    let mut meanv = vec![ctx.zero(); dim];
    for v in vectors {
        for (acc, x) in meanv.iter_mut().zip(v) {
            *acc += x;
        }
    }
    for acc in meanv.iter_mut() {
        *acc /= ctx.f(m as u32);
    }
    let centred: Vec<Vec<Float>> = vectors
        .iter()
        .map(|v| {
            v.iter()
                .zip(&meanv)
                .map(|(x, mu)| (x - mu).complete(ctx.prec()))
                .collect()
        })
        .collect();
    // Gram matrix of the centred family.
    let mut gram = vec![vec![ctx.zero(); m]; m];
    for i in 0..m {
        for j in i..m {
            let g = dot(&centred[i], &centred[j], ctx);
            gram[i][j] = g.clone();
            gram[j][i] = g;
        }
    }
    let spec = eigensym_rows(gram, ctx)?;
    // Ascending eigenvalues; read components from the top.  Clamp the tiny
    // negative rounding noise a PSD Gram matrix can produce (the backward
    // error bound is eps times the matrix norm).
    let mut total = ctx.zero();
    let mut kept: Vec<(Float, Vec<Float>)> = Vec::new();
    let noise = spec.backward_error_bound().clone().max(&ctx.eps()) * 100u32;
    for (lam, vec) in spec.eigenvalues().iter().zip(spec.eigenvectors()).rev() {
        let mut l = lam.clone();
        if l < 0 {
            if l.clone().abs() > noise {
                return Err(Error::numerical(
                    "PCA Gram matrix has a significantly negative eigenvalue",
                ));
            }
            l = ctx.zero();
        }
        total += &l;
        kept.push((l, vec.clone()));
    }
    if total.is_zero() {
        return Err(Error::config(
            "PCA is degenerate: all vectors coincide with the mean",
        ));
    }
    let mut explained_fractions = Vec::with_capacity(m);
    let mut scores = Vec::with_capacity(m);
    for (l, u) in &kept {
        explained_fractions.push((l / &total).complete(ctx.prec()));
        let sigma = l.clone().sqrt();
        scores.push(u.iter().map(|x| (x * &sigma).complete(ctx.prec())).collect());
    }
    Ok(PcaResult {
        explained_fractions,
        scores,
    })
}
