//! Cyclic Jacobi diagonalization for dense symmetric matrices at working
//! precision, plus spectral summary records.

use super::GalerkinMatrix;
use crate::error::{Error, Result};
use crate::mpkit::Ctx;
use rug::ops::CompleteRound;
use rug::Float;

const MAX_SWEEPS: usize = 64;

/// Eigendecomposition of a symmetric Galerkin matrix.
#[derive(Clone, Debug)]
pub struct SpectralResult {
    /// Ascending eigenvalues.
    eigenvalues: Vec<Float>,
    /// `eigenvectors[i]` is the orthonormal eigenvector of `eigenvalues[i]`,
    /// signed so its largest-magnitude component is positive.
    eigenvectors: Vec<Vec<Float>>,
    /// Index of the smallest strictly positive eigenvalue, if any.
    smallest_positive_index: Option<usize>,
    /// log₁₀|λ| for each negative eigenvalue, most negative first.
    negative_log10_magnitudes: Vec<Float>,
    /// A priori backward-error estimate: eps · ‖Q‖_F.
    backward_error_bound: Float,
}

impl SpectralResult {
    pub fn eigenvalues(&self) -> &[Float] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[Vec<Float>] {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn smallest_positive_index(&self) -> Option<usize> {
        self.smallest_positive_index
    }

    /// The smallest strictly positive eigenvalue with its eigenvector.
    pub fn smallest_positive(&self) -> Result<(&Float, &[Float], usize)> {
        let idx = self.smallest_positive_index.ok_or_else(|| {
            Error::numerical("spectrum contains no strictly positive eigenvalue")
        })?;
        Ok((&self.eigenvalues[idx], &self.eigenvectors[idx], idx))
    }

    /// log₁₀ magnitudes of the negative eigenvalues, most negative first.
    pub fn negative_census(&self) -> &[Float] {
        &self.negative_log10_magnitudes
    }

    pub fn backward_error_bound(&self) -> &Float {
        &self.backward_error_bound
    }
}

fn frobenius_of_rows(a: &[Vec<Float>], ctx: &Ctx) -> Float {
    let mut s = ctx.zero();
    for row in a {
        for x in row {
            s += x.square_ref().complete(ctx.prec());
        }
    }
    s.sqrt()
}

fn offdiag_frobenius(a: &[Vec<Float>], ctx: &Ctx) -> Float {
    let dim = a.len();
    let mut s = ctx.zero();
    for i in 0..dim {
        for j in (i + 1)..dim {
            s += a[i][j].square_ref().complete(ctx.prec());
        }
    }
    s *= 2u32;
    s.sqrt()
}

/// Diagonalize a symmetric matrix by cyclic Jacobi rotations.
///
/// Converges when the off-diagonal Frobenius norm falls below
/// eps · ‖Q‖_F (eps = 10^−dps); exceeding the sweep budget is a
/// numerical-contract violation. Single-threaded by design: each rotation
/// depends on the previous one, and determinism matters more than speed here.
pub fn eigensym(m: &GalerkinMatrix, ctx: &Ctx) -> Result<SpectralResult> {
    eigensym_rows(m.rows(), ctx)
}

/// Rows-based entry point for callers whose symmetric matrix is not a
/// Galerkin assembly (covariance/Gram matrices in the analyses).
pub fn eigensym_rows(rows: Vec<Vec<Float>>, ctx: &Ctx) -> Result<SpectralResult> {
    let dim = rows.len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::config(format!(
                "symmetric input must be square: row {i} has {} entries for dimension {dim}",
                row.len()
            )));
        }
    }
    let prec = ctx.prec();
    let mut a = rows;
    let mut v: Vec<Vec<Float>> = (0..dim)
        .map(|i| (0..dim).map(|j| ctx.f(u32::from(i == j))).collect())
        .collect();

    let frob = frobenius_of_rows(&a, ctx);
    let target = Float::with_val(prec, &frob * ctx.eps());
    // Rotations below this floor cannot move the off-diagonal norm past the
    // target; skipping them avoids useless churn in converged regions.
    let rot_floor = Float::with_val(prec, &target / ctx.f(10 * (dim * dim) as u64));

    let mut converged = frob.is_zero();
    if !converged {
        for _sweep in 0..MAX_SWEEPS {
            if offdiag_frobenius(&a, ctx) <= target {
                converged = true;
                break;
            }
            for p in 0..dim {
                for q in (p + 1)..dim {
                    let apq = a[p][q].clone();
                    if apq.abs_ref().complete(prec) <= rot_floor {
                        continue;
                    }
                    // tan of the annihilating rotation, smaller root.
                    let theta_num = (&a[q][q] - &a[p][p]).complete(prec);
                    let theta = theta_num / (apq.clone() * 2u32);
                    let sign = if theta < 0u32 { -1i32 } else { 1i32 };
                    let hyp = theta.square_ref().complete(prec) + 1u32;
                    let t = ctx.f(sign)
                        / (theta.abs_ref().complete(prec) + hyp.sqrt());
                    let c = ctx.f(1u32)
                        / (t.square_ref().complete(prec) + 1u32).sqrt();
                    let s = (&t * &c).complete(prec);
                    let one_plus_c = c.clone() + 1u32;
                    let tau = Float::with_val(prec, &s / &one_plus_c);

                    let t_apq = (&t * &apq).complete(prec);
                    a[p][p] -= &t_apq;
                    a[q][q] += &t_apq;
                    a[p][q] = ctx.zero();
                    a[q][p] = ctx.zero();
                    for r in 0..dim {
                        if r == p || r == q {
                            continue;
                        }
                        let arp = a[r][p].clone();
                        let arq = a[r][q].clone();
                        let tmp_p = Float::with_val(prec, &tau * &arp) + &arq;
                        let delta_p = Float::with_val(prec, &s * &tmp_p);
                        let new_p = Float::with_val(prec, &arp - &delta_p);
                        let tmp_q = arp - Float::with_val(prec, &tau * &arq);
                        let delta_q = Float::with_val(prec, &s * &tmp_q);
                        let new_q = arq + delta_q;
                        a[r][p] = new_p.clone();
                        a[p][r] = new_p;
                        a[r][q] = new_q.clone();
                        a[q][r] = new_q;
                    }
                    for row in v.iter_mut() {
                        let vp = row[p].clone();
                        let vq = row[q].clone();
                        row[p] = (&c * &vp).complete(prec) - (&s * &vq).complete(prec);
                        row[q] = (&s * &vp).complete(prec) + (&c * &vq).complete(prec);
                    }
                }
            }
        }
        if !converged && offdiag_frobenius(&a, ctx) <= target {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::numerical(format!(
            "Jacobi diagonalization did not converge within {MAX_SWEEPS} sweeps (dim {dim})"
        )));
    }

    // Sort eigenvalues ascending, carrying eigenvector columns along.
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| {
        a[i][i]
            .partial_cmp(&a[j][j])
            .expect("eigenvalues are finite")
    });
    let mut eigenvalues = Vec::with_capacity(dim);
    let mut eigenvectors = Vec::with_capacity(dim);
    for &col in &order {
        eigenvalues.push(a[col][col].clone());
        let mut vec: Vec<Float> = (0..dim).map(|r| v[r][col].clone()).collect();
        // Sign convention: the largest-magnitude component is positive
        // (first such index on ties).
        let mut best = 0usize;
        for (i, x) in vec.iter().enumerate() {
            if x.abs_ref().complete(prec) > vec[best].abs_ref().complete(prec) {
                best = i;
            }
        }
        if vec[best] < 0u32 {
            for x in vec.iter_mut() {
                *x = -x.clone();
            }
        }
        eigenvectors.push(vec);
    }

    let smallest_positive_index = eigenvalues.iter().position(|l| *l > 0u32);
    let negative_log10_magnitudes = eigenvalues
        .iter()
        .filter(|l| **l < 0u32)
        .map(|l| l.abs_ref().complete(prec).log10())
        .collect();

    Ok(SpectralResult {
        eigenvalues,
        eigenvectors,
        smallest_positive_index,
        negative_log10_magnitudes,
        backward_error_bound: target,
    })
}

/// Scalar summaries of a spectrum used for cross-precision regression.
#[derive(Clone, Debug)]
pub struct SpectralInvariants {
    /// Σ ln|λ| over the whole spectrum (natural log).
    pub logdet_abs: Float,
    /// Trace minus the ground eigenvalue: Σλ − λ₀.
    pub bulk_trace: Float,
    /// (Σ λ²)^½ — equals the matrix Frobenius norm.
    pub frobenius: Float,
    /// Σ e^{−tλ} for each requested t, in input order.
    pub heat_traces: Vec<Float>,
    /// λ₁/λ₀ when the dimension is at least two.
    pub gap_ratio: Option<Float>,
    /// For each requested ε: the least basis index k such that the smallest
    /// positive eigenvector carries all but ε of its mass on modes ≤ k,
    /// i.e. 1 − Σ_{j≤k} v_j² < ε. `None` when there is no positive
    /// eigenvalue or the threshold is never crossed.
    pub k_eff: Vec<Option<usize>>,
}

/// Compute spectral invariants of a diagonalized matrix.
pub fn spectral_invariants(
    result: &SpectralResult,
    t_values: &[Float],
    k_eff_epsilons: &[Float],
    ctx: &Ctx,
) -> SpectralInvariants {
    let prec = ctx.prec();
    let eigs = result.eigenvalues();

    let mut logdet_abs = ctx.zero();
    let mut trace = ctx.zero();
    let mut sumsq = ctx.zero();
    for l in eigs {
        logdet_abs += l.abs_ref().complete(prec).ln();
        trace += l;
        sumsq += l.square_ref().complete(prec);
    }
    let bulk_trace = match eigs.first() {
        Some(ground) => trace - ground,
        None => trace,
    };
    let frobenius = sumsq.sqrt();

    let heat_traces = t_values
        .iter()
        .map(|t| {
            let mut s = ctx.zero();
            for l in eigs {
                s += (-(t * l).complete(prec)).exp();
            }
            s
        })
        .collect();

    let gap_ratio = if eigs.len() >= 2 && !eigs[0].is_zero() {
        Some((&eigs[1] / &eigs[0]).complete(prec))
    } else {
        None
    };

    let k_eff = k_eff_epsilons
        .iter()
        .map(|eps| {
            let (_, v, _) = result.smallest_positive().ok()?;
            let mut cum = ctx.zero();
            for (k, x) in v.iter().enumerate() {
                cum += x.square_ref().complete(prec);
                if (1u32 - &cum).complete(prec) < *eps {
                    return Some(k);
                }
            }
            None
        })
        .collect();

    SpectralInvariants {
        logdet_abs,
        bulk_trace,
        frobenius,
        heat_traces,
        gap_ratio,
        k_eff,
    }
}
