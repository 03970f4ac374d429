//! Galerkin matrices over the Fourier basis: assembly from a ψ-table,
//! parity-sector projection, arbitrary-precision Jacobi diagonalization,
//! and spectral summaries.
//!
//! The full matrix is indexed by modes m, n ∈ [−N, N] with
//! q_{m,n} = (ψ(m) − ψ(n))/(m − n) off the diagonal and q_{n,n} = ψ′(n).
//! Because ψ is odd, q_{−m,−n} = q_{m,n}, so the matrix commutes with the
//! parity flip and splits into an even sector (constant mode plus cosine
//! modes, dimension N+1) and an odd sector (sine modes, dimension N).

mod jacobi;

pub use jacobi::{eigensym, eigensym_rows, spectral_invariants, SpectralInvariants, SpectralResult};

use crate::error::{Error, Result};
use crate::mpkit::Ctx;
use crate::weil_kernel::{CutoffSpec, PsiTable};
use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

/// Which block of the parity decomposition a matrix represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Full,
    Even,
    Odd,
}

/// A dense symmetric Galerkin matrix at working precision.
#[derive(Clone, Debug)]
pub struct GalerkinMatrix {
    spec: CutoffSpec,
    sector: Sector,
    dim: usize,
    /// Row-major `dim × dim`; exactly symmetric by construction.
    entries: Vec<Float>,
}

impl GalerkinMatrix {
    pub fn spec(&self) -> &CutoffSpec {
        &self.spec
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, i: usize, j: usize) -> &Float {
        &self.entries[i * self.dim + j]
    }

    /// Frobenius norm at working precision.
    pub fn frobenius(&self, ctx: &Ctx) -> Float {
        let mut s = ctx.zero();
        for e in &self.entries {
            s += Float::with_val(ctx.prec(), e.square_ref());
        }
        s.sqrt()
    }

    pub(crate) fn from_rows(spec: CutoffSpec, sector: Sector, rows: Vec<Vec<Float>>) -> Self {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in &rows {
            assert_eq!(row.len(), dim);
            entries.extend(row.iter().cloned());
        }
        GalerkinMatrix {
            spec,
            sector,
            dim,
            entries,
        }
    }

    /// Rows as cloned vectors (for the eigensolver working copy).
    pub(crate) fn rows(&self) -> Vec<Vec<Float>> {
        (0..self.dim)
            .map(|i| self.entries[i * self.dim..(i + 1) * self.dim].to_vec())
            .collect()
    }
}

/// The full-sector matrix on modes m, n ∈ [−N, N] (dimension 2N+1).
pub fn assemble_full(table: &PsiTable) -> Result<GalerkinMatrix> {
    let spec = table.spec().clone();
    let ctx = spec.ctx()?;
    let prec = ctx.prec();
    let n = spec.n() as i64;
    let dim = (2 * n + 1) as usize;
    // Upper triangle in parallel, then mirror exactly.
    let upper: Vec<Vec<Float>> = (0..dim)
        .into_par_iter()
        .map(|i| {
            let m = i as i64 - n;
            (i..dim)
                .map(|j| {
                    let nn = j as i64 - n;
                    if m == nn {
                        table.psi_deriv_at(m)
                    } else {
                        let num = Float::with_val(prec, table.psi_at(m) - table.psi_at(nn));
                        num / ctx.f(m - nn)
                    }
                })
                .collect()
        })
        .collect();
    let mut rows = vec![vec![ctx.zero(); dim]; dim];
    for (i, up) in upper.into_iter().enumerate() {
        for (off, v) in up.into_iter().enumerate() {
            let j = i + off;
            rows[i][j] = v.clone();
            rows[j][i] = v;
        }
    }
    Ok(GalerkinMatrix::from_rows(spec, Sector::Full, rows))
}

/// Project the full matrix onto a parity sector through the orthonormal
/// parity basis: even {e₀} ∪ {(e_k + e_{−k})/√2}, odd {(e_k − e_{−k})/√2}.
/// The congruence collapses to exact two-term sums of full-matrix entries
/// (plus a single √2 scaling on the constant-mode row).
pub fn project_sector(full: &GalerkinMatrix, sector: Sector) -> Result<GalerkinMatrix> {
    if full.sector != Sector::Full {
        return Err(Error::config(format!(
            "sector projection expects a full-sector matrix, got {:?}",
            full.sector
        )));
    }
    if sector == Sector::Full {
        return Err(Error::config(
            "sector projection targets the even or odd block, not full",
        ));
    }
    let spec = full.spec.clone();
    let ctx = spec.ctx()?;
    let prec = ctx.prec();
    let n = spec.n();
    let c = n; // full-matrix row of mode 0
    let q = |m: usize, k: usize| full.at(m, k);
    let rows: Vec<Vec<Float>> = match sector {
        Sector::Full => unreachable!("rejected above"),
        Sector::Even => {
            let sqrt2 = ctx.f(2u32).sqrt();
            (0..=n)
                .map(|j| {
                    (0..=n)
                        .map(|k| {
                            if j == 0 && k == 0 {
                                q(c, c).clone()
                            } else if j == 0 {
                                Float::with_val(prec, q(c, c + k) * &sqrt2)
                            } else if k == 0 {
                                Float::with_val(prec, q(c + j, c) * &sqrt2)
                            } else {
                                // (q_{j,k} + q_{j,−k}); equals the 4-term
                                // congruence because q_{−j,−k} = q_{j,k}.
                                Float::with_val(prec, q(c + j, c + k) + q(c + j, c - k))
                            }
                        })
                        .collect()
                })
                .collect()
        }
        Sector::Odd => (1..=n)
            .map(|j| {
                (1..=n)
                    .map(|k| Float::with_val(prec, q(c + j, c + k) - q(c + j, c - k)))
                    .collect()
            })
            .collect(),
    };
    Ok(GalerkinMatrix::from_rows(spec, sector, rows))
}

/// Assemble the full matrix and project; convenience for the common path.
pub fn assemble_sector(table: &PsiTable, sector: Sector) -> Result<GalerkinMatrix> {
    let full = assemble_full(table)?;
    match sector {
        Sector::Full => Ok(full),
        s => project_sector(&full, s),
    }
}

/// Residual of the even–odd cross block of a full-sector matrix, measured
/// entrywise against the parity basis (zero in exact arithmetic).
pub fn parity_cross_residual(full: &GalerkinMatrix, ctx: &Ctx) -> Result<Float> {
    if full.sector != Sector::Full {
        return Err(Error::config(
            "parity residual expects a full-sector matrix",
        ));
    }
    let n = full.spec.n();
    let c = n;
    let prec = ctx.prec();
    let mut worst = ctx.zero();
    for j in 0..=n {
        for k in 1..=n {
            // ⟨even_j | Q | odd_k⟩ up to normalization.
            let r = if j == 0 {
                Float::with_val(prec, full.at(c, c + k) - full.at(c, c - k))
            } else {
                let a = Float::with_val(prec, full.at(c + j, c + k) - full.at(c + j, c - k));
                let b = Float::with_val(prec, full.at(c - j, c + k) - full.at(c - j, c - k));
                a + b
            };
            let r = r.abs();
            if r > worst {
                worst = r;
            }
        }
    }
    Ok(worst)
}
