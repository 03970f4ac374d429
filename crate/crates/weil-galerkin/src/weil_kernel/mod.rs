//! The truncated-Weil kernel ψ: prime, pole, and archimedean pieces, their
//! x-derivatives, character variants, and the parallel ψ-table build with
//! optional disk caching.

mod character;
mod pieces;
mod primes;
mod table;
#[cfg(test)]
mod tests;

pub use character::{CharacterKind, CharacterSpec, Parity, Turn};
pub use pieces::{
    h_plus, psi, psi_arch_deriv_piece, psi_arch_piece, psi_deriv, psi_pole_deriv_piece,
    psi_pole_piece, psi_prime_deriv_piece, psi_prime_piece, ArchCache,
};
pub use primes::{prime_powers_upto, PrimePower};
pub use table::{build_psi_table, calibrated_arch_cache, load_psi_table, save_psi_table};

use crate::error::{Error, Result};
use crate::mpkit::Ctx;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

/// Full specification of one operator cell: cutoff c (with L = log c always
/// recomputed at working precision), τ-integral truncation T, Fourier
/// truncation N, decimal precision, and the character.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    c: Rational,
    t: Rational,
    n: usize,
    dps: u32,
    character: CharacterSpec,
}

impl CutoffSpec {
    pub fn new(
        c: Rational,
        t: Rational,
        n: usize,
        dps: u32,
        character: CharacterSpec,
    ) -> Result<CutoffSpec> {
        let e = Float::with_val(320, 1u32).exp();
        if Float::with_val(320, &c) <= e {
            return Err(Error::config(format!(
                "cutoff c = {c} must exceed e ≈ 2.71828"
            )));
        }
        if t <= 0u32 {
            return Err(Error::config("truncation T must be positive"));
        }
        if n == 0 {
            return Err(Error::config(
                "Fourier truncation N must be at least 1",
            ));
        }
        Ctx::new(dps)?;
        Ok(CutoffSpec {
            c,
            t,
            n,
            dps,
            character,
        })
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    pub fn t(&self) -> &Rational {
        &self.t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dps(&self) -> u32 {
        self.dps
    }

    pub fn character(&self) -> &CharacterSpec {
        &self.character
    }

    pub fn ctx(&self) -> Result<Ctx> {
        Ctx::new(self.dps)
    }

    /// L = log c, recomputed from the exact cutoff at working precision.
    pub fn l(&self, ctx: &Ctx) -> Float {
        Float::with_val(ctx.prec(), &self.c).ln()
    }

    pub fn t_float(&self, ctx: &Ctx) -> Float {
        Float::with_val(ctx.prec(), &self.t)
    }

    /// A copy of this spec with a smaller Fourier truncation.
    pub fn with_n(&self, n: usize) -> Result<CutoffSpec> {
        CutoffSpec::new(self.c.clone(), self.t.clone(), n, self.dps, self.character.clone())
    }

    /// Filesystem-safe identifier of (c, N, T, dps, character).
    pub fn cache_stem(&self) -> String {
        fn frac(r: &Rational) -> String {
            if *r.denom() == 1u32 {
                r.numer().to_string()
            } else {
                format!("{}_{}", r.numer(), r.denom())
            }
        }
        format!(
            "psi_c{}_N{}_T{}_dps{}_{}",
            frac(&self.c),
            self.n,
            frac(&self.t),
            self.dps,
            &self.character.digest()[..16]
        )
    }
}

/// Tabulated kernel values ψ(n) and ψ′(n) for n = 0..N at one cutoff
/// specification, with the digest of the shared archimedean node values
/// that produced them.
#[derive(Clone, Debug)]
pub struct PsiTable {
    spec: CutoffSpec,
    psi: Vec<Float>,
    psi_deriv: Vec<Float>,
    hplus_cache_digest: String,
}

impl PsiTable {
    pub(crate) fn from_parts(
        spec: CutoffSpec,
        psi: Vec<Float>,
        psi_deriv: Vec<Float>,
        hplus_cache_digest: String,
    ) -> PsiTable {
        assert_eq!(psi.len(), spec.n() + 1);
        assert_eq!(psi_deriv.len(), spec.n() + 1);
        PsiTable {
            spec,
            psi,
            psi_deriv,
            hplus_cache_digest,
        }
    }

    pub fn spec(&self) -> &CutoffSpec {
        &self.spec
    }

    pub fn hplus_cache_digest(&self) -> &str {
        &self.hplus_cache_digest
    }

    /// ψ(n), extended to negative indices by oddness.
    pub fn psi_at(&self, n: i64) -> Float {
        let a = n.unsigned_abs() as usize;
        assert!(a <= self.spec.n(), "psi index {n} outside table range");
        if n < 0 {
            -self.psi[a].clone()
        } else {
            self.psi[a].clone()
        }
    }

    /// ψ′(n), extended to negative indices by evenness.
    pub fn psi_deriv_at(&self, n: i64) -> Float {
        let a = n.unsigned_abs() as usize;
        assert!(a <= self.spec.n(), "psi_deriv index {n} outside table range");
        self.psi_deriv[a].clone()
    }

    pub fn psi_values(&self) -> &[Float] {
        &self.psi
    }

    pub fn psi_deriv_values(&self) -> &[Float] {
        &self.psi_deriv
    }

    /// Restriction of the table to a smaller Fourier truncation (the kernel
    /// values depend only on (c, T, dps, character), not on N).
    pub fn truncated(&self, n: usize) -> Result<PsiTable> {
        if n > self.spec.n() {
            return Err(Error::config(format!(
                "cannot extend table of size N={} to N={n}",
                self.spec.n()
            )));
        }
        Ok(PsiTable {
            spec: self.spec.with_n(n)?,
            psi: self.psi[..=n].to_vec(),
            psi_deriv: self.psi_deriv[..=n].to_vec(),
            hplus_cache_digest: self.hplus_cache_digest.clone(),
        })
    }
}
