//! The three pieces of the truncated kernel ψ(x) and their x-derivatives.
//!
//! With a = 2πx, b = 2πx/L, the pieces are:
//!
//! * prime:  −(1/π) Σ_{p^k ≤ c} (Λ(n)/√n)·Re χ(n)·sin(2πx(1 − log n/L))
//! * pole (ζ only): (1/π) Σ_{σ=±1/2} Im[(c^σ − e^{ia})/(σ − ib)]
//! * archimedean: the h₊ multiplier integrated against the truncated sine
//!   kernel over τ ∈ (0, T); its constant component log(q/π) has a closed
//!   form in Si/Cin, and the digamma component is quadrature against the
//!   inner integral K(x, τ) expressed through the stable phase integrals
//!   at β = τ ± 2πx/L (stable across the resonance τ = b).

use super::{CharacterSpec, CutoffSpec};
use crate::error::{Error, Result};
use crate::mpkit::{
    build_grid, cos_integral_cin_pair, digamma_complex, integrate_on_grid, stable_phase_integral,
    stable_phase_integral_1, Ctx, QuadratureGrid,
};
use rug::{Complex, Float, Rational};
use sha2::{Digest, Sha256};

/// The archimedean multiplier h₊(τ) = −log π + Re Ψ(arch_param + iτ/2).
pub fn h_plus(tau: &Float, arch_param: &Rational, ctx: &Ctx) -> Result<Float> {
    let prec = ctx.prec();
    let z = Complex::with_val(
        prec,
        (
            Float::with_val(prec, arch_param),
            Float::with_val(prec, tau / 2u32),
        ),
    );
    let d = digamma_complex(&z, ctx)?;
    Ok(Float::with_val(prec, d.real()) - ctx.ln_pi())
}

/// Shared archimedean data for one (dps, T, level, arch_param): the τ-grid
/// and the digamma node values Re Ψ(arch_param + iτ_j/2).
#[derive(Clone, Debug)]
pub struct ArchCache {
    grid: QuadratureGrid,
    hplus: Vec<Float>,
    level: u32,
    digest: String,
}

impl ArchCache {
    /// Evaluate the digamma node values on the level grid over (0, T).
    pub fn build(spec: &CutoffSpec, level: u32, ctx: &Ctx) -> Result<ArchCache> {
        let t = spec.t_float(ctx);
        let grid = build_grid(&ctx.zero(), &t, level, ctx)?;
        let arch = spec.character().arch_param();
        let hplus = hplus_nodes(grid.nodes(), arch, ctx, None)?;
        let digest = hplus_digest(spec, level, &hplus);
        Ok(ArchCache {
            grid,
            hplus,
            level,
            digest,
        })
    }

    pub(crate) fn from_parts(
        grid: QuadratureGrid,
        hplus: Vec<Float>,
        level: u32,
        digest: String,
    ) -> ArchCache {
        ArchCache {
            grid,
            hplus,
            level,
            digest,
        }
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn hplus(&self) -> &[Float] {
        &self.hplus
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }
}

/// Digamma values at the given τ nodes; `reuse` optionally supplies the
/// previous (coarser, nested) level whose nodes are every second node here.
pub(crate) fn hplus_nodes(
    nodes: &[Float],
    arch: &Rational,
    ctx: &Ctx,
    reuse: Option<&[Float]>,
) -> Result<Vec<Float>> {
    use rayon::prelude::*;
    let prec = ctx.prec();
    let arch_f = Float::with_val(prec, arch);
    nodes
        .par_iter()
        .enumerate()
        .map(|(j, tau)| {
            if let Some(prev) = reuse {
                if j % 2 == 0 && prev.len() == nodes.len() / 2 + 1 {
                    return Ok(prev[j / 2].clone());
                }
            }
            let z = Complex::with_val(
                prec,
                (arch_f.clone(), Float::with_val(prec, tau / 2u32)),
            );
            Ok(Float::with_val(prec, digamma_complex(&z, ctx)?.real()))
        })
        .collect()
}

pub(crate) fn hplus_digest(spec: &CutoffSpec, level: u32, hplus: &[Float]) -> String {
    let mut h = Sha256::new();
    h.update(spec.dps().to_le_bytes());
    h.update(spec.t().to_string().as_bytes());
    h.update(level.to_le_bytes());
    h.update(spec.character().arch_param().to_string().as_bytes());
    for v in hplus {
        h.update(v.to_string_radix(10, None).as_bytes());
    }
    format!("{:x}", h.finalize())
}

/// The prime-power contribution to ψ(x).
pub fn psi_prime_piece(x: &Float, spec: &CutoffSpec, ctx: &Ctx) -> Result<Float> {
    prime_sum(x, spec, ctx, false)
}

/// The prime-power contribution to ψ′(x).
pub fn psi_prime_deriv_piece(x: &Float, spec: &CutoffSpec, ctx: &Ctx) -> Result<Float> {
    prime_sum(x, spec, ctx, true)
}

fn prime_sum(x: &Float, spec: &CutoffSpec, ctx: &Ctx, deriv: bool) -> Result<Float> {
    let prec = ctx.prec();
    let l = spec.l(ctx);
    let two_pi_x = ctx.pi() * 2u32 * x;
    let mut acc = Float::new(prec);
    for pp in super::prime_powers_upto(spec.c()) {
        let re_chi = spec.character().re_value(pp.n, ctx);
        if re_chi.is_zero() {
            continue;
        }
        let mangoldt = ctx.f(pp.p).ln();
        let factor = ctx.f(1u32) - ctx.f(pp.n).ln() / &l;
        let arg = Float::with_val(prec, &two_pi_x * &factor);
        let weight = re_chi * mangoldt / ctx.f(pp.n).sqrt();
        if deriv {
            acc += weight * factor * arg.cos();
        } else {
            acc += weight * arg.sin();
        }
    }
    if deriv {
        Ok(acc * -2i32)
    } else {
        Ok(-acc / ctx.pi())
    }
}

/// The pole contribution to ψ(x): present only in the zeta setting.
pub fn psi_pole_piece(x: &Float, spec: &CutoffSpec, ctx: &Ctx) -> Result<Float> {
    pole_sum(x, spec, ctx, false)
}

/// The pole contribution to ψ′(x).
pub fn psi_pole_deriv_piece(x: &Float, spec: &CutoffSpec, ctx: &Ctx) -> Result<Float> {
    pole_sum(x, spec, ctx, true)
}

fn pole_sum(x: &Float, spec: &CutoffSpec, ctx: &Ctx, deriv: bool) -> Result<Float> {
    let prec = ctx.prec();
    if !spec.character().pole_enabled() {
        return Ok(Float::new(prec));
    }
    let l = spec.l(ctx);
    let a = ctx.pi() * 2u32 * x;
    let b = Float::with_val(prec, &a / &l);
    let (sin_a, cos_a) = a.clone().sin_cos(Float::new(prec));
    let eia = Complex::with_val(prec, (cos_a, sin_a));
    let two_pi = ctx.pi() * 2u32;
    let mut acc = Float::new(prec);
    for sgn in [1i32, -1i32] {
        let sigma = ctx.f(sgn) / 2u32;
        let c_sigma = Float::with_val(prec, &l * &sigma).exp();
        let denom = Complex::with_val(prec, (sigma, -b.clone()));
        let num = Complex::with_val(prec, (c_sigma, Float::new(prec))) - &eia;
        if deriv {
            // d/dx: −2πi e^{ia}/(σ−ib) + (c^σ−e^{ia})·(2πi/L)/(σ−ib)²
            let minus_2pi_i = Complex::with_val(prec, (Float::new(prec), -two_pi.clone()));
            let t1 = minus_2pi_i * &eia / &denom;
            let i_2pi_over_l =
                Complex::with_val(prec, (Float::new(prec), Float::with_val(prec, &two_pi / &l)));
            let denom2 = Complex::with_val(prec, denom.square_ref());
            let t2 = num * i_2pi_over_l / denom2;
            acc += Float::with_val(prec, t1.imag() + t2.imag());
        } else {
            let term = num / denom;
            acc += term.imag();
        }
    }
    Ok(acc / ctx.pi())
}

/// Constant component of the archimedean multiplier: log(q/π), where q is
/// the character modulus (q = 1 in the zeta setting gives −log π).
fn arch_constant(character: &CharacterSpec, ctx: &Ctx) -> Float {
    ctx.f(character.modulus()).ln() - ctx.ln_pi()
}

/// G(y) = Si(y) − (1 − cos y)/y, odd, G(0) = 0; takes the precomputed Si.
fn g_aux(y: &Float, si_y: &Float, ctx: &Ctx) -> Float {
    if y.is_zero() {
        return ctx.zero();
    }
    let prec = ctx.prec();
    let half_sin = Float::with_val(prec, y / 2u32).sin();
    si_y.clone() - Float::with_val(prec, half_sin.square_ref()) * 2u32 / y
}

/// H(y) = sin(y)/y + Cin(y), even, H(0) = 1; takes the precomputed Cin.
fn h_aux(y: &Float, cin_y: &Float, ctx: &Ctx) -> Float {
    if y.is_zero() {
        return ctx.f(1u32);
    }
    let prec = ctx.prec();
    Float::with_val(prec, y.sin_ref()) / y + cin_y
}

/// The archimedean contribution to ψ(x): closed form for the constant
/// component plus quadrature of `hplus_values · K(x, τ)` for the digamma
/// component.
pub fn psi_arch_piece(
    x: &Float,
    spec: &CutoffSpec,
    hplus_values: &[Float],
    grid: &QuadratureGrid,
    ctx: &Ctx,
) -> Result<Float> {
    arch_eval(x, spec, hplus_values, grid, ctx, false)
}

/// The archimedean contribution to ψ′(x).
pub fn psi_arch_deriv_piece(
    x: &Float,
    spec: &CutoffSpec,
    hplus_values: &[Float],
    grid: &QuadratureGrid,
    ctx: &Ctx,
) -> Result<Float> {
    arch_eval(x, spec, hplus_values, grid, ctx, true)
}

fn arch_eval(
    x: &Float,
    spec: &CutoffSpec,
    hplus_values: &[Float],
    grid: &QuadratureGrid,
    ctx: &Ctx,
    deriv: bool,
) -> Result<Float> {
    if hplus_values.len() != grid.len() {
        return Err(Error::config(format!(
            "archimedean node values ({}) misaligned with grid ({})",
            hplus_values.len(),
            grid.len()
        )));
    }
    let prec = ctx.prec();
    let l = spec.l(ctx);
    let t = spec.t_float(ctx);
    let a = ctx.pi() * 2u32 * x;
    let b = Float::with_val(prec, &a / &l);
    let (sin_a, cos_a) = a.clone().sin_cos(Float::new(prec));
    let konst = arch_constant(spec.character(), ctx);
    let pi = ctx.pi();

    // Constant component, closed form. Y∓ = (T ∓ b)·L.
    let ym = Float::with_val(prec, &t - &b) * &l;
    let yp = Float::with_val(prec, &t + &b) * &l;
    let (si_m, cin_m) = cos_integral_cin_pair(&ym, ctx);
    let (si_p, cin_p) = cos_integral_cin_pair(&yp, ctx);
    let atom = if deriv {
        // (konst/π)·[cos a·(G(Y−)+G(Y+)) + sin a·(H(Y+)−H(Y−))]
        let g_sum = g_aux(&ym, &si_m, ctx) + g_aux(&yp, &si_p, ctx);
        let h_diff = h_aux(&yp, &cin_p, ctx) - h_aux(&ym, &cin_m, ctx);
        (Float::with_val(prec, &cos_a * &g_sum) + Float::with_val(prec, &sin_a * &h_diff))
            * &konst
            / &pi
    } else {
        // (konst/2π²)·[cos a·(Cin(Y−)−Cin(Y+)) + sin a·(Si(Y−)+Si(Y+))]
        let cin_diff = cin_m - cin_p;
        let si_sum = si_m + si_p;
        (Float::with_val(prec, &cos_a * &cin_diff) + Float::with_val(prec, &sin_a * &si_sum))
            * &konst
            / Float::with_val(prec, pi.square_ref())
            / 2u32
    };

    // Digamma component by quadrature.
    let half_l = Float::with_val(prec, &l / 2u32);
    let mut integrand = Vec::with_capacity(grid.len());
    for (tau, hp) in grid.nodes().iter().zip(hplus_values.iter()) {
        let bm = Float::with_val(prec, tau - &b);
        let bp = Float::with_val(prec, tau + &b);
        let inner = if deriv {
            // cos a·(Re φ₁(τ−b, L) + Re φ₁(τ+b, L))
            //   + sin a·(Im φ₁(τ+b, L) − Im φ₁(τ−b, L))
            let p1m = stable_phase_integral_1(&bm, &l, ctx);
            let p1p = stable_phase_integral_1(&bp, &l, ctx);
            let re_sum = Float::with_val(prec, p1m.real() + p1p.real());
            let im_diff = Float::with_val(prec, p1p.imag() - p1m.imag());
            Float::with_val(prec, &cos_a * &re_sum) + Float::with_val(prec, &sin_a * &im_diff)
        } else {
            // sin((τ+b)L/2)·Re φ(τ−b, L/2) − sin((τ−b)L/2)·Re φ(τ+b, L/2)
            let sp = Float::with_val(prec, &bp * &half_l).sin();
            let sm = Float::with_val(prec, &bm * &half_l).sin();
            let pm = stable_phase_integral(&bm, &half_l, ctx);
            let pp = stable_phase_integral(&bp, &half_l, ctx);
            Float::with_val(prec, &sp * pm.real()) - Float::with_val(prec, &sm * pp.real())
        };
        integrand.push(hp.clone() * inner);
    }
    let raw = integrate_on_grid(&integrand, grid)?;
    let dig = if deriv {
        raw / &pi
    } else {
        raw / Float::with_val(prec, pi.square_ref())
    };
    Ok(atom + dig)
}

/// ψ(x): the sum of the prime, archimedean, and pole pieces. The pole term
/// is added last so that settings without one (an exact zero) reproduce the
/// first two pieces bitwise.
pub fn psi(x: &Float, spec: &CutoffSpec, cache: &ArchCache, ctx: &Ctx) -> Result<Float> {
    let p = psi_prime_piece(x, spec, ctx)?;
    let r = psi_arch_piece(x, spec, cache.hplus(), cache.grid(), ctx)?;
    let q = psi_pole_piece(x, spec, ctx)?;
    Ok(p + r + q)
}

/// ψ′(x): the sum of the three differentiated pieces, pole last.
pub fn psi_deriv(x: &Float, spec: &CutoffSpec, cache: &ArchCache, ctx: &Ctx) -> Result<Float> {
    let p = psi_prime_deriv_piece(x, spec, ctx)?;
    let r = psi_arch_deriv_piece(x, spec, cache.hplus(), cache.grid(), ctx)?;
    let q = psi_pole_deriv_piece(x, spec, ctx)?;
    Ok(p + r + q)
}
