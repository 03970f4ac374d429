//! Fixed-node tanh–sinh quadrature on a finite interval.
//!
//! Grids are *nested*: the trapezoid stretch `t_max` depends only on the
//! context precision, and level `l` uses step `h = t_max / 2^(l-1)`, so every
//! node of level `l` reappears in level `l+1`. Refining a level therefore
//! reuses all previously computed integrand values.
//!
//! Node positions near the endpoints are resolved through the *distance to
//! the endpoint* `d = 2/(e^{2|x|}+1)` (with `x = (π/2)·sinh t`) rather than
//! through `tanh x` itself, which would round to ±1 and collapse distinct
//! nodes onto the endpoints.

use super::Ctx;
use crate::error::{Error, Result};
use rug::Float;

/// A deterministic tanh–sinh quadrature rule on `[a, b]` with `2^level + 1`
/// nodes, ascending.
#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    a: Float,
    b: Float,
    level: u32,
    nodes: Vec<Float>,
    weights: Vec<Float>,
    prec: u32,
}

impl QuadratureGrid {
    pub fn a(&self) -> &Float {
        &self.a
    }

    pub fn b(&self) -> &Float {
        &self.b
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Float] {
        &self.nodes
    }

    pub fn weights(&self) -> &[Float] {
        &self.weights
    }
}

/// Build the tanh–sinh rule for `∫_a^b` at the given refinement level.
pub fn build_grid(a: &Float, b: &Float, level: u32, ctx: &Ctx) -> Result<QuadratureGrid> {
    if !(1..=24).contains(&level) {
        return Err(Error::config(format!(
            "quadrature level {level} outside supported range 1..=24"
        )));
    }
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::config(
            "quadrature interval must be finite with a < b".to_string(),
        ));
    }
    let prec = ctx.prec();
    let half = Float::with_val(prec, b - a) / 2u32;
    let pi_half = ctx.pi() / 2u32;

    // t_max = asinh(2·ln10·(dps+12)/π): beyond it the weights fall below
    // 10^(-2(dps+12)), negligible at working precision.
    let t_max = (ctx.ln10() * (ctx.dps() + 12) * 2u32 / ctx.pi()).asinh();
    let half_n: i64 = 1 << (level - 1);
    let h = Float::with_val(prec, &t_max / half_n);

    let mut nodes = Vec::with_capacity(2 * half_n as usize + 1);
    let mut weights = Vec::with_capacity(2 * half_n as usize + 1);
    for j in -half_n..=half_n {
        let t = Float::with_val(prec, &h * j);
        let x = Float::with_val(prec, t.sinh_ref()) * &pi_half;
        let ax = Float::with_val(prec, x.abs_ref());
        // q = e^{-2|x|}; endpoint distance d = 2q/(1+q); sech²x = 4q/(1+q)².
        let q = Float::with_val(prec, -2 * ax).exp();
        let one_plus_q = Float::with_val(prec, &q + 1u32);
        let d = Float::with_val(prec, 2 * &q) / &one_plus_q;
        let sech2 = Float::with_val(prec, 4 * &q)
            / Float::with_val(prec, one_plus_q.square_ref());
        let w = Float::with_val(prec, &half * &h)
            * &pi_half
            * Float::with_val(prec, t.cosh_ref())
            * sech2;
        let node = if j >= 0 {
            Float::with_val(prec, b - Float::with_val(prec, &half * &d))
        } else {
            Float::with_val(prec, a + Float::with_val(prec, &half * &d))
        };
        nodes.push(node);
        weights.push(w);
    }
    Ok(QuadratureGrid {
        a: Float::with_val(prec, a),
        b: Float::with_val(prec, b),
        level,
        nodes,
        weights,
        prec,
    })
}

/// Weighted sum `Σ w_i · values_i` approximating `∫_a^b f` when `values`
/// are the integrand samples at `grid.nodes()`.
pub fn integrate_on_grid(values: &[Float], grid: &QuadratureGrid) -> Result<Float> {
    if values.len() != grid.len() {
        return Err(Error::config(format!(
            "integrand has {} samples but the grid has {} nodes",
            values.len(),
            grid.len()
        )));
    }
    let mut acc = Float::new(grid.prec);
    for (v, w) in values.iter().zip(grid.weights.iter()) {
        acc += Float::with_val(grid.prec, v * w);
    }
    Ok(acc)
}
