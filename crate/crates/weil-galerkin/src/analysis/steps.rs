//! Per-prime decomposition of the error trajectory: how much each new prime
//! admitted by a cutoff increase contributes to the error collapse.

use rug::ops::CompleteRound;
use rug::Float;

use crate::error::{Error, Result};
use crate::mpkit::Ctx;
use crate::weil_kernel::primes::prime_powers_upto;

use super::linalg::{mean, ols, pearson, population_std};
use super::SweepDataset;

/// One cutoff step `c_from → c_to` of the sweep.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub c_from: Float,
    pub c_to: Float,
    /// Change of `log10(first zero error)` across the step (negative when
    /// the error drops).  Differences are taken on the recorded
    /// `log10_gamma1_err` column so steps match the dataset digits exactly.
    pub delta_log10_err: Float,
    /// Cutoff increase `c_to − c_from`.
    pub gap: Float,
    /// Increase of the interval half-length, `log(c_to) − log(c_from)`.
    pub delta_l: Float,
    /// Digits gained per decade of cutoff growth:
    /// `delta_log10_err / (log10 c_to − log10 c_from)`.
    pub efficiency: Float,
    /// Primes first admitted by this step (in `(c_from, c_to]`).
    pub new_primes: Vec<u64>,
}

/// Power-law fit of the late-regime step magnitudes.
#[derive(Debug, Clone)]
pub struct StepPowerLaw {
    /// Amplitude of `|Δ| ≈ k · gap · c_to^(−alpha)`.
    pub k: Float,
    pub alpha: Float,
    /// Coefficient of determination measured on `log10 |Δ|`.
    pub r_squared: Float,
    pub steps_used: usize,
}

/// The full step table plus its summary statistics.
#[derive(Debug, Clone)]
pub struct StepsReport {
    pub steps: Vec<StepRecord>,
    /// Pearson correlation between step size and interval growth `Δ L`.
    pub pearson_delta_l: Float,
    /// Coefficient of variation (population) of the raw step magnitudes.
    pub cov_raw: Float,
    /// Coefficient of variation of the per-decade efficiencies.
    pub cov_efficiency: Float,
    /// Late-regime (`c_from ≥ 31`) per-prime power law, when at least three
    /// such steps exist.
    pub power_law: Option<StepPowerLaw>,
}

/// Cutoff above which the sweep is treated as the late regime for the step
/// power law (beyond the early transient of small primes).
const LATE_REGIME_C_FROM: u32 = 31;

/// Decomposes a sweep into per-step error drops and correlates them with the
/// primes each step admits.  Needs at least three rows with the recorded
/// `log10_gamma1_err` column present.
pub fn per_prime_decomposition(ds: &SweepDataset, ctx: &Ctx) -> Result<StepsReport> {
    if ds.rows.len() < 3 {
        return Err(Error::config(format!(
            "step decomposition needs at least 3 rows, got {}",
            ds.rows.len()
        )));
    }
    let cs = ds.c_values(ctx)?;
    let log_errs = ds.log10_err_recorded(ctx)?;

    let mut steps = Vec::with_capacity(cs.len() - 1);
    for i in 0..cs.len() - 1 {
        let c_from = cs[i].clone();
        let c_to = cs[i + 1].clone();
        let delta = (&log_errs[i + 1] - &log_errs[i]).complete(ctx.prec());
        let gap = (&c_to - &c_from).complete(ctx.prec());
        let delta_l = c_to.clone().ln() - c_from.clone().ln();
        let dlog10c = c_to.clone().log10() - c_from.clone().log10();
        if dlog10c.is_zero() {
            return Err(Error::numerical("repeated cutoff in step decomposition"));
        }
        let efficiency = (&delta / &dlog10c).complete(ctx.prec());

        // Primes admitted by this step: p in (c_from, c_to].
        let hi = c_to.to_rational().ok_or_else(|| {
            Error::config("cutoffs must be finite to enumerate admitted primes")
        })?;
        let new_primes: Vec<u64> = prime_powers_upto(&hi)
            .iter()
            .filter(|pp| pp.k == 1 && ctx.f(pp.n) > c_from)
            .map(|pp| pp.p)
            .collect();

        steps.push(StepRecord {
            c_from,
            c_to,
            delta_log10_err: delta,
            gap,
            delta_l,
            efficiency,
            new_primes,
        });
    }

    let deltas: Vec<Float> = steps.iter().map(|s| s.delta_log10_err.clone()).collect();
    let dls: Vec<Float> = steps.iter().map(|s| s.delta_l.clone()).collect();
    let pearson_delta_l = pearson(&deltas, &dls, ctx)?;

    let abs_deltas: Vec<Float> = deltas.iter().map(|d| d.clone().abs()).collect();
    let abs_effs: Vec<Float> = steps.iter().map(|s| s.efficiency.clone().abs()).collect();
    let cov = |xs: &[Float]| -> Result<Float> {
        let m = mean(xs, ctx);
        if m.is_zero() {
            return Err(Error::numerical("coefficient of variation undefined at zero mean"));
        }
        Ok(population_std(xs, ctx) / m)
    };
    let cov_raw = cov(&abs_deltas)?;
    let cov_efficiency = cov(&abs_effs)?;

    let power_law = step_power_law(&steps, ctx)?;

    Ok(StepsReport {
        steps,
        pearson_delta_l,
        cov_raw,
        cov_efficiency,
        power_law,
    })
}

/// Late-regime fit `|Δ| ≈ k · gap · c_to^(−alpha)`, i.e. an OLS regression of
/// `ln(|Δ|/gap)` on `ln c_to` over steps with `c_from ≥ 31`.  The reported R²
/// compares predicted and observed `log10 |Δ|`.
fn step_power_law(steps: &[StepRecord], ctx: &Ctx) -> Result<Option<StepPowerLaw>> {
    let late: Vec<&StepRecord> = steps
        .iter()
        .filter(|s| s.c_from >= LATE_REGIME_C_FROM)
        .collect();
    if late.len() < 3 {
        return Ok(None);
    }
    let mut xs = Vec::with_capacity(late.len());
    let mut zs = Vec::with_capacity(late.len());
    for s in &late {
        let mag = s.delta_log10_err.clone().abs();
        if mag.is_zero() || s.gap.is_zero() {
            return Err(Error::numerical(
                "late-regime power law needs non-zero steps and gaps",
            ));
        }
        xs.push(s.c_to.clone().ln());
        zs.push((mag / &s.gap).ln());
    }
    let design: Vec<Vec<Float>> = xs.iter().map(|x| vec![x.clone(), ctx.f(1)]).collect();
    let beta = ols(&design, &zs, ctx)?;
    let alpha = -beta[0].clone();
    let k = beta[1].clone().exp();

    // R² on log10 |Δ|.
    let ln10 = ctx.ln10();
    let obs: Vec<Float> = late
        .iter()
        .map(|s| s.delta_log10_err.clone().abs().log10())
        .collect();
    let preds: Vec<Float> = late
        .iter()
        .zip(&xs)
        .map(|(s, x)| {
            // log10 pred = (ln k + ln gap − alpha ln c_to) / ln 10
            let lng = s.gap.clone().ln();
            (beta[1].clone() + lng + (x * &beta[0]).complete(ctx.prec())) / &ln10
        })
        .collect();
    let m = mean(&obs, ctx);
    let mut ssr = ctx.zero();
    let mut sst = ctx.zero();
    for (o, p) in obs.iter().zip(&preds) {
        ssr += (o - p).complete(ctx.prec()).square();
        sst += (o - &m).complete(ctx.prec()).square();
    }
    let r_squared = if sst.is_zero() {
        ctx.f(1)
    } else {
        ctx.f(1) - ssr / sst
    };
    Ok(Some(StepPowerLaw {
        k,
        alpha,
        r_squared,
        steps_used: late.len(),
    }))
}
