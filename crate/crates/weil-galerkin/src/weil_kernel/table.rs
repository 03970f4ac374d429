//! Parallel ψ-table construction with grid-level calibration, a process-wide
//! archimedean node-value cache, and an optional versioned disk cache.

use super::pieces::{
    hplus_digest, hplus_nodes, psi_arch_deriv_piece, psi_arch_piece, psi_pole_deriv_piece,
    psi_pole_piece, psi_prime_deriv_piece, psi_prime_piece, ArchCache,
};
use super::{CutoffSpec, PsiTable};
use crate::error::{Error, Result};
use crate::mpkit::{build_grid, Ctx};
use once_cell::sync::Lazy;
use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

const MAX_LEVEL: u32 = 24;

/// Process-wide cache of digamma node values, keyed by
/// (dps, T, level, arch_param) — the values do not depend on the cutoff.
static HPLUS_MEMO: Lazy<Mutex<HashMap<(u32, String, u32, String), Arc<Vec<Float>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn memo_key(spec: &CutoffSpec, level: u32) -> (u32, String, u32, String) {
    (
        spec.dps(),
        spec.t().to_string(),
        level,
        spec.character().arch_param().to_string(),
    )
}

/// Digamma node values for the given level, reusing the process cache and
/// the nested coarser level where possible.
fn hplus_for_level(spec: &CutoffSpec, level: u32, ctx: &Ctx) -> Result<Arc<Vec<Float>>> {
    let key = memo_key(spec, level);
    if let Some(hit) = HPLUS_MEMO.lock().expect("hplus memo poisoned").get(&key) {
        return Ok(hit.clone());
    }
    let coarser = if level > 1 {
        HPLUS_MEMO
            .lock()
            .expect("hplus memo poisoned")
            .get(&memo_key(spec, level - 1))
            .cloned()
    } else {
        None
    };
    let t = spec.t_float(ctx);
    let grid = build_grid(&ctx.zero(), &t, level, ctx)?;
    let values = Arc::new(hplus_nodes(
        grid.nodes(),
        spec.character().arch_param(),
        ctx,
        coarser.as_deref().map(|v| &v[..]),
    )?);
    HPLUS_MEMO
        .lock()
        .expect("hplus memo poisoned")
        .insert(key, values.clone());
    Ok(values)
}

/// Starting refinement level: enough nodes to oversample the cos(τL)
/// oscillation roughly eightfold.
fn start_level(spec: &CutoffSpec) -> u32 {
    let c = spec.c().to_f64();
    let t = spec.t().to_f64();
    let periods = (t * c.ln() / std::f64::consts::TAU).max(1.0);
    let needed = (8.0 * periods).log2().ceil() as u32;
    needed.clamp(11, MAX_LEVEL - 2)
}

/// Archimedean cache at the calibrated grid level: the level is refined
/// until one more refinement moves the probe values by ≤ 10^(10−dps).
pub fn calibrated_arch_cache(spec: &CutoffSpec, ctx: &Ctx) -> Result<ArchCache> {
    let tol = ctx.decade(10 - spec.dps() as i32);
    let probes: Vec<usize> = {
        let n = spec.n();
        let mut p = vec![0, 1, n.div_ceil(2), n];
        p.dedup();
        p
    };
    let t = spec.t_float(ctx);

    let mut level = start_level(spec);
    let mut prev: Option<Vec<Float>> = None;
    loop {
        let grid = build_grid(&ctx.zero(), &t, level, ctx)?;
        let hplus = hplus_for_level(spec, level, ctx)?;
        let values: Vec<Float> = probes
            .par_iter()
            .map(|&n| -> Result<Vec<Float>> {
                let x = ctx.f(n as u32);
                Ok(vec![
                    psi_arch_piece(&x, spec, &hplus, &grid, ctx)?,
                    psi_arch_deriv_piece(&x, spec, &hplus, &grid, ctx)?,
                ])
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        if let Some(ref p) = prev {
            let mut worst = ctx.zero();
            for (a, b) in p.iter().zip(values.iter()) {
                let d = Float::with_val(ctx.prec(), a - b).abs();
                if d > worst {
                    worst = d;
                }
            }
            if worst <= tol {
                let digest = hplus_digest(spec, level, &hplus);
                return Ok(ArchCache::from_parts(grid, hplus.to_vec(), level, digest));
            }
        }
        if level >= MAX_LEVEL {
            return Err(Error::numerical(format!(
                "archimedean quadrature did not stabilize to {tol:e} by grid level {MAX_LEVEL}"
            )));
        }
        prev = Some(values);
        level += 1;
    }
}

/// Build ψ(n), ψ′(n) for n = 0..N: fixed pieces exactly, archimedean piece
/// on the calibrated grid, in parallel over n. The output is bitwise
/// independent of `jobs`.
pub fn build_psi_table(spec: &CutoffSpec, jobs: usize) -> Result<PsiTable> {
    if jobs == 0 {
        return Err(Error::config("jobs must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::config(format!("cannot build a {jobs}-thread pool: {e}")))?;
    pool.install(|| build_psi_table_inner(spec))
}

fn build_psi_table_inner(spec: &CutoffSpec) -> Result<PsiTable> {
    let ctx = spec.ctx()?;
    let cache = calibrated_arch_cache(spec, &ctx)?;
    let entries: Vec<(Float, Float)> = (0..=spec.n())
        .into_par_iter()
        .map(|n| -> Result<(Float, Float)> {
            let x = ctx.f(n as u32);
            let v = psi_prime_piece(&x, spec, &ctx)?
                + psi_arch_piece(&x, spec, cache.hplus(), cache.grid(), &ctx)?
                + psi_pole_piece(&x, spec, &ctx)?;
            let d = psi_prime_deriv_piece(&x, spec, &ctx)?
                + psi_arch_deriv_piece(&x, spec, cache.hplus(), cache.grid(), &ctx)?
                + psi_pole_deriv_piece(&x, spec, &ctx)?;
            Ok((v, d))
        })
        .collect::<Result<Vec<_>>>()?;
    let (psi_vals, deriv_vals) = entries.into_iter().unzip();
    Ok(PsiTable::from_parts(
        spec.clone(),
        psi_vals,
        deriv_vals,
        cache.digest().to_string(),
    ))
}

const TABLE_SCHEMA: &str = "psi-table/1";

#[derive(Serialize, Deserialize)]
struct PsiTableFile {
    schema: String,
    c: String,
    t: String,
    n: usize,
    dps: u32,
    character_digest: String,
    hplus_cache_digest: String,
    psi: Vec<String>,
    psi_deriv: Vec<String>,
}

/// Write the table to `dir` as one JSON file per
/// (c, N, T, dps, character digest), decimal strings at full precision.
pub fn save_psi_table(table: &PsiTable, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}.json", table.spec().cache_stem()));
    let file = PsiTableFile {
        schema: TABLE_SCHEMA.to_string(),
        c: table.spec().c().to_string(),
        t: table.spec().t().to_string(),
        n: table.spec().n(),
        dps: table.spec().dps(),
        character_digest: table.spec().character().digest(),
        hplus_cache_digest: table.hplus_cache_digest().to_string(),
        psi: table
            .psi_values()
            .iter()
            .map(|v| v.to_string_radix(10, None))
            .collect(),
        psi_deriv: table
            .psi_deriv_values()
            .iter()
            .map(|v| v.to_string_radix(10, None))
            .collect(),
    };
    std::fs::write(&path, serde_json::to_vec_pretty(&file)?)?;
    Ok(path)
}

/// Load a previously saved table for `spec` from `dir`. Returns `Ok(None)`
/// when no file exists; errors on schema or spec mismatches.
pub fn load_psi_table(spec: &CutoffSpec, dir: &Path) -> Result<Option<PsiTable>> {
    let path = dir.join(format!("{}.json", spec.cache_stem()));
    let bytes = match std::fs::read(&path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let file: PsiTableFile = serde_json::from_slice(&bytes)?;
    if file.schema != TABLE_SCHEMA {
        return Err(Error::config(format!(
            "ψ-table cache {} has schema '{}', expected '{TABLE_SCHEMA}'",
            path.display(),
            file.schema
        )));
    }
    let matches = file.c == spec.c().to_string()
        && file.t == spec.t().to_string()
        && file.n == spec.n()
        && file.dps == spec.dps()
        && file.character_digest == spec.character().digest();
    if !matches {
        return Err(Error::config(format!(
            "ψ-table cache {} does not match the requested specification",
            path.display()
        )));
    }
    if file.psi.len() != spec.n() + 1 || file.psi_deriv.len() != spec.n() + 1 {
        return Err(Error::config(format!(
            "ψ-table cache {} has wrong entry count",
            path.display()
        )));
    }
    let ctx = spec.ctx()?;
    let parse_all = |v: &[String]| -> Result<Vec<Float>> {
        v.iter().map(|s| ctx.parse(s)).collect()
    };
    Ok(Some(PsiTable::from_parts(
        spec.clone(),
        parse_all(&file.psi)?,
        parse_all(&file.psi_deriv)?,
        file.hplus_cache_digest,
    )))
}
