use serde::{Deserialize, Serialize};

use super::{evaluate, sweep_with, AnalysisResult, EvalOptions, LambdaGrid, Row, SweepTable};
use crate::measures::ZERO_THRESHOLD;
use crate::xychain::{Chain, Geometry, Params};

/// τ_UB above this counts as genuinely tripartite.
pub const BOUND_TAU_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundOptions {
    /// N(ρ_{i|jk}) below this counts as PPT.
    pub ppt_threshold: f64,
    pub tau_threshold: f64,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self {
            ppt_threshold: ZERO_THRESHOLD,
            tau_threshold: BOUND_TAU_THRESHOLD,
        }
    }
}

const BISECTION_ITERATIONS: usize = 40;

/// A λ-interval where the i|jk cut is PPT while τ_UB stays positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundWindow {
    pub start: f64,
    pub end: f64,
    pub grid_points: usize,
    pub max_tau_ub: f64,
    /// Largest N(ρ_{i|jk}), N(ρ_{j|ik}), N(ρ_{k|ij}) over the grid points inside.
    pub max_negativities: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundScan {
    pub options: BoundOptions,
    pub windows: Vec<BoundWindow>,
    pub table: SweepTable,
}

fn inside(row: &Row, opts: &BoundOptions) -> bool {
    row.record.bipartite_negativities[0] < opts.ppt_threshold
        && row.record.tau_ub.is_some_and(|t| t > opts.tau_threshold)
}

pub fn bound_entanglement_scan(
    gamma: f64,
    geometry: Geometry,
    grid: LambdaGrid,
    chain: Chain,
) -> AnalysisResult<BoundScan> {
    bound_entanglement_scan_with(gamma, geometry, grid, chain, &BoundOptions::default())
}

pub fn bound_entanglement_scan_with(
    gamma: f64,
    geometry: Geometry,
    grid: LambdaGrid,
    chain: Chain,
    bound: &BoundOptions,
) -> AnalysisResult<BoundScan> {
    let opts = EvalOptions::default();
    let table = sweep_with(&opts, geometry, gamma, grid, chain)?;
    let test = |lambda: f64| -> AnalysisResult<bool> {
        Ok(inside(
            &evaluate(geometry, &Params::new(lambda, gamma, chain)?, &opts)?,
            bound,
        ))
    };
    let flags: Vec<bool> = table.rows.iter().map(|r| inside(r, bound)).collect();
    let n = flags.len();
    let mut windows = Vec::new();
    let mut k = 0;
    while k < n {
        if !flags[k] {
            k += 1;
            continue;
        }
        let first = k;
        while k < n && flags[k] {
            k += 1;
        }
        let last = k - 1;
        let lam = |i: usize| table.rows[i].lambda;
        let start = if first == 0 {
            lam(0)
        } else {
            refine(&test, lam(first - 1), lam(first))?
        };
        let end = if last == n - 1 {
            lam(last)
        } else {
            refine(&test, lam(last + 1), lam(last))?
        };
        let rows = &table.rows[first..=last];
        let mut max_negativities = [0.0f64; 3];
        for r in rows {
            for (m, v) in max_negativities
                .iter_mut()
                .zip(r.record.bipartite_negativities)
            {
                *m = m.max(v);
            }
        }
        windows.push(BoundWindow {
            start,
            end,
            grid_points: rows.len(),
            max_tau_ub: rows
                .iter()
                .filter_map(|r| r.record.tau_ub)
                .fold(f64::NEG_INFINITY, f64::max),
            max_negativities,
        });
    }
    Ok(BoundScan {
        options: *bound,
        windows,
        table,
    })
}

fn refine(
    test: &dyn Fn(f64) -> AnalysisResult<bool>,
    mut out: f64,
    mut inn: f64,
) -> AnalysisResult<f64> {
    for _ in 0..BISECTION_ITERATIONS {
        let mid = 0.5 * (out + inn);
        if test(mid)? {
            inn = mid;
        } else {
            out = mid;
        }
    }
    Ok(0.5 * (out + inn))
}
