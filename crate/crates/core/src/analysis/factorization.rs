use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    column_at, evaluate, linear_fit, AnalysisError, AnalysisResult, Column, EvalOptions, FitResult,
    SweepTable,
};
use crate::measures::{concurrence, ZERO_THRESHOLD};
use crate::xychain::{factorization_lambda, rdm2, Geometry, Params};

const GOLDEN_ITERATIONS: usize = 80;
const BISECTION_ITERATIONS: usize = 60;

/// A point where the column dips below the zero threshold and comes back.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationPoint {
    /// Midpoint of the sub-threshold interval.
    pub lambda: f64,
    /// Sub-threshold interval after bisection.
    pub bracket: (f64, f64),
    /// Smallest column value met while refining.
    pub min_value: f64,
}

/// Zero threshold and the widest sub-threshold interval still read as a
/// single crossing rather than a plateau.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectOptions {
    pub threshold: f64,
    pub max_width: f64,
}

impl Default for DetectOptions {
    fn default() -> Self {
        Self {
            threshold: ZERO_THRESHOLD,
            max_width: 0.02,
        }
    }
}

/// Every isolated zero of `column` in the table, in increasing λ.
///
/// Grid minima above the threshold are refined by golden-section search. Each
/// sub-threshold region is then bracketed by bisection on the sign of
/// (value − threshold) towards the neighbouring grid points, and kept when the
/// column re-emerges on both sides within `max_width`.
pub fn factorization_candidates(
    table: &SweepTable,
    column: Column,
    opts: &DetectOptions,
) -> AnalysisResult<Vec<FactorizationPoint>> {
    let series = table.column(column)?;
    let n = series.len();
    let thr = opts.threshold;
    let f = |lambda: f64| column_at(column, table.geometry, table.gamma, table.chain, lambda);
    let v = &series.values;
    let lam = &series.lambda;
    let mut found = Vec::new();
    let mut k = 1;
    while k + 1 < n {
        let (first, last, best, best_val) = if v[k] < thr {
            let first = k;
            while k + 1 < n && v[k + 1] < thr {
                k += 1;
            }
            let run = &v[first..=k];
            let (j, m) = run
                .iter()
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |acc, (j, &x)| if x < acc.1 { (j, x) } else { acc },
                );
            (first, k, lam[first + j], m)
        } else if v[k] <= v[k - 1] && v[k] <= v[k + 1] {
            let (b, bv) = golden_minimum(&f, lam[k - 1], lam[k + 1], thr)?;
            (k, k, b, bv)
        } else {
            k += 1;
            continue;
        };
        k += 1;
        if best_val >= thr || first == 0 || last + 1 >= n {
            continue;
        }
        let left = bisect(
            &f,
            lam[first - 1],
            if first == last { best } else { lam[first] },
            thr,
        )?;
        let right = bisect(
            &f,
            lam[last + 1],
            if first == last { best } else { lam[last] },
            thr,
        )?;
        if let (Some(a), Some(b)) = (left, right) {
            if b - a <= opts.max_width {
                found.push(FactorizationPoint {
                    lambda: 0.5 * (a + b),
                    bracket: (a, b),
                    min_value: best_val,
                });
            }
        }
    }
    Ok(found)
}

/// The first isolated zero of `column` in the table.
pub fn detect_factorization(
    table: &SweepTable,
    column: Column,
) -> AnalysisResult<FactorizationPoint> {
    factorization_candidates(table, column, &DetectOptions::default())?
        .into_iter()
        .next()
        .ok_or(AnalysisError::NotFound(table.grid.start, table.grid.stop()))
}

fn golden_minimum(
    f: &dyn Fn(f64) -> AnalysisResult<f64>,
    mut a: f64,
    mut b: f64,
    stop_below: f64,
) -> AnalysisResult<(f64, f64)> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..GOLDEN_ITERATIONS {
        if fc.min(fd) < stop_below || b - a < 1e-14 {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc <= fd { (c, fc) } else { (d, fd) })
}

/// Boundary of the sub-threshold region between `outside` and `inside`.
fn bisect(
    f: &dyn Fn(f64) -> AnalysisResult<f64>,
    mut outside: f64,
    mut inside: f64,
    threshold: f64,
) -> AnalysisResult<Option<f64>> {
    if f(outside)? < threshold {
        return Ok(None);
    }
    for _ in 0..BISECTION_ITERATIONS {
        if (outside - inside).abs() < 1e-15 {
            break;
        }
        let mid = 0.5 * (outside + inside);
        if f(mid)? < threshold {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok(Some(inside))
}

/// Column values of a finite chain at λ_f(γ) together with the comparison
/// quantities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationSample {
    #[serde(rename = "L")]
    pub length: usize,
    pub value: f64,
    pub n3: f64,
    pub tau_ub: f64,
    /// Nearest-neighbour concurrence.
    pub c1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationScaling {
    pub column: Column,
    pub gamma: f64,
    pub lambda_f: f64,
    pub samples: Vec<FactorizationSample>,
    /// ln(value) against L.
    pub fit: FitResult,
}

pub fn factorization_scaling(
    gamma: f64,
    geometry: Geometry,
    column: Column,
    lengths: &[usize],
) -> AnalysisResult<FactorizationScaling> {
    let lambda_f = factorization_lambda(gamma)?;
    let opts = EvalOptions::default();
    let samples = lengths
        .par_iter()
        .map(|&length| {
            let params = Params::finite(lambda_f, gamma, length)?;
            let row = evaluate(geometry, &params, &opts)?;
            let value = row
                .value(column)
                .ok_or(AnalysisError::MissingColumn(column))?;
            let c1 = concurrence(&rdm2(1, &params)?)?;
            Ok(FactorizationSample {
                length,
                value,
                n3: row.record.n3,
                tau_ub: row.record.tau_ub.unwrap_or(0.0),
                c1,
            })
        })
        .collect::<AnalysisResult<Vec<_>>>()?;
    if let Some(s) = samples.iter().find(|s| !(s.value > 0.0)) {
        return Err(AnalysisError::NonPositive {
            column,
            length: s.length,
            value: s.value,
        });
    }
    let x: Vec<f64> = samples.iter().map(|s| s.length as f64).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.value.ln()).collect();
    let fit = linear_fit(&x, &y)?;
    Ok(FactorizationScaling {
        column,
        gamma,
        lambda_f,
        samples,
        fit,
    })
}
