use serde::{Deserialize, Serialize};

use super::{derivative, sweep, AnalysisError, AnalysisResult, Column, LambdaGrid, Series};
use crate::xychain::{Chain, Geometry};

/// Least-squares line y = slope·x + intercept.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    pub r_squared: f64,
    /// Range of the fitted abscissa.
    pub window: (f64, f64),
    pub n_points: usize,
}

pub const MIN_FIT_POINTS: usize = 5;

pub fn linear_fit(x: &[f64], y: &[f64]) -> AnalysisResult<FitResult> {
    assert_eq!(x.len(), y.len(), "fit length mismatch");
    let n = x.len();
    if n < MIN_FIT_POINTS {
        return Err(AnalysisError::DegenerateWindow(format!(
            "{n} points, need {MIN_FIT_POINTS}"
        )));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    if !(sxx > 0.0) || !sxx.is_finite() || !syy.is_finite() {
        return Err(AnalysisError::DegenerateWindow(
            "abscissa has no spread".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(FitResult {
        slope,
        intercept,
        rms_residual: (ss_res / nf).sqrt(),
        r_squared,
        window: (lo, hi),
        n_points: n,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
    Both,
}

/// Band of distances |λ − λ_c| used by a logarithmic fit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogWindow {
    pub min: f64,
    pub max: f64,
    pub side: Side,
}

impl Default for LogWindow {
    fn default() -> Self {
        Self {
            min: 3e-4,
            max: 3e-2,
            side: Side::Both,
        }
    }
}

/// Fits y = a·ln|λ − λ_c| + b to the points of `series` inside `window`.
pub fn fit_log_divergence(
    series: &Series,
    lambda_c: f64,
    window: LogWindow,
) -> AnalysisResult<FitResult> {
    if !(window.min > 0.0 && window.max > window.min) {
        return Err(AnalysisError::DegenerateWindow(format!(
            "[{}, {}]",
            window.min, window.max
        )));
    }
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (&l, &v) in series.lambda.iter().zip(&series.values) {
        let d = l - lambda_c;
        let side_ok = match window.side {
            Side::Left => d < 0.0,
            Side::Right => d > 0.0,
            Side::Both => d != 0.0,
        };
        if side_ok && d.abs() >= window.min * (1.0 - 1e-9) && d.abs() <= window.max * (1.0 + 1e-9) {
            x.push(d.abs().ln());
            y.push(v);
        }
    }
    linear_fit(&x, &y)
}

/// Location and depth of the derivative minimum for one chain length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalScan {
    #[serde(rename = "L")]
    pub length: usize,
    pub lambda_m: f64,
    pub min_derivative: f64,
}

/// Argmin of a derivative series refined by the parabola through the grid
/// minimum and its two neighbours.
pub fn pseudo_critical(derivative: &Series, length: usize) -> AnalysisResult<CriticalScan> {
    let n = derivative.len();
    if n < 3 {
        return Err(AnalysisError::TooFewRows { needed: 3, got: n });
    }
    let h = derivative.spacing()?;
    let k = derivative.argmin().expect("non-empty");
    if k == 0 || k == n - 1 {
        return Err(AnalysisError::WindowTooNarrow(derivative.lambda[k]));
    }
    let (ym, y0, yp) = (
        derivative.values[k - 1],
        derivative.values[k],
        derivative.values[k + 1],
    );
    let curvature = ym - 2.0 * y0 + yp;
    let delta = if curvature > 0.0 {
        (0.5 * (ym - yp) / curvature).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    Ok(CriticalScan {
        length,
        lambda_m: derivative.lambda[k] + delta * h,
        min_derivative: y0 - 0.25 * (ym - yp) * delta,
    })
}

/// Two-stage search for the derivative minimum of a finite chain, with
/// windows expressed in the scaling variable x = L(λ − λ_c).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalSearch {
    pub lambda_c: f64,
    pub coarse_x: (f64, f64),
    pub coarse_points: usize,
    pub fine_points: usize,
    /// Fine spacing as a fraction of the coarse spacing.
    pub fine_ratio: f64,
}

impl Default for CriticalSearch {
    fn default() -> Self {
        Self {
            lambda_c: 1.0,
            coarse_x: (-3.0, 2.0),
            coarse_points: 51,
            fine_points: 41,
            fine_ratio: 0.1,
        }
    }
}

/// Locates λ_m(L) for `column`; returns the scan and the fine derivative
/// series it was read from.
pub fn locate_pseudo_critical(
    column: Column,
    geometry: Geometry,
    gamma: f64,
    length: usize,
    search: &CriticalSearch,
) -> AnalysisResult<(CriticalScan, Series)> {
    let l = length as f64;
    let chain = Chain::Finite(length);
    let (x0, x1) = search.coarse_x;
    let coarse_step = (x1 - x0) / l / (search.coarse_points.max(3) - 1) as f64;
    let coarse = LambdaGrid::with_count(
        search.lambda_c + x0 / l,
        coarse_step,
        search.coarse_points.max(3),
    )?;
    let d = derivative(&sweep(&[column], geometry, gamma, coarse, chain)?.column(column)?)?;
    let first = pseudo_critical(&d, length)?;
    let fine = LambdaGrid::centered(
        first.lambda_m,
        coarse_step * search.fine_ratio,
        search.fine_points.max(3),
    )?;
    let d = derivative(&sweep(&[column], geometry, gamma, fine, chain)?.column(column)?)?;
    Ok((pseudo_critical(&d, length)?, d))
}

fn distinct_lengths(scans: &[CriticalScan]) -> AnalysisResult<()> {
    let mut lengths: Vec<usize> = scans.iter().map(|s| s.length).collect();
    lengths.sort_unstable();
    lengths.dedup();
    if lengths.len() < MIN_FIT_POINTS {
        return Err(AnalysisError::TooFewLengths {
            needed: MIN_FIT_POINTS,
            got: lengths.len(),
        });
    }
    Ok(())
}

/// Fits the derivative minimum against ln L.
pub fn fit_finite_size(scans: &[CriticalScan]) -> AnalysisResult<FitResult> {
    distinct_lengths(scans)?;
    let x: Vec<f64> = scans.iter().map(|s| (s.length as f64).ln()).collect();
    let y: Vec<f64> = scans.iter().map(|s| s.min_derivative).collect();
    linear_fit(&x, &y)
}

/// Fits ln|λ_m(L) − λ_c| against ln L; the slope is the approach exponent.
pub fn fit_exponent(scans: &[CriticalScan], lambda_c: f64) -> AnalysisResult<FitResult> {
    distinct_lengths(scans)?;
    let x: Vec<f64> = scans.iter().map(|s| (s.length as f64).ln()).collect();
    let y: Vec<f64> = scans
        .iter()
        .map(|s| (s.lambda_m - lambda_c).abs().ln())
        .collect();
    if y.iter().any(|v| !v.is_finite()) {
        return Err(AnalysisError::DegenerateWindow(
            "lambda_m coincides with lambda_c".into(),
        ));
    }
    linear_fit(&x, &y)
}
