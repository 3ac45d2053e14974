use serde::{Deserialize, Serialize};

use super::{derivative, sweep, AnalysisResult, Column, CriticalScan, LambdaGrid, Series};
use crate::xychain::{Chain, Geometry};

/// Derivative of one chain length in scaling variables
/// x = L(λ − λ_m), y = ∂_λM − ∂_λM|_{λ_m}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseCurve {
    #[serde(rename = "L")]
    pub length: usize,
    pub lambda_m: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl CollapseCurve {
    /// Builds the curve from a derivative series already sampled around
    /// λ_m; the offset is the interpolated derivative at λ_m.
    pub fn from_derivative(scan: &CriticalScan, derivative: &Series) -> Self {
        let l = scan.length as f64;
        let at_m = derivative
            .interpolate(scan.lambda_m)
            .unwrap_or(scan.min_derivative);
        Self {
            length: scan.length,
            lambda_m: scan.lambda_m,
            x: derivative
                .lambda
                .iter()
                .map(|v| l * (v - scan.lambda_m))
                .collect(),
            y: derivative.values.iter().map(|v| v - at_m).collect(),
        }
    }

    fn series(&self) -> Series {
        Series::new(self.x.clone(), self.y.clone())
    }
}

/// Samples the derivative on `points` values of x spanning ±`half_width`.
pub fn collapse_curve(
    column: Column,
    geometry: Geometry,
    gamma: f64,
    scan: &CriticalScan,
    half_width: f64,
    points: usize,
) -> AnalysisResult<CollapseCurve> {
    let points = points.max(3) | 1;
    let step = 2.0 * half_width / scan.length as f64 / (points - 1) as f64;
    let grid = LambdaGrid::centered(scan.lambda_m, step, points)?;
    let table = sweep(&[column], geometry, gamma, grid, Chain::Finite(scan.length))?;
    Ok(CollapseCurve::from_derivative(
        scan,
        &derivative(&table.column(column)?)?,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseReport {
    pub curves: Vec<CollapseCurve>,
    pub window: (f64, f64),
    pub bins: usize,
    /// Largest spread between curves over the bin centres.
    pub spread: f64,
    /// max y − min y over every supplied point.
    pub range: f64,
    /// max y − min y restricted to the window.
    pub window_range: f64,
    /// spread / range.
    pub relative_spread: f64,
}

/// Compares the curves at `bins` evenly spaced x inside `window`; the spread is
/// measured there and normalised by the range of the whole dataset.
pub fn scaling_collapse(
    curves: Vec<CollapseCurve>,
    window: (f64, f64),
    bins: usize,
) -> CollapseReport {
    let bins = bins.max(1);
    let series: Vec<Series> = curves.iter().map(CollapseCurve::series).collect();
    let mut spread: f64 = 0.0;
    for b in 0..bins {
        let x = if bins == 1 {
            0.5 * (window.0 + window.1)
        } else {
            window.0 + (window.1 - window.0) * b as f64 / (bins - 1) as f64
        };
        let vals: Vec<f64> = series.iter().filter_map(|s| s.interpolate(x)).collect();
        if vals.len() >= 2 {
            let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            spread = spread.max(hi - lo);
        }
    }
    let y_range = |keep: &dyn Fn(f64) -> bool| {
        let (lo, hi) = curves
            .iter()
            .flat_map(|c| c.x.iter().zip(&c.y))
            .filter(|(x, _)| keep(**x))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, y)| {
                (lo.min(*y), hi.max(*y))
            });
        if hi >= lo {
            hi - lo
        } else {
            0.0
        }
    };
    let range = y_range(&|_| true);
    let window_range = y_range(&|x| x >= window.0 && x <= window.1);
    let relative_spread = if range > 0.0 { spread / range } else { 0.0 };
    CollapseReport {
        curves,
        window,
        bins,
        spread,
        range,
        window_range,
        relative_spread,
    }
}
