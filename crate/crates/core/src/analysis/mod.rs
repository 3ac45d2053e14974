//! Parameter sweeps over λ and the reductions built on them: numerical
//! derivatives, pseudo-critical points, logarithmic and finite-size fits,
//! scaling collapse, factorization-point and bound-entanglement detection,
//! and finite-versus-infinite fidelity.
//!
//! Everything here works in f64.

mod bound;
mod collapse;
mod factorization;
mod fidelity;
mod fit;

pub use bound::{
    bound_entanglement_scan, bound_entanglement_scan_with, BoundOptions, BoundScan, BoundWindow,
    BOUND_TAU_THRESHOLD,
};
pub use collapse::{collapse_curve, scaling_collapse, CollapseCurve, CollapseReport};
pub use factorization::{
    detect_factorization, factorization_candidates, factorization_scaling, DetectOptions,
    FactorizationPoint, FactorizationSample, FactorizationScaling,
};
pub use fidelity::fidelity;
pub use fit::{
    fit_exponent, fit_finite_size, fit_log_divergence, linear_fit, locate_pseudo_critical,
    pseudo_critical, CriticalScan, CriticalSearch, FitResult, LogWindow, Side,
};

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{partial_trace, Density, LinalgError};
use crate::measures::{concurrence, negativity, MeasureError, MqcRecord};
use crate::sdpsolver::{
    binegativity_min_eigenvalue, solve_kappa_with, SdpError, SdpOptions, SdpProblem, SdpStatus,
};
use crate::xychain::{rdm3, Chain, Geometry, Params, XyError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error(transparent)]
    Xy(#[from] XyError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid lambda grid: {0}")]
    Grid(String),
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("lambda values are not uniformly spaced")]
    NonUniformGrid,
    #[error("derivative minimum at lambda = {0} sits on the window edge; widen the window")]
    WindowTooNarrow(f64),
    #[error("degenerate fit window: {0}")]
    DegenerateWindow(String),
    #[error("need at least {needed} distinct chain lengths, got {got}")]
    TooFewLengths { needed: usize, got: usize },
    #[error("no factorization point found in [{0}, {1}]")]
    NotFound(f64, f64),
    #[error("column {column} is not positive at L = {length}, value {value:e}")]
    NonPositive {
        column: Column,
        length: usize,
        value: f64,
    },
    #[error("column {0} was not computed for this table")]
    MissingColumn(Column),
    #[error("unknown column '{0}'")]
    UnknownColumn(String),
    #[error("a finite chain length is required")]
    NeedsFiniteChain,
}

pub type AnalysisResult<T> = Result<T, AnalysisError>;

/// A scalar column of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Column {
    N3,
    T3,
    TauUb,
    TauLb,
    /// Concurrence of the pair (i − α, i).
    CAlpha,
    /// N(ρ_{i|jk}).
    NegI,
    NegJ,
    NegK,
}

impl Column {
    pub const ALL: [Column; 8] = [
        Column::N3,
        Column::T3,
        Column::TauUb,
        Column::TauLb,
        Column::CAlpha,
        Column::NegI,
        Column::NegJ,
        Column::NegK,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Column::N3 => "n3",
            Column::T3 => "t3",
            Column::TauUb => "tau_ub",
            Column::TauLb => "tau_lb",
            Column::CAlpha => "c_alpha",
            Column::NegI => "neg_i",
            Column::NegJ => "neg_j",
            Column::NegK => "neg_k",
        }
    }

    pub fn needs_sdp(&self) -> bool {
        matches!(self, Column::TauUb)
    }
}

impl std::fmt::Display for Column {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Column {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Column::ALL
            .iter()
            .copied()
            .find(|c| c.name() == key)
            .ok_or_else(|| AnalysisError::UnknownColumn(s.to_string()))
    }
}

/// Uniform grid start, start + step, …, start + (count − 1)·step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaGrid {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl LambdaGrid {
    /// Grid from `start` to `stop` inclusive. `stop − start` must be a whole
    /// number of steps up to rounding.
    pub fn new(start: f64, stop: f64, step: f64) -> AnalysisResult<Self> {
        if !(start.is_finite() && stop.is_finite() && step.is_finite())
            || step <= 0.0
            || stop < start
        {
            return Err(AnalysisError::Grid(format!(
                "start {start}, stop {stop}, step {step}"
            )));
        }
        let span = (stop - start) / step;
        let n = span.round();
        if (span - n).abs() > 1e-6 * n.max(1.0) {
            return Err(AnalysisError::Grid(format!(
                "({stop} - {start}) is not a multiple of {step}"
            )));
        }
        Self::with_count(start, step, n as usize + 1)
    }

    pub fn with_count(start: f64, step: f64, count: usize) -> AnalysisResult<Self> {
        if !(start.is_finite() && step.is_finite()) || step <= 0.0 || count == 0 {
            return Err(AnalysisError::Grid(format!(
                "start {start}, step {step}, count {count}"
            )));
        }
        if start < 0.0 {
            return Err(AnalysisError::Grid(format!(
                "lambda must be non-negative, start {start}"
            )));
        }
        Ok(Self { start, step, count })
    }

    /// Grid of `count` points centred on `center`.
    pub fn centered(center: f64, step: f64, count: usize) -> AnalysisResult<Self> {
        let half = (count.max(1) - 1) as f64 / 2.0;
        Self::with_count(center - half * step, step, count)
    }

    pub fn point(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    pub fn stop(&self) -> f64 {
        self.point(self.count - 1)
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.point(k)).collect()
    }
}

/// How E_PPT of one cut was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpptMethod {
    /// |ρ^Γ|^Γ ⪰ 0, so E_PPT equals the logarithmic negativity.
    Binegativity,
    Sdp,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpptCut {
    pub value: f64,
    pub method: EpptMethod,
    /// `None` for the binegativity route.
    pub status: Option<SdpStatus>,
    pub duality_gap: f64,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct EvalOptions {
    pub with_tau_ub: bool,
    /// Use the logarithmic negativity whenever the binegativity is PSD.
    pub binegativity_shortcut: bool,
    /// Smallest binegativity eigenvalue still accepted as PSD.
    pub binegativity_floor: f64,
    pub sdp: SdpOptions,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            with_tau_ub: true,
            binegativity_shortcut: true,
            binegativity_floor: -1e-12,
            sdp: SdpOptions::default(),
        }
    }
}

impl EvalOptions {
    /// Options computing τ_UB only when one of `columns` needs it.
    pub fn for_columns(columns: &[Column]) -> Self {
        Self {
            with_tau_ub: columns.iter().any(Column::needs_sdp),
            ..Self::default()
        }
    }
}

/// E_PPT of the cut `center | rest`.
pub fn e_ppt_cut(
    rho3: &Density<f64>,
    center: usize,
    opts: &EvalOptions,
) -> AnalysisResult<EpptCut> {
    if opts.binegativity_shortcut
        && binegativity_min_eigenvalue(rho3, center)? >= opts.binegativity_floor
    {
        let value = (negativity(rho3, center)? + 1.0).log2();
        return Ok(EpptCut {
            value,
            method: EpptMethod::Binegativity,
            status: None,
            duality_gap: 0.0,
            iterations: 0,
        });
    }
    let sol = solve_kappa_with(&SdpProblem::new(rho3, center)?, &opts.sdp);
    Ok(EpptCut {
        value: sol.e_kappa,
        method: EpptMethod::Sdp,
        status: Some(sol.status),
        duality_gap: sol.duality_gap,
        iterations: sol.iterations,
    })
}

/// One evaluated grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub lambda: f64,
    pub gamma: f64,
    pub geometry: Geometry,
    pub chain: Chain,
    pub record: MqcRecord<f64>,
    pub c_alpha: f64,
    pub e_ppt: Option<[EpptCut; 3]>,
}

impl Row {
    pub fn value(&self, column: Column) -> Option<f64> {
        let r = &self.record;
        match column {
            Column::N3 => Some(r.n3),
            Column::T3 => Some(r.t3),
            Column::TauUb => r.tau_ub,
            Column::TauLb => Some(r.tau_lb),
            Column::CAlpha => Some(self.c_alpha),
            Column::NegI => Some(r.bipartite_negativities[0]),
            Column::NegJ => Some(r.bipartite_negativities[1]),
            Column::NegK => Some(r.bipartite_negativities[2]),
        }
    }

    /// First SDP cut that did not converge.
    pub fn sdp_failure(&self) -> Option<SdpStatus> {
        self.e_ppt?
            .iter()
            .filter_map(|c| c.status)
            .find(|s| *s != SdpStatus::Converged)
    }

    /// Status text: `ok`, `sdp-<status>`, `tau-ub-negative`, joined by `+`.
    pub fn status(&self) -> String {
        let mut flags = Vec::new();
        if let Some(s) = self.sdp_failure() {
            flags.push(format!("sdp-{s}"));
        }
        if self.record.tau_ub.is_some_and(|t| t < 0.0) {
            flags.push("tau-ub-negative".to_string());
        }
        if flags.is_empty() {
            "ok".to_string()
        } else {
            flags.join("+")
        }
    }
}

/// Evaluates every measure for one ground state.
pub fn evaluate(
    geometry: Geometry,
    params: &Params<f64>,
    opts: &EvalOptions,
) -> AnalysisResult<Row> {
    params.validate()?;
    geometry.check(params.chain)?;
    let rho = rdm3(geometry, params)?;
    evaluate_state(&rho, geometry, params, opts)
}

pub(crate) fn evaluate_state(
    rho: &Density<f64>,
    geometry: Geometry,
    params: &Params<f64>,
    opts: &EvalOptions,
) -> AnalysisResult<Row> {
    let e_ppt = if opts.with_tau_ub {
        Some([
            e_ppt_cut(rho, 0, opts)?,
            e_ppt_cut(rho, 1, opts)?,
            e_ppt_cut(rho, 2, opts)?,
        ])
    } else {
        None
    };
    let record = MqcRecord::compute(rho, e_ppt.map(|e| e.map(|c| c.value)))?;
    let c_alpha = concurrence(&partial_trace(rho, &[0, 1])?)?;
    Ok(Row {
        lambda: params.lambda,
        gamma: params.gamma,
        geometry,
        chain: params.chain,
        record,
        c_alpha,
        e_ppt,
    })
}

/// A single column sampled along λ.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub lambda: Vec<f64>,
    pub values: Vec<f64>,
}

impl Series {
    pub fn new(lambda: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(lambda.len(), values.len(), "series length mismatch");
        Self { lambda, values }
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    /// Index of the smallest value.
    pub fn argmin(&self) -> Option<usize> {
        self.values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k)
    }

    /// Common spacing, or an error when the abscissae are not uniform.
    pub fn spacing(&self) -> AnalysisResult<f64> {
        if self.len() < 2 {
            return Err(AnalysisError::TooFewRows {
                needed: 2,
                got: self.len(),
            });
        }
        let h = (self.lambda[self.len() - 1] - self.lambda[0]) / (self.len() - 1) as f64;
        let uniform = self
            .lambda
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-6 * h.abs());
        if !uniform || h <= 0.0 {
            return Err(AnalysisError::NonUniformGrid);
        }
        Ok(h)
    }

    /// Piecewise-linear interpolation; `None` outside the sampled range.
    pub fn interpolate(&self, x: f64) -> Option<f64> {
        let n = self.len();
        if n == 0 || x < self.lambda[0] || x > self.lambda[n - 1] {
            return None;
        }
        let k = self
            .lambda
            .partition_point(|&l| l <= x)
            .clamp(1, n.max(2) - 1);
        if n == 1 {
            return Some(self.values[0]);
        }
        let (x0, x1) = (self.lambda[k - 1], self.lambda[k]);
        let t = if x1 > x0 { (x - x0) / (x1 - x0) } else { 0.0 };
        Some(self.values[k - 1] + t * (self.values[k] - self.values[k - 1]))
    }
}

/// Rows of one sweep at fixed γ, geometry and chain, sorted by λ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub gamma: f64,
    pub geometry: Geometry,
    pub chain: Chain,
    pub grid: LambdaGrid,
    pub options_tau_ub: bool,
    pub rows: Vec<Row>,
}

impl SweepTable {
    pub fn column(&self, column: Column) -> AnalysisResult<Series> {
        let values = self
            .rows
            .iter()
            .map(|r| r.value(column).ok_or(AnalysisError::MissingColumn(column)))
            .collect::<AnalysisResult<Vec<f64>>>()?;
        Ok(Series::new(
            self.rows.iter().map(|r| r.lambda).collect(),
            values,
        ))
    }

    pub fn params(&self, lambda: f64) -> AnalysisResult<Params<f64>> {
        Ok(Params::new(lambda, self.gamma, self.chain)?)
    }

    pub fn flagged_rows(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.status() != "ok")
    }
}

/// Evaluates the grid in parallel; the rows come back in grid order.
pub fn sweep(
    columns: &[Column],
    geometry: Geometry,
    gamma: f64,
    grid: LambdaGrid,
    chain: Chain,
) -> AnalysisResult<SweepTable> {
    sweep_with(
        &EvalOptions::for_columns(columns),
        geometry,
        gamma,
        grid,
        chain,
    )
}

pub fn sweep_with(
    opts: &EvalOptions,
    geometry: Geometry,
    gamma: f64,
    grid: LambdaGrid,
    chain: Chain,
) -> AnalysisResult<SweepTable> {
    Params::new(grid.start, gamma, chain)?;
    geometry.check(chain)?;
    let rows = grid
        .points()
        .into_par_iter()
        .map(|lambda| evaluate(geometry, &Params::new(lambda, gamma, chain)?, opts))
        .collect::<AnalysisResult<Vec<Row>>>()?;
    Ok(SweepTable {
        gamma,
        geometry,
        chain,
        grid,
        options_tau_ub: opts.with_tau_ub,
        rows,
    })
}

/// Central differences in the interior, second-order one-sided differences at
/// the two ends.
pub fn derivative(series: &Series) -> AnalysisResult<Series> {
    let n = series.len();
    if n < 3 {
        return Err(AnalysisError::TooFewRows { needed: 3, got: n });
    }
    let h = series.spacing()?;
    let y = &series.values;
    let d = (0..n)
        .map(|k| match k {
            0 => (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h),
            k if k == n - 1 => (3.0 * y[k] - 4.0 * y[k - 1] + y[k - 2]) / (2.0 * h),
            k => (y[k + 1] - y[k - 1]) / (2.0 * h),
        })
        .collect();
    Ok(Series::new(series.lambda.clone(), d))
}

/// Value of `column` at a single λ for the configuration of `table`.
pub(crate) fn column_at(
    column: Column,
    geometry: Geometry,
    gamma: f64,
    chain: Chain,
    lambda: f64,
) -> AnalysisResult<f64> {
    let row = evaluate(
        geometry,
        &Params::new(lambda, gamma, chain)?,
        &EvalOptions::for_columns(&[column]),
    )?;
    row.value(column)
        .ok_or(AnalysisError::MissingColumn(column))
}

#[cfg(test)]
mod tests;
