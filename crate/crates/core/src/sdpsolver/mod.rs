//! PPT-exact entanglement cost of a bipartite cut,
//!
//! E_κ(ρ) = log₂ min { Tr S : S ⪰ 0, −S^Γ ⪯ ρ^Γ ⪯ S^Γ },
//!
//! with Γ the partial transpose of one subsystem, solved by a feasible-start
//! primal-dual interior-point method.
//!
//! The program is posed over the Hermitian variable S with the three slack
//! blocks X₀ = S, X₁ = S^Γ − ρ^Γ, X₂ = S^Γ + ρ^Γ. The dual multipliers
//! Z₀, Z₁, Z₂ ⪰ 0 satisfy Z₀ + Z₁^Γ + Z₂^Γ = I and certify the lower bound
//! Tr(ρ^Γ Z₁) − Tr(ρ^Γ Z₂). Search directions use the HKM linearization of
//! XZ = μI with a Mehrotra predictor-corrector step.

mod ipm;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{eigvalsh, partial_transpose_raw, trace_norm, CMatrix, Density, LinalgError};
use crate::scalar::Real;

pub use ipm::{binegativity, binegativity_min_eigenvalue};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SdpError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("subsystem {center} out of range for {count} subsystems")]
    Center { center: usize, count: usize },
}

pub type SdpResult<T> = Result<T, SdpError>;

/// One instance of the entanglement-cost program.
#[derive(Clone, Debug)]
pub struct SdpProblem<T> {
    rho: Density<T>,
    center: usize,
}

impl<T: Real> SdpProblem<T> {
    /// `rho` is revalidated as a density matrix; `center` names the
    /// subsystem whose indices are transposed.
    pub fn new(rho: &Density<T>, center: usize) -> SdpResult<Self> {
        let count = rho.dims().len();
        if center >= count {
            return Err(SdpError::Center { center, count });
        }
        let rho = Density::new(rho.matrix().clone(), rho.dims().to_vec())?;
        Ok(Self { rho, center })
    }

    pub fn rho(&self) -> &Density<T> {
        &self.rho
    }

    pub fn center(&self) -> usize {
        self.center
    }

    /// ρ^Γ.
    pub fn transposed(&self) -> CMatrix<T> {
        partial_transpose_raw(self.rho.matrix(), self.rho.dims(), self.center)
    }

    pub(crate) fn pt(&self, m: &CMatrix<T>) -> CMatrix<T> {
        partial_transpose_raw(m, self.rho.dims(), self.center)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SdpStatus {
    Converged,
    MaxIterations,
    InfeasibleNumerics,
}

impl std::fmt::Display for SdpStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SdpStatus::Converged => "converged",
            SdpStatus::MaxIterations => "max-iterations",
            SdpStatus::InfeasibleNumerics => "infeasible-numerics",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SdpOptions {
    /// Stop when Tr S minus the dual objective falls below this.
    pub gap_tol: f64,
    /// Largest tolerated entry of I − (Z₀ + Z₁^Γ + Z₂^Γ).
    pub feas_tol: f64,
    pub max_iter: usize,
    /// Fraction of the step to the cone boundary actually taken.
    pub step_fraction: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-10,
            feas_tol: 1e-10,
            max_iter: 200,
            step_fraction: 0.98,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SdpSolution<T> {
    /// Tr S of the returned iterate.
    pub optimum: T,
    /// log₂ of the optimum.
    pub e_kappa: T,
    pub s_matrix: CMatrix<T>,
    /// Dual multipliers Z₀, Z₁, Z₂.
    pub dual: [CMatrix<T>; 3],
    /// Tr S minus the dual objective.
    pub duality_gap: T,
    pub iterations: usize,
    pub status: SdpStatus,
}

impl<T: Real> SdpSolution<T> {
    pub fn converged(&self) -> bool {
        self.status == SdpStatus::Converged
    }
}

pub fn solve_kappa<T: Real>(problem: &SdpProblem<T>) -> SdpSolution<T> {
    ipm::solve(problem, &SdpOptions::default())
}

pub fn solve_kappa_with<T: Real>(problem: &SdpProblem<T>, options: &SdpOptions) -> SdpSolution<T> {
    ipm::solve(problem, options)
}

/// Solves the program for each of the three one-versus-two cuts of a
/// three-qubit state.
pub fn e_ppt_triple<T: Real>(rho3: &Density<T>) -> SdpResult<[SdpSolution<T>; 3]> {
    let solve =
        |x: usize| -> SdpResult<SdpSolution<T>> { Ok(solve_kappa(&SdpProblem::new(rho3, x)?)) };
    Ok([solve(0)?, solve(1)?, solve(2)?])
}

/// Independent audit of a returned solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// Minimum eigenvalues of S, S^Γ − ρ^Γ and S^Γ + ρ^Γ.
    pub min_constraint_eigenvalues: [f64; 3],
    /// Minimum eigenvalues of the three dual blocks.
    pub min_dual_eigenvalues: [f64; 3],
    /// Largest entry of I − (Z₀ + Z₁^Γ + Z₂^Γ).
    pub dual_residual: f64,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub gap: f64,
    pub log_negativity: f64,
    pub feasible: bool,
    pub optimal: bool,
}

pub fn verify_solution<T: Real>(
    problem: &SdpProblem<T>,
    solution: &SdpSolution<T>,
) -> VerificationReport {
    let r = problem.transposed();
    let s = solution.s_matrix.hermitize();
    let s_pt = problem.pt(&s);
    let min_eig = |m: &CMatrix<T>| -> f64 {
        eigvalsh(&m.hermitize())
            .ok()
            .and_then(|v| v.last().copied())
            .map(|v| v.as_f64())
            .unwrap_or(f64::NAN)
    };
    let min_constraint_eigenvalues = [min_eig(&s), min_eig(&(&s_pt - &r)), min_eig(&(&s_pt + &r))];
    let [z0, z1, z2] = &solution.dual;
    let min_dual_eigenvalues = [min_eig(z0), min_eig(z1), min_eig(z2)];
    let adjoint = &(z0 + &problem.pt(z1)) + &problem.pt(z2);
    let dual_residual = (&CMatrix::identity(s.rows()) - &adjoint).max_abs().as_f64();
    let primal_objective = s.trace().re.as_f64();
    let dual_objective = (r.trace_of_product(z1).re - r.trace_of_product(z2).re).as_f64();
    let gap = primal_objective - dual_objective;
    let log_negativity = trace_norm(&r).log2().as_f64();
    let feasible = min_constraint_eigenvalues.iter().all(|&v| v >= -1e-8);
    let dual_feasible = min_dual_eigenvalues.iter().all(|&v| v >= -1e-8) && dual_residual < 1e-8;
    let optimal = feasible && dual_feasible && gap.abs() < 1e-6;
    VerificationReport {
        min_constraint_eigenvalues,
        min_dual_eigenvalues,
        dual_residual,
        primal_objective,
        dual_objective,
        gap,
        log_negativity,
        feasible,
        optimal,
    }
}
