//! Dense complex linear algebra for the small matrices that appear in
//! three-qubit state analysis.
//!
//! Composite indices follow the convention that the leftmost subsystem is
//! the most significant digit.

mod chol;
mod eig;
mod matrix;
mod ops;
mod svd;

pub use chol::{cholesky, hpd_inverse, lower_inverse};
pub use eig::{eigvalsh, hermitian_eig};
pub use matrix::CMatrix;
pub use ops::{
    determinant, matrix_sqrt_psd, partial_trace, partial_trace_raw, partial_transpose,
    partial_transpose_raw, permute_subsystems, realignment, trace_norm,
};
pub use svd::singular_values;

use thiserror::Error;

use crate::scalar::{Real, C};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not Hermitian: max |M - M^dagger| = {0:e}")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite: eigenvalue {0:e}")]
    NotPsd(f64),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("subsystem {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },
    #[error("keep set must name at least one subsystem")]
    EmptyKeep,
    #[error("duplicate subsystem {0} in keep set")]
    DuplicateSubsystem(usize),
    #[error("expected two subsystems, found {0}")]
    NotBipartite(usize),
    #[error("subsystem dimensions {dims:?} do not multiply to {dim}")]
    DimsMismatch { dims: Vec<usize>, dim: usize },
    #[error("trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub type LinalgResult<T> = Result<T, LinalgError>;

/// Hermitian, unit-trace, positive semidefinite matrix with a declared
/// tensor-product structure.
#[derive(Clone, Debug, PartialEq)]
pub struct Density<T> {
    matrix: CMatrix<T>,
    dims: Vec<usize>,
}

impl<T: Real> Density<T> {
    /// Validates and wraps a density matrix.
    ///
    /// Hermiticity and trace are checked to 1e-10, positivity to -1e-9
    /// (looser for `f32`).
    pub fn new(matrix: CMatrix<T>, dims: Vec<usize>) -> LinalgResult<Self> {
        let rho = Self::from_parts(matrix, dims)?;
        let herm = rho.matrix.hermiticity_error();
        if herm > T::tol(1e-10) {
            return Err(LinalgError::NotHermitian(herm.as_f64()));
        }
        let tr = rho.matrix.trace().re;
        if (tr - T::one()).abs() > T::tol(1e-10) {
            return Err(LinalgError::BadTrace(tr.as_f64()));
        }
        let vals = eigvalsh(&rho.matrix.hermitize())?;
        let min = vals.last().copied().unwrap_or_else(T::zero);
        if min < -T::tol(1e-9) {
            return Err(LinalgError::NotPsd(min.as_f64()));
        }
        Ok(rho)
    }

    /// Wraps a matrix after checking only shapes.
    pub fn from_parts(matrix: CMatrix<T>, dims: Vec<usize>) -> LinalgResult<Self> {
        if !matrix.is_square() {
            return Err(LinalgError::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        if dims.iter().product::<usize>() != matrix.rows() || dims.is_empty() {
            return Err(LinalgError::DimsMismatch {
                dims,
                dim: matrix.rows(),
            });
        }
        Ok(Self { matrix, dims })
    }

    /// n-qubit state from a square matrix of side 2^n.
    pub fn qubits(matrix: CMatrix<T>) -> LinalgResult<Self> {
        let dim = matrix.rows();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(LinalgError::DimsMismatch { dims: vec![], dim });
        }
        let n = dim.trailing_zeros() as usize;
        Self::new(matrix, vec![2; n])
    }

    /// |ψ⟩⟨ψ| for a normalized or unnormalized vector.
    pub fn pure(psi: &[C<T>], dims: Vec<usize>) -> LinalgResult<Self> {
        let norm2: T = psi.iter().map(|z| z.norm_sqr()).sum();
        let scaled: Vec<C<T>> = psi.iter().map(|z| z / norm2.sqrt()).collect();
        Self::from_parts(CMatrix::outer(&scaled, &scaled), dims)
    }

    /// Tensor product ρ ⊗ σ, concatenating subsystem lists.
    pub fn kron(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            matrix: self.matrix.kron(&other.matrix),
            dims,
        }
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Regroups the subsystems as (first `k`) | (rest).
    pub fn as_bipartite(&self, k: usize) -> Self {
        let a: usize = self.dims[..k].iter().product();
        let b: usize = self.dims[k..].iter().product();
        Self {
            matrix: self.matrix.clone(),
            dims: vec![a, b],
        }
    }

    /// Copy with the matrix replaced by its Hermitian part.
    pub fn hermitized(&self) -> Self {
        Self {
            matrix: self.matrix.hermitize(),
            dims: self.dims.clone(),
        }
    }

    pub fn eigenvalues(&self) -> LinalgResult<Vec<T>> {
        eigvalsh(&self.matrix.hermitize())
    }
}
