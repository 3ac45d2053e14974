//! Ground-state correlations of the periodic transverse-field XY chain
//!
//! H = −λ Σ [(1+γ)/2 σˣσˣ + (1−γ)/2 σʸσʸ] + Σ σᶻ
//!
//! and the exact three-spin reduced density matrices built from them.
//! Basis states use |0⟩ for σᶻ = +1; the first site of a triple is the most
//! significant bit.

mod correlation;
mod factorized;
mod rdm;
mod wick;

pub use correlation::{g_finite, g_infinite, CorrelationCache, CorrelationTable};
pub use factorized::{factorization_lambda, factorized_overlap, factorized_pair, factorized_theta};
pub use rdm::{rdm2, rdm3, rdm3_from_table, TripleCorrelators};
pub use wick::{pauli_expectation, Pauli};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum XyError {
    #[error("lambda must be finite and non-negative, got {0}")]
    Lambda(f64),
    #[error("gamma must lie in [0, 1], got {0}")]
    Gamma(f64),
    #[error("chain length must be odd, got L = {0}")]
    EvenLength(usize),
    #[error("chain length must be at least 5, got L = {0}")]
    ShortChain(usize),
    #[error("separations must be at least 1, got (alpha, beta) = ({0}, {1})")]
    Separation(usize, usize),
    #[error("geometry (alpha, beta) = ({alpha}, {beta}) needs alpha + beta <= L - 1 = {}", .length - 1)]
    Geometry {
        alpha: usize,
        beta: usize,
        length: usize,
    },
    #[error("gamma must lie strictly inside (0, 1), got {0}")]
    GammaBoundary(f64),
    #[error("dense state vectors are limited to odd L in 3..=20, got L = {0}")]
    DenseLength(usize),
}

pub type XyResult<T> = Result<T, XyError>;

/// Chain length: thermodynamic limit or a finite periodic ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chain {
    Infinite,
    Finite(usize),
}

impl Chain {
    pub fn length(&self) -> Option<usize> {
        match self {
            Chain::Infinite => None,
            Chain::Finite(l) => Some(*l),
        }
    }

    pub fn validate(&self) -> XyResult<()> {
        if let Chain::Finite(l) = *self {
            if l % 2 == 0 {
                return Err(XyError::EvenLength(l));
            }
            if l < 5 {
                return Err(XyError::ShortChain(l));
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for Chain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Chain::Infinite => write!(f, "inf"),
            Chain::Finite(l) => write!(f, "{l}"),
        }
    }
}

/// Coupling ratio λ, anisotropy γ and chain length of one ground state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params<T> {
    pub lambda: T,
    pub gamma: T,
    pub chain: Chain,
}

impl<T: Real> Params<T> {
    pub fn new(lambda: T, gamma: T, chain: Chain) -> XyResult<Self> {
        let p = Self {
            lambda,
            gamma,
            chain,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn infinite(lambda: T, gamma: T) -> XyResult<Self> {
        Self::new(lambda, gamma, Chain::Infinite)
    }

    pub fn finite(lambda: T, gamma: T, length: usize) -> XyResult<Self> {
        Self::new(lambda, gamma, Chain::Finite(length))
    }

    pub fn validate(&self) -> XyResult<()> {
        if !(self.lambda >= T::zero()) || !self.lambda.is_finite() {
            return Err(XyError::Lambda(self.lambda.as_f64()));
        }
        if !(self.gamma >= T::zero() && self.gamma <= T::one()) {
            return Err(XyError::Gamma(self.gamma.as_f64()));
        }
        self.chain.validate()
    }

    pub fn with_lambda(&self, lambda: T) -> Self {
        Self { lambda, ..*self }
    }
}

/// Site separations of a triple (i − α, i, i + β).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Geometry {
    pub alpha: usize,
    pub beta: usize,
}

impl Geometry {
    pub fn new(alpha: usize, beta: usize) -> XyResult<Self> {
        if alpha == 0 || beta == 0 {
            return Err(XyError::Separation(alpha, beta));
        }
        Ok(Self { alpha, beta })
    }

    pub fn span(&self) -> usize {
        self.alpha + self.beta
    }

    pub fn mirrored(&self) -> Self {
        Self {
            alpha: self.beta,
            beta: self.alpha,
        }
    }

    /// Site offsets of the triple relative to its first site.
    pub fn offsets(&self) -> [usize; 3] {
        [0, self.alpha, self.alpha + self.beta]
    }

    pub fn check(&self, chain: Chain) -> XyResult<()> {
        if self.alpha == 0 || self.beta == 0 {
            return Err(XyError::Separation(self.alpha, self.beta));
        }
        if let Chain::Finite(length) = chain {
            if self.span() + 1 > length {
                return Err(XyError::Geometry {
                    alpha: self.alpha,
                    beta: self.beta,
                    length,
                });
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for Geometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.alpha, self.beta)
    }
}
