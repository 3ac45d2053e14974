//! Tripartite quantum correlations in three-spin reduced states of the
//! periodic transverse-field XY chain.
//!
//! The numerical core is generic over `f32`/`f64`; the aliases below fix the
//! precision to `f64`, which is what [`analysis`] uses throughout.

pub mod analysis;
pub mod edsim;
pub mod linalg;
pub mod measures;
pub mod quadrature;
pub mod scalar;
pub mod sdpsolver;
pub mod states;
pub mod xychain;

pub type ComplexMatrix = linalg::CMatrix<f64>;
pub type DensityMatrix = linalg::Density<f64>;
pub type ModelParams = xychain::Params<f64>;
pub type MqcRecord = measures::MqcRecord<f64>;
pub type SdpSolution = sdpsolver::SdpSolution<f64>;
