use crate::linalg::{matrix_sqrt_psd, singular_values, Density, LinalgError, LinalgResult};
use crate::scalar::Real;

/// Uhlmann fidelity Tr√(√ρ σ √ρ) = ‖√ρ √σ‖₁, clamped to [0, 1].
pub fn fidelity<T: Real>(rho: &Density<T>, sigma: &Density<T>) -> LinalgResult<T> {
    if rho.dims() != sigma.dims() {
        return Err(LinalgError::DimensionMismatch(format!(
            "{:?} vs {:?}",
            rho.dims(),
            sigma.dims()
        )));
    }
    let a = matrix_sqrt_psd(rho.matrix())?;
    let b = matrix_sqrt_psd(sigma.matrix())?;
    let f: T = singular_values(&(&a * &b))
        .iter()
        .copied()
        .fold(T::zero(), |acc, s| acc + s);
    Ok(f.max(T::zero()).min(T::one()))
}
