use super::{XyError, XyResult};
use crate::scalar::{creal, Real, C};

fn check_gamma<T: Real>(gamma: T) -> XyResult<()> {
    if !(gamma > T::zero() && gamma < T::one()) {
        return Err(XyError::GammaBoundary(gamma.as_f64()));
    }
    Ok(())
}

/// λ_f = 1/√(1 − γ²), where the ground state is a product state.
pub fn factorization_lambda<T: Real>(gamma: T) -> XyResult<T> {
    check_gamma(gamma)?;
    Ok(T::one() / (T::one() - gamma * gamma).sqrt())
}

/// Single-site tilt θ with cos θ = √((1−γ)/(1+γ)).
pub fn factorized_theta<T: Real>(gamma: T) -> XyResult<T> {
    check_gamma(gamma)?;
    Ok(((T::one() - gamma) / (T::one() + gamma)).sqrt().acos())
}

fn product_state<T: Real>(length: usize, theta: T) -> Vec<C<T>> {
    let half = theta * T::lit(0.5);
    let (up, down) = (half.sin(), half.cos());
    (0..1usize << length)
        .map(|idx| {
            let ups = (idx.count_ones()) as i32;
            let zeros = length as i32 - ups;
            // bit 0 is σᶻ = +1 with amplitude sin(θ/2); bit 1 carries cos(θ/2)
            creal(up.powi(zeros) * down.powi(ups))
        })
        .collect()
}

/// Even- and odd-parity ground states at λ_f, (|φ₊⟩ ± |φ₋⟩)/N± with
/// |φ±⟩ = ⊗(±sin(θ/2)|0⟩ + cos(θ/2)|1⟩).
pub fn factorized_pair<T: Real>(length: usize, gamma: T) -> XyResult<(Vec<C<T>>, Vec<C<T>>)> {
    if length.is_multiple_of(2) || !(3..=20).contains(&length) {
        return Err(XyError::DenseLength(length));
    }
    let theta = factorized_theta(gamma)?;
    let plus = product_state(length, theta);
    let minus = product_state(length, -theta);
    let combine = |s: T| {
        let v: Vec<C<T>> = plus.iter().zip(&minus).map(|(a, b)| a + b * s).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        v.into_iter().map(|z| z / norm).collect::<Vec<_>>()
    };
    Ok((combine(T::one()), combine(-T::one())))
}

/// ⟨φ₊|φ₋⟩ = cos^L θ.
pub fn factorized_overlap<T: Real>(length: usize, gamma: T) -> XyResult<T> {
    Ok(factorized_theta(gamma)?.cos().powi(length as i32))
}
