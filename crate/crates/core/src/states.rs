//! Reference states and random state generators.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CMatrix, Density};
use crate::scalar::{cplx, creal, Real, C};

fn ket<T: Real>(amps: &[(usize, f64)], dim: usize) -> Vec<C<T>> {
    let mut v = vec![creal(T::zero()); dim];
    for &(i, a) in amps {
        v[i] = creal(T::lit(a));
    }
    v
}

/// (|00⟩ + |11⟩)/√2.
pub fn bell<T: Real>() -> Density<T> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Density::pure(&ket(&[(0, h), (3, h)], 4), vec![2, 2]).expect("valid shape")
}

/// (|01⟩ − |10⟩)/√2.
pub fn singlet<T: Real>() -> Density<T> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Density::pure(&ket(&[(1, h), (2, -h)], 4), vec![2, 2]).expect("valid shape")
}

/// (|000⟩ + |111⟩)/√2.
pub fn ghz<T: Real>() -> Density<T> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Density::pure(&ket(&[(0, h), (7, h)], 8), vec![2, 2, 2]).expect("valid shape")
}

/// (|001⟩ + |010⟩ + |100⟩)/√3.
pub fn w<T: Real>() -> Density<T> {
    let a = 1.0 / 3f64.sqrt();
    Density::pure(&ket(&[(1, a), (2, a), (4, a)], 8), vec![2, 2, 2]).expect("valid shape")
}

/// p|Ψ⁻⟩⟨Ψ⁻| + (1−p) I/4.
pub fn werner<T: Real>(p: T) -> Density<T> {
    let s = singlet::<T>().into_matrix().scale(p);
    let mixed = CMatrix::identity(4).scale((T::one() - p) / T::lit(4.0));
    Density::from_parts(&s + &mixed, vec![2, 2]).expect("valid shape")
}

pub fn maximally_mixed<T: Real>(n_qubits: usize) -> Density<T> {
    let d = 1 << n_qubits;
    Density::from_parts(
        CMatrix::identity(d).scale(T::one() / T::lit(d as f64)),
        vec![2; n_qubits],
    )
    .expect("valid shape")
}

/// Computational basis projector |index⟩⟨index| on `n_qubits`.
pub fn basis<T: Real>(n_qubits: usize, index: usize) -> Density<T> {
    let d = 1 << n_qubits;
    Density::pure(&ket(&[(index, 1.0)], d), vec![2; n_qubits]).expect("valid shape")
}

/// Haar-distributed pure state vector of dimension `dim`.
pub fn random_ket<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<C<T>> {
    let mut v: Vec<C<T>> = (0..dim)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            cplx(T::lit(re), T::lit(im))
        })
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}

pub fn random_pure<T: Real, R: Rng + ?Sized>(rng: &mut R, n_qubits: usize) -> Density<T> {
    Density::pure(&random_ket(rng, 1 << n_qubits), vec![2; n_qubits]).expect("valid shape")
}

/// Random mixed state G G† / Tr(G G†) with a Ginibre matrix G of the given
/// rank.
pub fn random_mixed<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    n_qubits: usize,
    rank: usize,
) -> Density<T> {
    let d = 1 << n_qubits;
    let mut g = CMatrix::zeros(d, rank);
    for i in 0..d {
        for j in 0..rank {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            g[(i, j)] = cplx(T::lit(re), T::lit(im));
        }
    }
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    Density::from_parts(m.scale(T::one() / tr).hermitize(), vec![2; n_qubits]).expect("valid shape")
}

/// Tensor product of independent random single-qubit states, each pure or
/// mixed.
pub fn random_product<T: Real, R: Rng + ?Sized>(rng: &mut R, n_qubits: usize) -> Density<T> {
    let mut out: Option<Density<T>> = None;
    for _ in 0..n_qubits {
        let rank = rng.gen_range(1..=2);
        let site = random_mixed::<T, R>(rng, 1, rank);
        out = Some(match out {
            None => site,
            Some(acc) => acc.kron(&site),
        });
    }
    out.expect("at least one qubit")
}
