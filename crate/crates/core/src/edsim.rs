//! Exact diagonalization of short periodic XY chains, used as an
//! independent oracle for the analytic reduced states.
//!
//! Site 0 is the most significant bit of a basis index and bit value 0 is
//! σᶻ = +1. The Hamiltonian is applied matrix-free inside a fixed fermion
//! parity sector P = Π(−σᶻ) and the lowest state is found by Lanczos with
//! full reorthogonalization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::{CMatrix, Density};
use crate::scalar::{creal, Real, C};
use crate::xychain::{Chain, Params};

const SEED: u64 = 0x5eed_1a2c;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EdError {
    #[error("exact diagonalization needs odd L in 5..=13, got L = {0}")]
    Length(usize),
    #[error("exact diagonalization needs a finite chain")]
    InfiniteChain,
    #[error("Lanczos did not converge: residual {residual:e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("state length {0} is not a power of two")]
    StateLength(usize),
    #[error("site {site} listed twice or outside 0..{length}")]
    Site { site: usize, length: usize },
}

pub type EdResult<T> = Result<T, EdError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Parity of a basis index: even when the number of σᶻ = +1 sites is even.
    pub fn of(index: usize, length: usize) -> Self {
        let ups = length as u32 - index.count_ones();
        if ups.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Periodic XY Hamiltonian on a ring of L sites.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian<T> {
    length: usize,
    lambda: T,
    gamma: T,
}

impl<T: Real> Hamiltonian<T> {
    pub fn new(length: usize, lambda: T, gamma: T) -> EdResult<Self> {
        if length.is_multiple_of(2) || !(5..=13).contains(&length) {
            return Err(EdError::Length(length));
        }
        Ok(Self {
            length,
            lambda,
            gamma,
        })
    }

    pub fn from_params(params: &Params<T>) -> EdResult<Self> {
        match params.chain {
            Chain::Finite(l) => Self::new(l, params.lambda, params.gamma),
            Chain::Infinite => Err(EdError::InfiniteChain),
        }
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dim(&self) -> usize {
        1 << self.length
    }

    fn diagonal(&self, idx: usize) -> T {
        T::lit(self.length as f64 - 2.0 * idx.count_ones() as f64)
    }

    /// Calls `f(target, amplitude)` for every off-diagonal element in
    /// column `idx`.
    fn for_each_hop(&self, idx: usize, mut f: impl FnMut(usize, T)) {
        let l = self.length;
        let same = -self.lambda * self.gamma;
        let diff = -self.lambda;
        for site in 0..l {
            let next = (site + 1) % l;
            let (bi, bj) = (l - 1 - site, l - 1 - next);
            let mask = (1usize << bi) | (1usize << bj);
            let aligned = ((idx >> bi) & 1) == ((idx >> bj) & 1);
            let amp = if aligned { same } else { diff };
            if amp != T::zero() {
                f(idx ^ mask, amp);
            }
        }
    }

    /// Dense matrix in the full 2^L basis (practical for L ≤ 11).
    pub fn to_dense(&self) -> CMatrix<T> {
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for idx in 0..n {
            m[(idx, idx)] = creal(self.diagonal(idx));
            self.for_each_hop(idx, |to, amp| m[(to, idx)] += creal(amp));
        }
        m
    }

    /// H·v on the full space.
    pub fn apply(&self, v: &[C<T>]) -> Vec<C<T>> {
        let mut out = vec![creal(T::zero()); v.len()];
        for (idx, &x) in v.iter().enumerate() {
            if x.re == T::zero() && x.im == T::zero() {
                continue;
            }
            out[idx] += x * self.diagonal(idx);
            self.for_each_hop(idx, |to, amp| out[to] += x * amp);
        }
        out
    }

    /// Lowest eigenpair inside one parity sector.
    pub fn sector_ground_state(&self, parity: Parity) -> EdResult<GroundState<T>> {
        let sector = Sector::new(self.length, parity);
        let (energy, vec, iterations) = lanczos(|x, y| sector.apply(self, x, y), sector.len())?;
        let mut state = vec![creal(T::zero()); self.dim()];
        for (k, &idx) in sector.states.iter().enumerate() {
            state[idx] = creal(vec[k]);
        }
        let residual = residual_norm(self, &state, energy);
        Ok(GroundState {
            energy,
            state,
            parity,
            residual,
            iterations,
        })
    }

    /// Global ground state; when both sectors are degenerate within 1e-9 the
    /// even-parity state is returned.
    pub fn ground_state(&self) -> EdResult<GroundState<T>> {
        let even = self.sector_ground_state(Parity::Even)?;
        let odd = self.sector_ground_state(Parity::Odd)?;
        if odd.energy < even.energy - T::tol(1e-9) {
            Ok(odd)
        } else {
            Ok(even)
        }
    }
}

fn residual_norm<T: Real>(h: &Hamiltonian<T>, state: &[C<T>], energy: T) -> T {
    let hv = h.apply(state);
    hv.iter()
        .zip(state)
        .map(|(a, b)| (a - b * energy).norm_sqr())
        .sum::<T>()
        .sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundState<T> {
    pub energy: T,
    /// Normalized amplitudes over the full 2^L basis.
    pub state: Vec<C<T>>,
    pub parity: Parity,
    /// ‖H v − E v‖.
    pub residual: T,
    pub iterations: usize,
}

struct Sector {
    states: Vec<usize>,
    position: Vec<u32>,
}

impl Sector {
    fn new(length: usize, parity: Parity) -> Self {
        let n = 1usize << length;
        let states: Vec<usize> = (0..n)
            .filter(|&i| Parity::of(i, length) == parity)
            .collect();
        let mut position = vec![u32::MAX; n];
        for (k, &s) in states.iter().enumerate() {
            position[s] = k as u32;
        }
        Self { states, position }
    }

    fn len(&self) -> usize {
        self.states.len()
    }

    fn apply<T: Real>(&self, h: &Hamiltonian<T>, x: &[T], y: &mut [T]) {
        for (k, &idx) in self.states.iter().enumerate() {
            let mut acc = h.diagonal(idx) * x[k];
            h.for_each_hop(idx, |to, amp| acc += amp * x[self.position[to] as usize]);
            y[k] = acc;
        }
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// Lowest eigenpair of a real symmetric operator.
fn lanczos<T: Real>(apply: impl Fn(&[T], &mut [T]), dim: usize) -> EdResult<(T, Vec<T>, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut start: Vec<T> = (0..dim).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect();
    let tol = T::tol(1e-12);
    let mut total = 0;
    let mut best = (T::infinity(), start.clone(), T::infinity());
    for _restart in 0..8 {
        let (theta, x, iters) = lanczos_pass(&apply, &start, dim.min(250), tol);
        total += iters;
        let mut hx = vec![T::zero(); dim];
        apply(&x, &mut hx);
        let res = hx
            .iter()
            .zip(&x)
            .map(|(a, b)| (*a - *b * theta).powi(2))
            .sum::<T>()
            .sqrt();
        if res < best.2 {
            best = (theta, x.clone(), res);
        }
        if res <= T::tol(1e-11) * theta.abs().max(T::one()) {
            return Ok((theta, x, total));
        }
        start = x;
    }
    if best.2 <= T::tol(1e-9) {
        return Ok((best.0, best.1, total));
    }
    Err(EdError::NoConvergence {
        residual: best.2.as_f64(),
        iterations: total,
    })
}

fn lanczos_pass<T: Real>(
    apply: &impl Fn(&[T], &mut [T]),
    start: &[T],
    max_steps: usize,
    tol: T,
) -> (T, Vec<T>, usize) {
    let dim = start.len();
    let norm = dot(start, start).sqrt();
    let mut basis: Vec<Vec<T>> = vec![start.iter().map(|v| *v / norm).collect()];
    let mut alpha: Vec<T> = Vec::new();
    let mut beta: Vec<T> = Vec::new();
    let mut w = vec![T::zero(); dim];
    let mut result = (T::zero(), vec![T::one()]);
    for j in 0..max_steps {
        apply(&basis[j], &mut w);
        let a = dot(&basis[j], &w);
        alpha.push(a);
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= c * *vi;
                }
            }
        }
        let b = dot(&w, &w).sqrt();
        let (vals, vecs) = tridiagonal_eig(&alpha, &beta);
        let lowest = (0..vals.len())
            .min_by(|&x, &y| {
                vals[x]
                    .partial_cmp(&vals[y])
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty");
        let y: Vec<T> = (0..vals.len()).map(|k| vecs[k][lowest]).collect();
        result = (vals[lowest], y);
        let estimate = b * result.1.last().copied().unwrap_or_else(T::zero).abs();
        if estimate <= tol * vals[lowest].abs().max(T::one()) || b <= T::epsilon() || j + 1 == dim {
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|x| *x / b).collect());
    }
    let (theta, y) = result;
    let mut x = vec![T::zero(); dim];
    for (coef, v) in y.iter().zip(&basis) {
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi += *coef * *vi;
        }
    }
    let n = dot(&x, &x).sqrt();
    x.iter_mut().for_each(|v| *v /= n);
    (theta, x, alpha.len())
}

/// Eigen-decomposition of a symmetric tridiagonal matrix by implicit QL.
/// Returns eigenvalues and eigenvectors as columns `z[k][i]`.
fn tridiagonal_eig<T: Real>(diag: &[T], off: &[T]) -> (Vec<T>, Vec<Vec<T>>) {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e: Vec<T> = off
        .iter()
        .copied()
        .chain(std::iter::once(T::zero()))
        .collect();
    e.truncate(n);
    let mut z: Vec<Vec<T>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { T::one() } else { T::zero() })
                .collect()
        })
        .collect();
    let two = T::lit(2.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r } else { -r });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut i = m as isize - 1;
            let mut underflow = false;
            while i >= l as isize {
                let iu = i as usize;
                let f = s * e[iu];
                let b = c * e[iu];
                r = f.hypot(g);
                e[iu + 1] = r;
                if r == T::zero() {
                    d[iu + 1] -= p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[iu + 1] - p;
                r = (d[iu] - g) * s + two * c * b;
                p = s * r;
                d[iu + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    let f = row[iu + 1];
                    row[iu + 1] = s * row[iu] + c * f;
                    row[iu] = c * row[iu] - s * f;
                }
                i -= 1;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    (d, z)
}

/// Reduced density matrix of the listed sites (first listed site is the most
/// significant qubit of the result).
pub fn reduced_state<T: Real>(state: &[C<T>], sites: &[usize]) -> EdResult<Density<T>> {
    let n = state.len();
    if !n.is_power_of_two() || n < 2 {
        return Err(EdError::StateLength(n));
    }
    let length = n.trailing_zeros() as usize;
    for (k, &s) in sites.iter().enumerate() {
        if s >= length || sites[..k].contains(&s) {
            return Err(EdError::Site { site: s, length });
        }
    }
    let k = sites.len();
    let rest: Vec<usize> = (0..length).filter(|s| !sites.contains(s)).collect();
    let bit_of = |idx: usize, site: usize| (idx >> (length - 1 - site)) & 1;
    let dk = 1usize << k;
    let dr = 1usize << rest.len();
    let mut psi = CMatrix::zeros(dk, dr);
    for (idx, &amp) in state.iter().enumerate() {
        let a = sites.iter().fold(0, |acc, &s| (acc << 1) | bit_of(idx, s));
        let b = rest.iter().fold(0, |acc, &s| (acc << 1) | bit_of(idx, s));
        psi[(a, b)] = amp;
    }
    let rho = &psi * &psi.adjoint();
    let tr = rho.trace().re;
    Density::from_parts(rho.scale(T::one() / tr).hermitize(), vec![2; k])
        .map_err(|_| EdError::StateLength(n))
}

/// ⟨ψ|Π(−σᶻ)|ψ⟩.
pub fn parity_expectation<T: Real>(state: &[C<T>]) -> T {
    let length = state.len().trailing_zeros() as usize;
    state
        .iter()
        .enumerate()
        .map(|(i, a)| match Parity::of(i, length) {
            Parity::Even => a.norm_sqr(),
            Parity::Odd => -a.norm_sqr(),
        })
        .sum()
}

/// Free-fermion ground energy −Σ_q Λ_q over integer momenta |q| ≤ (L−1)/2.
pub fn free_fermion_energy<T: Real>(length: usize, lambda: T, gamma: T) -> T {
    let half = (length as i64 - 1) / 2;
    let two_pi = T::lit(2.0) * T::PI();
    -(-half..=half)
        .map(|q| {
            let phi = two_pi * T::lit(q as f64 / length as f64);
            let (s, c) = phi.sin_cos();
            let a = T::one() + lambda * c;
            let b = lambda * gamma * s;
            (a * a + b * b).sqrt()
        })
        .sum::<T>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigvalsh;

    #[test]
    fn tridiagonal_matches_jacobi() {
        let d = [2.0, -1.0, 0.5, 3.0, 1.0];
        let e = [0.7, -0.3, 1.1, 0.2];
        let (mut vals, z) = tridiagonal_eig(&d, &e);
        let dense = CMatrix::from_fn(5, 5, |i, j| {
            creal(if i == j {
                d[i]
            } else if i + 1 == j {
                e[i]
            } else if j + 1 == i {
                e[j]
            } else {
                0.0
            })
        });
        for col in 0..5 {
            let v: Vec<C<f64>> = (0..5).map(|k| creal(z[k][col])).collect();
            let hv = dense.matvec(&v);
            for k in 0..5 {
                assert!((hv[k] - v[k] * vals[col]).norm() < 1e-12);
            }
        }
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let reference = eigvalsh(&dense).unwrap();
        for (a, b) in vals.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn field_only_limit() {
        let h = Hamiltonian::new(5, 0.0, 0.7).unwrap();
        let dense = h.to_dense();
        for idx in 0..32usize {
            let ups = 5 - idx.count_ones() as i32;
            let downs = idx.count_ones() as i32;
            assert_eq!(dense[(idx, idx)].re, (ups - downs) as f64);
        }
        let gs = h.ground_state().unwrap();
        assert!((gs.energy + 5.0).abs() < 1e-12);
        assert!((gs.state[31].norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn hamiltonian_commutes_with_parity() {
        let h = Hamiltonian::new(5, 0.8, 0.3).unwrap().to_dense();
        let p: Vec<f64> = (0..32)
            .map(|i| {
                if Parity::of(i, 5) == Parity::Even {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        let pm = CMatrix::diag(&p);
        let comm = &(&h * &pm) - &(&pm * &h);
        assert!(comm.max_abs() < 1e-12);
        assert!(h.hermiticity_error() == 0.0);
    }

    #[test]
    fn lanczos_matches_dense_spectrum() {
        let h = Hamiltonian::<f64>::new(7, 1.3, 0.4).unwrap();
        let vals = eigvalsh(&h.to_dense()).unwrap();
        let gs = h.ground_state().unwrap();
        assert!((gs.energy - vals[vals.len() - 1]).abs() < 1e-10);
        assert!(gs.residual < 1e-9);
    }

    #[test]
    fn free_fermion_energies() {
        for &(l, lam, g) in &[(5, 0.5, 1.0), (11, 1.0, 1.0), (9, 0.6, 0.3)] {
            let h = Hamiltonian::<f64>::new(l, lam, g).unwrap();
            let even = h.sector_ground_state(Parity::Even).unwrap();
            assert!(
                (even.energy - free_fermion_energy(l, lam, g)).abs() < 1e-9,
                "L={l}"
            );
        }
        let gs = Hamiltonian::<f64>::new(11, 1.0, 1.0)
            .unwrap()
            .ground_state()
            .unwrap();
        assert!((gs.energy - free_fermion_energy(11, 1.0, 1.0)).abs() < 1e-9);
    }

    #[test]
    fn degenerate_at_factorization_point() {
        let gamma: f64 = 0.5;
        let lf = 1.0 / (1.0 - gamma * gamma).sqrt();
        let h = Hamiltonian::new(9, lf, gamma).unwrap();
        let even = h.sector_ground_state(Parity::Even).unwrap();
        let odd = h.sector_ground_state(Parity::Odd).unwrap();
        assert!((even.energy - odd.energy).abs() < 1e-9);
        assert_eq!(h.ground_state().unwrap().parity, Parity::Even);
    }

    #[test]
    fn energy_decreases_with_lambda() {
        let mut last = f64::INFINITY;
        for k in 0..=10 {
            let e = Hamiltonian::new(7, 0.2 * k as f64, 0.6)
                .unwrap()
                .ground_state()
                .unwrap()
                .energy;
            assert!(e <= last + 1e-12);
            last = e;
        }
    }

    #[test]
    fn reduced_state_of_products_and_ghz() {
        let plus = [creal(std::f64::consts::FRAC_1_SQRT_2); 2];
        let zero = [creal(1.0), creal(0.0)];
        // |+⟩|0⟩|+⟩
        let mut psi = vec![creal(0.0); 8];
        for (i, p) in psi.iter_mut().enumerate() {
            *p = plus[(i >> 2) & 1] * zero[(i >> 1) & 1] * plus[i & 1];
        }
        let rho = reduced_state(&psi, &[2, 1]).unwrap();
        let expected = CMatrix::from_real(
            4,
            4,
            &[
                0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0,
            ],
        );
        assert!(rho.matrix().max_abs_diff(&expected) < 1e-15);

        let mut ghz = vec![creal(0.0); 16];
        ghz[0] = creal(std::f64::consts::FRAC_1_SQRT_2);
        ghz[15] = creal(std::f64::consts::FRAC_1_SQRT_2);
        let m = reduced_state(&ghz, &[0, 1]).unwrap();
        assert!(
            m.matrix()
                .max_abs_diff(&CMatrix::diag(&[0.5, 0.0, 0.0, 0.5]))
                < 1e-15
        );
        assert!(reduced_state(&ghz, &[1, 1]).is_err());
    }

    #[test]
    fn translation_invariance() {
        let gs = Hamiltonian::new(9, 0.9, 0.5)
            .unwrap()
            .ground_state()
            .unwrap();
        let base = reduced_state(&gs.state, &[0, 2, 3]).unwrap();
        for i in 1..9 {
            let r = reduced_state(&gs.state, &[i, (i + 2) % 9, (i + 3) % 9]).unwrap();
            assert!(r.matrix().max_abs_diff(base.matrix()) < 1e-9);
        }
    }

    #[test]
    fn nondegenerate_ground_state_has_definite_parity() {
        let gs = Hamiltonian::<f64>::new(9, 0.6, 0.8)
            .unwrap()
            .ground_state()
            .unwrap();
        assert!((parity_expectation(&gs.state).abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_lengths() {
        assert_eq!(
            Hamiltonian::new(10, 1.0, 1.0).unwrap_err(),
            EdError::Length(10)
        );
        assert_eq!(
            Hamiltonian::new(3, 1.0, 1.0).unwrap_err(),
            EdError::Length(3)
        );
    }
}
