use super::{SdpOptions, SdpProblem, SdpSolution, SdpStatus};
use crate::linalg::{
    cholesky, eigvalsh, hermitian_eig, hpd_inverse, lower_inverse, partial_transpose_raw,
    trace_norm, CMatrix, Density, LinalgResult,
};
use crate::scalar::{cplx, creal, Real, C};

type Entries<T> = Vec<(usize, usize, C<T>)>;

/// Orthonormal basis of n×n Hermitian matrices under Re Tr(A B), stored as
/// sparse entry lists together with their partial transposes.
struct HermitianBasis<T> {
    n: usize,
    plain: Vec<Entries<T>>,
    transposed: Vec<Entries<T>>,
}

impl<T: Real> HermitianBasis<T> {
    fn new(n: usize, pt_index: impl Fn(usize, usize) -> (usize, usize)) -> Self {
        let h = T::FRAC_1_SQRT_2();
        let mut plain = Vec::with_capacity(n * n);
        for k in 0..n {
            plain.push(vec![(k, k, creal(T::one()))]);
        }
        for j in 0..n {
            for k in j + 1..n {
                plain.push(vec![(j, k, creal(h)), (k, j, creal(h))]);
                plain.push(vec![
                    (j, k, cplx(T::zero(), h)),
                    (k, j, cplx(T::zero(), -h)),
                ]);
            }
        }
        let transposed = plain
            .iter()
            .map(|e| {
                e.iter()
                    .map(|&(a, b, v)| {
                        let (a2, b2) = pt_index(a, b);
                        (a2, b2, v)
                    })
                    .collect()
            })
            .collect();
        Self {
            n,
            plain,
            transposed,
        }
    }

    fn len(&self) -> usize {
        self.plain.len()
    }

    fn coords(&self, m: &CMatrix<T>) -> Vec<T> {
        let s2 = T::SQRT_2();
        let mut out = Vec::with_capacity(self.len());
        for k in 0..self.n {
            out.push(m[(k, k)].re);
        }
        for j in 0..self.n {
            for k in j + 1..self.n {
                let v = (m[(j, k)] + m[(k, j)].conj()) * T::lit(0.5);
                out.push(s2 * v.re);
                out.push(s2 * v.im);
            }
        }
        out
    }

    fn matrix(&self, c: &[T]) -> CMatrix<T> {
        let mut m = CMatrix::zeros(self.n, self.n);
        for (entries, &w) in self.plain.iter().zip(c) {
            for &(a, b, v) in entries {
                m[(a, b)] += v * w;
            }
        }
        m
    }
}

/// In-place Cholesky of a dense symmetric positive definite matrix stored
/// row-major; returns false if a pivot is not positive.
fn real_cholesky<T: Real>(m: &mut [T], n: usize) -> bool {
    for j in 0..n {
        let mut d = m[j * n + j];
        for k in 0..j {
            d -= m[j * n + k] * m[j * n + k];
        }
        if !(d > T::zero()) {
            return false;
        }
        let d = d.sqrt();
        m[j * n + j] = d;
        for i in j + 1..n {
            let mut s = m[i * n + j];
            for k in 0..j {
                s -= m[i * n + k] * m[j * n + k];
            }
            m[i * n + j] = s / d;
        }
    }
    true
}

fn real_cholesky_solve<T: Real>(l: &[T], n: usize, b: &[T]) -> Vec<T> {
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k * n + i] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    y
}

fn inner<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    a.trace_of_product(b).re
}

/// Largest α with m + α·dm ⪰ 0, given the Cholesky factor of m.
fn max_step<T: Real>(chol: &CMatrix<T>, dm: &CMatrix<T>) -> LinalgResult<T> {
    let linv = lower_inverse(chol);
    let q = (&(&linv * dm) * &linv.adjoint()).hermitize();
    let min = eigvalsh(&q)?.last().copied().unwrap_or_else(T::zero);
    Ok(if min < T::zero() {
        -T::one() / min
    } else {
        T::infinity()
    })
}

struct Solver<'a, T> {
    problem: &'a SdpProblem<T>,
    basis: HermitianBasis<T>,
    r: CMatrix<T>,
    n: usize,
}

impl<'a, T: Real> Solver<'a, T> {
    fn slacks(&self, s: &CMatrix<T>) -> [CMatrix<T>; 3] {
        let s_pt = self.problem.pt(s);
        [s.clone(), &s_pt - &self.r, &s_pt + &self.r]
    }

    fn lift(&self, ds: &CMatrix<T>) -> [CMatrix<T>; 3] {
        let d_pt = self.problem.pt(ds);
        [ds.clone(), d_pt.clone(), d_pt]
    }

    /// Z₀ + Z₁^Γ + Z₂^Γ.
    fn adjoint(&self, z: &[CMatrix<T>; 3]) -> CMatrix<T> {
        &(&z[0] + &self.problem.pt(&z[1])) + &self.problem.pt(&z[2])
    }

    /// Schur complement of the HKM system in the Hermitian basis.
    fn schur(&self, xinv: &[CMatrix<T>; 3], z: &[CMatrix<T>; 3]) -> Vec<T> {
        let m = self.basis.len();
        let mut out = vec![T::zero(); m * m];
        for p in 0..m {
            for q in p..m {
                let mut acc = T::zero();
                for blk in 0..3 {
                    let (ep, eq) = if blk == 0 {
                        (&self.basis.plain[p], &self.basis.plain[q])
                    } else {
                        (&self.basis.transposed[p], &self.basis.transposed[q])
                    };
                    for &(a, b, v) in ep {
                        for &(c, d, u) in eq {
                            acc += (v.conj() * u * xinv[blk][(a, c)] * z[blk][(d, b)]).re;
                        }
                    }
                }
                out[p * m + q] = acc;
                out[q * m + p] = acc;
            }
        }
        out
    }

    fn direction(
        &self,
        chol_m: &[T],
        target: &[CMatrix<T>; 3],
        rd: &CMatrix<T>,
        xinv: &[CMatrix<T>; 3],
        z: &[CMatrix<T>; 3],
    ) -> (CMatrix<T>, [CMatrix<T>; 3], [CMatrix<T>; 3]) {
        let rhs_m = &self.adjoint(target) - rd;
        let ds_c = real_cholesky_solve(chol_m, self.basis.len(), &self.basis.coords(&rhs_m));
        let ds = self.basis.matrix(&ds_c);
        let dx = self.lift(&ds);
        let dz = [0, 1, 2].map(|i| (&target[i] - &(&(&xinv[i] * &dx[i]) * &z[i])).hermitize());
        (ds, dx, dz)
    }

    fn step(&self, chols: &[CMatrix<T>; 3], d: &[CMatrix<T>; 3]) -> LinalgResult<T> {
        let mut alpha = T::infinity();
        for i in 0..3 {
            alpha = alpha.min(max_step(&chols[i], &d[i])?);
        }
        Ok(alpha)
    }
}

pub(super) fn solve<T: Real>(problem: &SdpProblem<T>, opts: &SdpOptions) -> SdpSolution<T> {
    let dims = problem.rho().dims().to_vec();
    let n = problem.rho().dim();
    let center = problem.center();
    let probe = |a: usize, b: usize| -> (usize, usize) {
        let mut m = CMatrix::<T>::zeros(n, n);
        m[(a, b)] = creal(T::one());
        let t = partial_transpose_raw(&m, &dims, center);
        for i in 0..n {
            for j in 0..n {
                if t[(i, j)].re != T::zero() {
                    return (i, j);
                }
            }
        }
        unreachable!("partial transpose permutes entries")
    };
    let solver = Solver {
        problem,
        basis: HermitianBasis::new(n, probe),
        r: problem.transposed(),
        n,
    };

    let start = trace_norm(&solver.r) + T::one();
    let mut s = CMatrix::identity(n).scale(start);
    let third = T::one() / T::lit(3.0);
    let mut z = [0, 1, 2].map(|_| CMatrix::identity(n).scale(third));
    let ident = CMatrix::identity(n);
    let total_dim = T::lit(3.0 * solver.n as f64);
    let tau = T::lit(opts.step_fraction);
    let gap_tol = T::lit(opts.gap_tol);
    let feas_tol = T::lit(opts.feas_tol);

    let mut status = SdpStatus::MaxIterations;
    let mut iterations = 0;
    for iter in 0..=opts.max_iter {
        iterations = iter;
        let x = solver.slacks(&s);
        let rd = &ident - &solver.adjoint(&z);
        let complementarity: T = (0..3).map(|i| inner(&x[i], &z[i])).sum();
        let dual_obj = inner(&solver.r, &z[1]) - inner(&solver.r, &z[2]);
        let gap = s.trace().re - dual_obj;
        if complementarity.max(gap.abs()) < gap_tol && rd.max_abs() < feas_tol {
            status = SdpStatus::Converged;
            break;
        }
        if iter == opts.max_iter {
            break;
        }
        let mu = complementarity / total_dim;
        let factors = || -> LinalgResult<_> {
            let cx = [cholesky(&x[0])?, cholesky(&x[1])?, cholesky(&x[2])?];
            let cz = [cholesky(&z[0])?, cholesky(&z[1])?, cholesky(&z[2])?];
            let xinv = [
                hpd_inverse(&x[0])?,
                hpd_inverse(&x[1])?,
                hpd_inverse(&x[2])?,
            ];
            Ok((cx, cz, xinv))
        };
        let Ok((cx, cz, xinv)) = factors() else {
            status = SdpStatus::InfeasibleNumerics;
            break;
        };
        let mut chol_m = solver.schur(&xinv, &z);
        if !real_cholesky(&mut chol_m, solver.basis.len()) {
            status = SdpStatus::InfeasibleNumerics;
            break;
        }

        let affine_target = [0, 1, 2].map(|i| z[i].scale(-T::one()));
        let (_, dx_a, dz_a) = solver.direction(&chol_m, &affine_target, &rd, &xinv, &z);
        let (Ok(ap), Ok(ad)) = (solver.step(&cx, &dx_a), solver.step(&cz, &dz_a)) else {
            status = SdpStatus::InfeasibleNumerics;
            break;
        };
        let (ap, ad) = (ap.min(T::one()), ad.min(T::one()));
        let mu_aff: T = (0..3)
            .map(|i| inner(&(&x[i] + &dx_a[i].scale(ap)), &(&z[i] + &dz_a[i].scale(ad))))
            .sum::<T>()
            / total_dim;
        let sigma = (mu_aff / mu).max(T::zero()).min(T::one()).powi(3);

        let target = [0, 1, 2].map(|i| {
            let centering = xinv[i].scale(sigma * mu);
            let second_order = (&(&xinv[i] * &dx_a[i]) * &dz_a[i]).hermitize();
            &(&centering - &z[i]) - &second_order
        });
        let (ds, dx, dz) = solver.direction(&chol_m, &target, &rd, &xinv, &z);
        let (Ok(ap), Ok(ad)) = (solver.step(&cx, &dx), solver.step(&cz, &dz)) else {
            status = SdpStatus::InfeasibleNumerics;
            break;
        };
        let ap = (tau * ap).min(T::one());
        let ad = (tau * ad).min(T::one());
        s = (&s + &ds.scale(ap)).hermitize();
        for i in 0..3 {
            z[i] = (&z[i] + &dz[i].scale(ad)).hermitize();
        }
    }

    let optimum = s.trace().re;
    let dual_obj = inner(&solver.r, &z[1]) - inner(&solver.r, &z[2]);
    SdpSolution {
        optimum,
        e_kappa: optimum.log2(),
        s_matrix: s,
        dual: z,
        duality_gap: optimum - dual_obj,
        iterations,
        status,
    }
}

/// |ρ^Γ|^Γ.
pub fn binegativity<T: Real>(rho: &Density<T>, center: usize) -> LinalgResult<CMatrix<T>> {
    let r = partial_transpose_raw(rho.matrix(), rho.dims(), center);
    let (vals, vecs) = hermitian_eig(&r.hermitize())?;
    let n = vals.len();
    let abs = CMatrix::from_fn(n, n, |i, j| {
        (0..n).fold(creal(T::zero()), |acc, k| {
            acc + vecs[(i, k)] * vecs[(j, k)].conj() * vals[k].abs()
        })
    });
    Ok(partial_transpose_raw(&abs, rho.dims(), center).hermitize())
}

pub fn binegativity_min_eigenvalue<T: Real>(rho: &Density<T>, center: usize) -> LinalgResult<T> {
    Ok(eigvalsh(&binegativity(rho, center)?)?
        .last()
        .copied()
        .unwrap_or_else(T::zero))
}
