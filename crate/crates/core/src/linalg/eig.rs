use super::{CMatrix, LinalgError, LinalgResult};
use crate::scalar::{creal, Real, C};

const MAX_SWEEPS: usize = 80;

fn check_hermitian<T: Real>(m: &CMatrix<T>) -> LinalgResult<()> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let err = m.hermiticity_error();
    let scale = m.max_abs().max(T::one());
    if err > T::tol(1e-10) * scale {
        return Err(LinalgError::NotHermitian(err.as_f64()));
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// Returns eigenvalues in descending order and the matching orthonormal
/// eigenvectors as columns.
pub fn hermitian_eig<T: Real>(m: &CMatrix<T>) -> LinalgResult<(Vec<T>, CMatrix<T>)> {
    check_hermitian(m)?;
    let (vals, vecs) = jacobi(m.hermitize(), true);
    let vecs = vecs.expect("vectors requested");
    let n = vals.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        vals[b]
            .partial_cmp(&vals[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let sorted: Vec<T> = order.iter().map(|&i| vals[i]).collect();
    let v = CMatrix::from_fn(n, n, |i, j| vecs[(i, order[j])]);
    Ok((sorted, v))
}

/// Eigenvalues only, descending.
pub fn eigvalsh<T: Real>(m: &CMatrix<T>) -> LinalgResult<Vec<T>> {
    check_hermitian(m)?;
    let (mut vals, _) = jacobi(m.hermitize(), false);
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(vals)
}

fn jacobi<T: Real>(mut a: CMatrix<T>, want_vectors: bool) -> (Vec<T>, Option<CMatrix<T>>) {
    let n = a.rows();
    let mut v = want_vectors.then(|| CMatrix::identity(n));
    let total = a.frobenius_norm();
    let zero = T::zero();
    if total == zero {
        return ((0..n).map(|_| zero).collect(), v);
    }
    let target = T::epsilon() * total * T::lit(0.5);
    for _ in 0..MAX_SWEEPS {
        let mut off = zero;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= T::min_positive_value() {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (mag + mag);
                let t = if tau >= zero {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                // J = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] acting on columns p, q.
                let ph = phase.conj();
                let jpp = creal(c);
                let jpq = creal(s);
                let jqp = ph * (-s);
                let jqq = ph * c;
                rotate(&mut a, p, q, jpp, jpq, jqp, jqq);
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * jpp + vkq * jqp;
                        v[(k, q)] = vkp * jpq + vkq * jqq;
                    }
                }
            }
        }
    }
    let vals = (0..n).map(|i| a[(i, i)].re).collect();
    (vals, v)
}

#[allow(clippy::too_many_arguments)]
fn rotate<T: Real>(
    a: &mut CMatrix<T>,
    p: usize,
    q: usize,
    jpp: C<T>,
    jpq: C<T>,
    jqp: C<T>,
    jqq: C<T>,
) {
    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = creal(T::zero());
    a[(q, p)] = creal(T::zero());
    a[(p, p)] = creal(a[(p, p)].re);
    a[(q, q)] = creal(a[(q, q)].re);
}
