use super::{CMatrix, LinalgError, LinalgResult};
use crate::scalar::{creal, Real};

/// Lower-triangular L with LL† = m for Hermitian positive definite `m`.
pub fn cholesky<T: Real>(m: &CMatrix<T>) -> LinalgResult<CMatrix<T>> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > T::zero()) {
            return Err(LinalgError::NotPsd(d.as_f64()));
        }
        let djj = d.sqrt();
        l[(j, j)] = creal(djj);
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Inverse of a lower-triangular matrix.
pub fn lower_inverse<T: Real>(l: &CMatrix<T>) -> CMatrix<T> {
    let n = l.rows();
    let mut inv = CMatrix::zeros(n, n);
    for j in 0..n {
        inv[(j, j)] = creal(T::one()) / l[(j, j)];
        for i in j + 1..n {
            let mut s = creal(T::zero());
            for k in j..i {
                s -= l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = s / l[(i, i)];
        }
    }
    inv
}

/// Inverse of a Hermitian positive definite matrix.
pub fn hpd_inverse<T: Real>(m: &CMatrix<T>) -> LinalgResult<CMatrix<T>> {
    let linv = lower_inverse(&cholesky(m)?);
    Ok((&linv.adjoint() * &linv).hermitize())
}
