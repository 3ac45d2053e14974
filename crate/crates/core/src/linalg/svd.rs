use super::CMatrix;
use crate::scalar::{creal, Real, C};

const MAX_SWEEPS: usize = 80;

/// Singular values of an arbitrary complex matrix, descending.
///
/// One-sided Jacobi (Hestenes) orthogonalization of the columns of the
/// taller orientation.
pub fn singular_values<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    let work = if m.rows() >= m.cols() {
        m.clone()
    } else {
        m.adjoint()
    };
    let (rows, cols) = (work.rows(), work.cols());
    let mut colv: Vec<Vec<C<T>>> = (0..cols).map(|j| work.column(j)).collect();
    let eps = T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let (alpha, beta, gamma) = {
                    let (ci, cj) = (&colv[i], &colv[j]);
                    let mut a = T::zero();
                    let mut b = T::zero();
                    let mut g = creal(T::zero());
                    for k in 0..rows {
                        a += ci[k].norm_sqr();
                        b += cj[k].norm_sqr();
                        g += ci[k].conj() * cj[k];
                    }
                    (a, b, g)
                };
                let gmag = gamma.norm();
                if gmag <= eps * (alpha * beta).sqrt() || gmag <= T::min_positive_value() {
                    continue;
                }
                rotated = true;
                let ph = (gamma / gmag).conj();
                let zeta = (beta - alpha) / (gmag + gmag);
                let t = if zeta >= T::zero() {
                    T::one() / (zeta + (T::one() + zeta * zeta).sqrt())
                } else {
                    -T::one() / (-zeta + (T::one() + zeta * zeta).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                for k in 0..rows {
                    let ui = colv[i][k];
                    let uj = colv[j][k] * ph;
                    colv[i][k] = ui * c - uj * s;
                    colv[j][k] = ui * s + uj * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = colv
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}
