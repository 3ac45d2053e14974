use super::{eig, svd, CMatrix, Density, LinalgError, LinalgResult};
use crate::scalar::{creal, Real, C};

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Partial transpose of a matrix with the given tensor structure.
pub fn partial_transpose_raw<T: Real>(m: &CMatrix<T>, dims: &[usize], sub: usize) -> CMatrix<T> {
    let stride = strides(dims)[sub];
    let d = dims[sub];
    let n = m.rows();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        let di = (i / stride) % d;
        let base_i = i - di * stride;
        for j in 0..n {
            let dj = (j / stride) % d;
            let base_j = j - dj * stride;
            out[(base_i + dj * stride, base_j + di * stride)] = m[(i, j)];
        }
    }
    out
}

/// Transposes the indices of one subsystem.
pub fn partial_transpose<T: Real>(rho: &Density<T>, subsystem: usize) -> LinalgResult<CMatrix<T>> {
    let count = rho.dims().len();
    if subsystem >= count {
        return Err(LinalgError::SubsystemOutOfRange {
            index: subsystem,
            count,
        });
    }
    Ok(partial_transpose_raw(rho.matrix(), rho.dims(), subsystem))
}

/// Traces out every subsystem not listed in `keep`; kept subsystems stay in
/// ascending order.
pub fn partial_trace_raw<T: Real>(m: &CMatrix<T>, dims: &[usize], keep: &[usize]) -> CMatrix<T> {
    let st = strides(dims);
    let n = m.rows();
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let kept_st = strides(&kept_dims);
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let traced_st = strides(&traced_dims);
    let mut out_idx = vec![0usize; n];
    let mut tr_idx = vec![0usize; n];
    for i in 0..n {
        let digit = |k: usize| (i / st[k]) % dims[k];
        out_idx[i] = keep.iter().zip(&kept_st).map(|(&k, &s)| digit(k) * s).sum();
        tr_idx[i] = traced
            .iter()
            .zip(&traced_st)
            .map(|(&k, &s)| digit(k) * s)
            .sum();
    }
    let dout: usize = kept_dims.iter().product();
    let mut out = CMatrix::zeros(dout, dout);
    for i in 0..n {
        for j in 0..n {
            if tr_idx[i] == tr_idx[j] {
                out[(out_idx[i], out_idx[j])] += m[(i, j)];
            }
        }
    }
    out
}

pub fn partial_trace<T: Real>(rho: &Density<T>, keep: &[usize]) -> LinalgResult<Density<T>> {
    if keep.is_empty() {
        return Err(LinalgError::EmptyKeep);
    }
    let count = rho.dims().len();
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(LinalgError::DuplicateSubsystem(w[0]));
        }
    }
    if let Some(&bad) = sorted.iter().find(|&&k| k >= count) {
        return Err(LinalgError::SubsystemOutOfRange { index: bad, count });
    }
    let m = partial_trace_raw(rho.matrix(), rho.dims(), &sorted);
    let dims = sorted.iter().map(|&k| rho.dims()[k]).collect();
    Density::from_parts(m, dims)
}

/// Reorders subsystems so that new subsystem `k` is old subsystem `order[k]`.
pub fn permute_subsystems<T: Real>(rho: &Density<T>, order: &[usize]) -> LinalgResult<Density<T>> {
    let dims = rho.dims();
    let count = dims.len();
    if order.len() != count {
        return Err(LinalgError::DimsMismatch {
            dims: order.to_vec(),
            dim: count,
        });
    }
    let mut seen = vec![false; count];
    for &k in order {
        if k >= count {
            return Err(LinalgError::SubsystemOutOfRange { index: k, count });
        }
        if seen[k] {
            return Err(LinalgError::DuplicateSubsystem(k));
        }
        seen[k] = true;
    }
    let old_st = strides(dims);
    let new_dims: Vec<usize> = order.iter().map(|&k| dims[k]).collect();
    let new_st = strides(&new_dims);
    let n = rho.dim();
    let map: Vec<usize> = (0..n)
        .map(|i| {
            order
                .iter()
                .enumerate()
                .map(|(pos, &k)| ((i / old_st[k]) % dims[k]) * new_st[pos])
                .sum()
        })
        .collect();
    let m = rho.matrix();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(map[i], map[j])] = m[(i, j)];
        }
    }
    Density::from_parts(out, new_dims)
}

/// Realigned matrix R with R[(i,i'), (j,j')] = ρ[(i,j), (i',j')].
pub fn realignment<T: Real>(rho: &Density<T>) -> LinalgResult<CMatrix<T>> {
    let dims = rho.dims();
    if dims.len() != 2 {
        return Err(LinalgError::NotBipartite(dims.len()));
    }
    let (da, db) = (dims[0], dims[1]);
    let m = rho.matrix();
    Ok(CMatrix::from_fn(da * da, db * db, |r, c| {
        let (i, ip) = (r / da, r % da);
        let (j, jp) = (c / db, c % db);
        m[(i * db + j, ip * db + jp)]
    }))
}

/// Sum of singular values.
pub fn trace_norm<T: Real>(m: &CMatrix<T>) -> T {
    if m.is_square() && m.hermiticity_error() <= T::tol(1e-12) * m.max_abs().max(T::one()) {
        if let Ok(vals) = eig::eigvalsh(m) {
            return vals.iter().map(|v| v.abs()).sum();
        }
    }
    svd::singular_values(m).into_iter().sum()
}

/// Principal square root of a PSD matrix; eigenvalues in [-1e-9, 0) are
/// clamped to zero.
pub fn matrix_sqrt_psd<T: Real>(m: &CMatrix<T>) -> LinalgResult<CMatrix<T>> {
    let (vals, vecs) = eig::hermitian_eig(m)?;
    let floor = -T::tol(1e-9);
    if let Some(&min) = vals.last() {
        if min < floor {
            return Err(LinalgError::NotPsd(min.as_f64()));
        }
    }
    let n = vals.len();
    let roots: Vec<T> = vals.iter().map(|&v| v.max(T::zero()).sqrt()).collect();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = creal(T::zero());
            for k in 0..n {
                if roots[k] != T::zero() {
                    acc += vecs[(i, k)] * vecs[(j, k)].conj() * roots[k];
                }
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out.hermitize())
}

/// Determinant by LU factorization with partial pivoting.
pub fn determinant<T: Real>(m: &CMatrix<T>) -> C<T> {
    assert!(m.is_square(), "determinant needs a square matrix");
    let n = m.rows();
    let mut a = m.clone();
    let mut det = creal(T::one());
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| {
                a[(x, col)]
                    .norm()
                    .partial_cmp(&a[(y, col)].norm())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        let p = a[(pivot, col)];
        if p.norm() == T::zero() {
            return creal(T::zero());
        }
        if pivot != col {
            a.swap_rows(pivot, col);
            det = -det;
        }
        det *= p;
        for r in col + 1..n {
            let f = a[(r, col)] / p;
            if f.norm() == T::zero() {
                continue;
            }
            for c in col..n {
                let v = a[(col, c)];
                a[(r, c)] -= f * v;
            }
        }
    }
    det
}
