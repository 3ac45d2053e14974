use super::CorrelationTable;
use crate::linalg::{determinant, CMatrix};
use crate::scalar::{cplx, creal, Real, C};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Kind {
    A,
    B,
}

type Majorana = (usize, Kind);

/// Rewrites a product of Pauli operators on distinct sites as a coefficient
/// times an ordered product of distinct Majorana operators
/// A = c + c†, B = c† − c.
///
/// σᶻ_l = −A_l B_l, σˣ_l = A_l Π_{i<l}(−A_i B_i), σʸ_l = −i B_l Π_{i<l}(−A_i B_i),
/// with the string starting at the leftmost site of the product.
fn to_majoranas<T: Real>(ops: &[(usize, Pauli)]) -> (C<T>, Vec<Majorana>) {
    let mut ops = ops.to_vec();
    ops.sort_by_key(|&(s, _)| s);
    let origin = ops.first().map(|&(s, _)| s).unwrap_or(0);
    let mut coef = creal(T::one());
    let mut seq = Vec::new();
    for &(site, p) in &ops {
        match p {
            Pauli::Z => {
                coef = -coef;
                seq.push((site, Kind::A));
                seq.push((site, Kind::B));
            }
            Pauli::X | Pauli::Y => {
                if p == Pauli::X {
                    seq.push((site, Kind::A));
                } else {
                    coef *= cplx(T::zero(), -T::one());
                    seq.push((site, Kind::B));
                }
                for i in origin..site {
                    coef = -coef;
                    seq.push((i, Kind::A));
                    seq.push((i, Kind::B));
                }
            }
        }
    }
    reduce(coef, seq)
}

/// Sorts by (site, A before B) using anticommutation and cancels squares
/// (A² = 1, B² = −1).
fn reduce<T: Real>(mut coef: C<T>, seq: Vec<Majorana>) -> (C<T>, Vec<Majorana>) {
    let mut out: Vec<Majorana> = Vec::with_capacity(seq.len());
    for m in seq {
        out.push(m);
        let mut j = out.len() - 1;
        while j > 0 && out[j - 1] > out[j] {
            out.swap(j - 1, j);
            coef = -coef;
            j -= 1;
        }
        if j > 0 && out[j - 1] == out[j] {
            if out[j].1 == Kind::B {
                coef = -coef;
            }
            out.drain(j - 1..=j);
        }
    }
    (coef, out)
}

/// Ground-state expectation of a Pauli string on distinct sites, by Wick
/// contraction into a determinant of the G_r table.
pub fn pauli_expectation<T: Real>(ops: &[(usize, Pauli)], table: &CorrelationTable<T>) -> C<T> {
    let (coef, seq) = to_majoranas::<T>(ops);
    if seq.is_empty() {
        return coef;
    }
    let a_sites: Vec<usize> = seq.iter().filter(|m| m.1 == Kind::A).map(|m| m.0).collect();
    let b_sites: Vec<usize> = seq.iter().filter(|m| m.1 == Kind::B).map(|m| m.0).collect();
    let n = a_sites.len();
    if n != b_sites.len() {
        return creal(T::zero());
    }
    // parity of moving every A ahead of every B
    let mut swaps = 0usize;
    let mut bs_seen = 0usize;
    for m in &seq {
        match m.1 {
            Kind::B => bs_seen += 1,
            Kind::A => swaps += bs_seen,
        }
    }
    // Pf [[0, M], [−Mᵀ, 0]] = (−1)^{n(n−1)/2} det M
    swaps += n * (n - 1) / 2;
    let m = CMatrix::from_fn(n, n, |i, j| {
        creal(table.get(b_sites[j] as i64 - a_sites[i] as i64))
    });
    let det = determinant(&m);
    let sign = if swaps.is_multiple_of(2) {
        T::one()
    } else {
        -T::one()
    };
    coef * det * sign
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squares_cancel() {
        let (c, s) = reduce::<f64>(creal(1.0), vec![(0, Kind::B), (0, Kind::B)]);
        assert!(s.is_empty());
        assert_eq!(c, creal(-1.0));
        let (c, s) = reduce::<f64>(creal(1.0), vec![(1, Kind::B), (0, Kind::A), (1, Kind::A)]);
        // B1 A0 A1 = −A0 B1 A1 = A0 A1 B1
        assert_eq!(s, vec![(0, Kind::A), (1, Kind::A), (1, Kind::B)]);
        assert_eq!(c, creal(1.0));
    }

    #[test]
    fn string_of_neighbours() {
        // σˣ_0 σˣ_1 = A0 A1 (−A0 B0) = A1 B0 = −B0 A1
        let (c, s) = to_majoranas::<f64>(&[(0, Pauli::X), (1, Pauli::X)]);
        assert_eq!(s, vec![(0, Kind::B), (1, Kind::A)]);
        assert_eq!(c, creal(-1.0));
    }
}
