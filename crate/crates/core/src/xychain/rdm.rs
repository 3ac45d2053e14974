use super::wick::{pauli_expectation, Pauli};
use super::{CorrelationTable, Geometry, Params, XyResult};
use crate::linalg::{partial_trace, CMatrix, Density};
use crate::scalar::{creal, Real};

/// Index of the site pair (j, l) among (0,1), (0,2), (1,2).
fn pair_index(j: usize, l: usize) -> usize {
    j + l - 1
}

/// Every nonvanishing correlator entering a three-spin reduced state.
///
/// Pair arrays are indexed (0,1), (0,2), (1,2); the mixed triples `zxx` and
/// `zyy` are indexed by the site carrying σᶻ.
#[derive(Clone, Debug, PartialEq)]
pub struct TripleCorrelators<T> {
    pub z: T,
    pub zz: [T; 3],
    pub zzz: T,
    pub xx: [T; 3],
    pub yy: [T; 3],
    pub zxx: [T; 3],
    pub zyy: [T; 3],
}

impl<T: Real> TripleCorrelators<T> {
    pub fn from_table(geom: Geometry, table: &CorrelationTable<T>) -> Self {
        let s = geom.offsets();
        let e = |ops: &[(usize, Pauli)]| pauli_expectation(ops, table).re;
        let pairs = [(0, 1), (0, 2), (1, 2)];
        let zz = pairs.map(|(j, l)| e(&[(s[j], Pauli::Z), (s[l], Pauli::Z)]));
        let xx = pairs.map(|(j, l)| e(&[(s[j], Pauli::X), (s[l], Pauli::X)]));
        let yy = pairs.map(|(j, l)| e(&[(s[j], Pauli::Y), (s[l], Pauli::Y)]));
        let mixed = |p: Pauli| {
            [0usize, 1, 2].map(|m| {
                let ops: Vec<(usize, Pauli)> = (0..3)
                    .map(|k| (s[k], if k == m { Pauli::Z } else { p }))
                    .collect();
                e(&ops)
            })
        };
        Self {
            z: e(&[(s[0], Pauli::Z)]),
            zz,
            zzz: e(&[(s[0], Pauli::Z), (s[1], Pauli::Z), (s[2], Pauli::Z)]),
            xx,
            yy,
            zxx: mixed(Pauli::X),
            zyy: mixed(Pauli::Y),
        }
    }

    /// The 8×8 matrix (1/8)[a_pq].
    ///
    /// Diagonal: a = 1 + Σ e_j Z + Σ e_j e_l Z_jZ_l + e_0e_1e_2 ZZZ with
    /// e = ±1 the σᶻ eigenvalues. Two-spin flips on (j, l) with spectator m:
    /// a = XX + e_m·ZXX ∓ (YY + e_m·ZYY), minus when both flipped spins agree.
    pub fn assemble(&self) -> CMatrix<T> {
        let eighth = T::lit(0.125);
        let bit = |k: usize, j: usize| (k >> (2 - j)) & 1;
        let sign = |b: usize| if b == 0 { T::one() } else { -T::one() };
        let mut m = CMatrix::zeros(8, 8);
        for k in 0..8 {
            let e: [T; 3] = [0, 1, 2].map(|j| sign(bit(k, j)));
            let diag = T::one()
                + self.z * (e[0] + e[1] + e[2])
                + self.zz[0] * e[0] * e[1]
                + self.zz[1] * e[0] * e[2]
                + self.zz[2] * e[1] * e[2]
                + self.zzz * e[0] * e[1] * e[2];
            m[(k, k)] = creal(diag * eighth);
            for kp in k + 1..8 {
                let diff = k ^ kp;
                if diff.count_ones() != 2 {
                    continue;
                }
                let flipped: Vec<usize> = (0..3).filter(|&j| (diff >> (2 - j)) & 1 == 1).collect();
                let (j, l) = (flipped[0], flipped[1]);
                let spectator = 3 - j - l;
                let p = pair_index(j, l);
                let em = e[spectator];
                let y = if bit(k, j) == bit(k, l) {
                    -T::one()
                } else {
                    T::one()
                };
                let v = (self.xx[p]
                    + em * self.zxx[spectator]
                    + y * (self.yy[p] + em * self.zyy[spectator]))
                    * eighth;
                m[(k, kp)] = creal(v);
                m[(kp, k)] = creal(v);
            }
        }
        m
    }
}

/// Three-spin reduced state from a precomputed correlation table covering
/// offsets up to α + β + 1.
pub fn rdm3_from_table<T: Real>(
    geom: Geometry,
    table: &CorrelationTable<T>,
) -> XyResult<Density<T>> {
    geom.check(table.params().chain)?;
    let m = TripleCorrelators::from_table(geom, table)
        .assemble()
        .hermitize();
    Ok(Density::from_parts(m, vec![2, 2, 2]).expect("8x8 three-qubit shape"))
}

/// Reduced state of spins (i − α, i, i + β) in the ground state.
pub fn rdm3<T: Real>(geom: Geometry, params: &Params<T>) -> XyResult<Density<T>> {
    params.validate()?;
    geom.check(params.chain)?;
    let table = CorrelationTable::compute(params, geom.span() + 1);
    rdm3_from_table(geom, &table)
}

/// Two-spin reduced state at the given separation.
pub fn rdm2<T: Real>(distance: usize, params: &Params<T>) -> XyResult<Density<T>> {
    let rho = rdm3(Geometry::new(distance, 1)?, params)?;
    Ok(partial_trace(&rho, &[0, 1]).expect("valid keep set"))
}
