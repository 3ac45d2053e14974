//! Bipartite entanglement measures and the four tripartite correlation
//! measures N₃, T₃, τ_UB and τ_LB of a three-qubit state.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    hermitian_eig, partial_trace, partial_transpose, permute_subsystems, realignment,
    singular_values, trace_norm, CMatrix, Density, LinalgError,
};
use crate::scalar::{creal, Real, C};

/// Negativities below this value count as exactly zero in N₃.
pub const ZERO_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("expected a two-qubit state, got subsystem dims {0:?}")]
    NotTwoQubit(Vec<usize>),
    #[error("expected a three-qubit state, got subsystem dims {0:?}")]
    NotThreeQubit(Vec<usize>),
    #[error("expected a 2 x n bipartition, got subsystem dims {0:?}")]
    NotQubitCut(Vec<usize>),
    #[error("lower-bound parameter Lambda = {0} lies outside [1, 2]")]
    LambdaOutOfRange(f64),
}

pub type MeasureResult<T> = Result<T, MeasureError>;

/// ‖ρ^{T_part}‖₁ − 1.
pub fn negativity<T: Real>(rho: &Density<T>, part: usize) -> MeasureResult<T> {
    let pt = partial_transpose(rho, part)?;
    let n = trace_norm(&pt) - T::one();
    Ok(if n < T::zero() && n > -T::tol(1e-12) {
        T::zero()
    } else {
        n.max(T::zero())
    })
}

/// log₂ ‖ρ^{T_part}‖₁.
pub fn log_negativity<T: Real>(rho: &Density<T>, part: usize) -> MeasureResult<T> {
    Ok((negativity(rho, part)? + T::one()).log2())
}

fn require_two_qubit<T: Real>(rho: &Density<T>) -> MeasureResult<()> {
    if rho.dims() != [2, 2] && rho.dims() != [4] {
        return Err(MeasureError::NotTwoQubit(rho.dims().to_vec()));
    }
    Ok(())
}

fn require_three_qubit<T: Real>(rho: &Density<T>) -> MeasureResult<()> {
    if rho.dims() != [2, 2, 2] {
        return Err(MeasureError::NotThreeQubit(rho.dims().to_vec()));
    }
    Ok(())
}

/// Wootters concurrence max(0, √λ₁ − √λ₂ − √λ₃ − √λ₄) with λᵢ the eigenvalues
/// of ρ ρ̃.
///
/// The √λᵢ are the singular values of Tᵢⱼ = √(pᵢpⱼ) ⟨eᵢ|σʸ⊗σʸ|eⱼ*⟩ built from
/// the eigenpairs (pᵢ, eᵢ) of ρ, which is the same spectrum as √ρ ρ̃ √ρ but
/// does not amplify round-off in the null space of rank-deficient states.
pub fn concurrence<T: Real>(rho: &Density<T>) -> MeasureResult<T> {
    require_two_qubit(rho)?;
    let (vals, vecs) = hermitian_eig(&rho.matrix().hermitize())?;
    let floor = T::epsilon() * T::lit(16.0);
    let weights: Vec<T> = vals
        .iter()
        .map(|&p| if p > floor { p.sqrt() } else { T::zero() })
        .collect();
    // σʸ⊗σʸ maps |ab⟩ to ±|āb̄⟩: index k goes to 3 − k with sign −1 for 00 and 11.
    let flip = |v: &[C<T>]| -> Vec<C<T>> {
        (0..4)
            .map(|k| {
                let x = v[3 - k].conj();
                if k == 0 || k == 3 {
                    -x
                } else {
                    x
                }
            })
            .collect()
    };
    let cols: Vec<Vec<C<T>>> = (0..4).map(|k| vecs.column(k)).collect();
    let flipped: Vec<Vec<C<T>>> = cols.iter().map(|c| flip(c)).collect();
    let t = CMatrix::from_fn(4, 4, |i, j| {
        if weights[i] == T::zero() || weights[j] == T::zero() {
            return creal(T::zero());
        }
        let dot: C<T> = cols[i]
            .iter()
            .zip(&flipped[j])
            .map(|(a, b)| a.conj() * b)
            .sum();
        dot * (weights[i] * weights[j])
    });
    let mut s = singular_values(&t);
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok((s[0] - s[1] - s[2] - s[3]).max(T::zero()))
}

/// h(x) = −x log₂ x − (1−x) log₂(1−x).
pub fn binary_entropy<T: Real>(x: T) -> T {
    let term = |p: T| {
        if p <= T::zero() {
            T::zero()
        } else {
            -p * p.log2()
        }
    };
    term(x) + term(T::one() - x)
}

/// Entanglement of formation as a function of the concurrence.
pub fn eof_from_concurrence<T: Real>(c: T) -> T {
    let c = c.max(T::zero()).min(T::one());
    binary_entropy((T::one() + (T::one() - c * c).sqrt()) * T::lit(0.5))
}

/// Two-qubit entanglement of formation.
pub fn eof_two_qubit<T: Real>(rho: &Density<T>) -> MeasureResult<T> {
    Ok(eof_from_concurrence(concurrence(rho)?))
}

/// Regroups a state as (subsystem `part`) | (all others), with `part` of
/// dimension 2.
fn qubit_cut<T: Real>(rho: &Density<T>, part: usize) -> MeasureResult<Density<T>> {
    let count = rho.dims().len();
    if part >= count {
        return Err(LinalgError::SubsystemOutOfRange { index: part, count }.into());
    }
    if rho.dims()[part] != 2 || count < 2 {
        return Err(MeasureError::NotQubitCut(rho.dims().to_vec()));
    }
    let order: Vec<usize> = std::iter::once(part)
        .chain((0..count).filter(|&k| k != part))
        .collect();
    Ok(permute_subsystems(rho, &order)?.as_bipartite(1))
}

/// Max of the partial-transpose and realignment trace norms across the
/// qubit `part` versus the rest.
pub fn lower_bound_lambda<T: Real>(rho: &Density<T>, part: usize) -> MeasureResult<T> {
    let cut = qubit_cut(rho, part)?;
    let pt = trace_norm(&partial_transpose(&cut, 0)?);
    let re = trace_norm(&realignment(&cut)?);
    Ok(pt.max(re))
}

/// Analytic lower bound on the entanglement of formation across the cut
/// qubit `part` | rest.
pub fn ef_lower_bound<T: Real>(rho: &Density<T>, part: usize) -> MeasureResult<T> {
    let lambda = lower_bound_lambda(rho, part)?;
    if lambda > T::lit(2.0) + T::tol(1e-9) {
        return Err(MeasureError::LambdaOutOfRange(lambda.as_f64()));
    }
    if lambda <= T::one() {
        return Ok(T::zero());
    }
    let d = (lambda - T::one()).min(T::one());
    Ok(binary_entropy(
        (T::one() + (T::one() - d * d).sqrt()) * T::lit(0.5),
    ))
}

/// Quantities attached to one qubit of the triple viewed as the focus of a
/// one-versus-two cut.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterTerms<T> {
    pub center: usize,
    /// N(ρ_{x|yz}).
    pub negativity: T,
    /// N(ρ_xy), N(ρ_xz) with y < z.
    pub pair_negativities: [T; 2],
    /// E_f(ρ_xy), E_f(ρ_xz) with y < z.
    pub pair_eof: [T; 2],
    /// E_f^LB(ρ_{x|yz}).
    pub ef_lb: T,
    /// E_PPT(ρ_{x|yz}), when supplied.
    pub e_ppt: Option<T>,
    pub t3: T,
    pub tau_lb: T,
    pub tau_ub: Option<T>,
}

impl<T: Real> CenterTerms<T> {
    pub fn compute(rho3: &Density<T>, center: usize, e_ppt: Option<T>) -> MeasureResult<Self> {
        require_three_qubit(rho3)?;
        let others: Vec<usize> = (0..3).filter(|&k| k != center).collect();
        let negativity = negativity(rho3, center)?;
        let mut pair_negativities = [T::zero(); 2];
        let mut pair_eof = [T::zero(); 2];
        for (slot, &other) in others.iter().enumerate() {
            let pair = partial_trace(rho3, &[center, other])?;
            pair_negativities[slot] = self::negativity(&pair, 0)?;
            pair_eof[slot] = eof_two_qubit(&pair)?;
        }
        let ef_lb = ef_lower_bound(rho3, center)?;
        let sq = |v: T| v * v;
        let t3 = sq(negativity) - sq(pair_negativities[0]) - sq(pair_negativities[1]);
        let pair_sq = sq(pair_eof[0]) + sq(pair_eof[1]);
        let tau_lb = sq(ef_lb) - pair_sq;
        let tau_ub = e_ppt.map(|e| sq(e) - pair_sq);
        Ok(Self {
            center,
            negativity,
            pair_negativities,
            pair_eof,
            ef_lb,
            e_ppt,
            t3,
            tau_lb,
            tau_ub,
        })
    }
}

fn all_centers<T: Real>(
    rho3: &Density<T>,
    e_ppt: Option<[T; 3]>,
) -> MeasureResult<[CenterTerms<T>; 3]> {
    let get = |x: usize| CenterTerms::compute(rho3, x, e_ppt.map(|e| e[x]));
    Ok([get(0)?, get(1)?, get(2)?])
}

fn zeroed<T: Real>(n: T) -> T {
    if n < T::lit(ZERO_THRESHOLD) {
        T::zero()
    } else {
        n
    }
}

fn n3_from<T: Real>(negs: [T; 3]) -> T {
    let p = zeroed(negs[0]) * zeroed(negs[1]) * zeroed(negs[2]);
    p.cbrt()
}

fn mean3<T: Real>(v: [T; 3]) -> T {
    (v[0] + v[1] + v[2]) / T::lit(3.0)
}

/// Geometric mean of the three one-versus-two negativities.
pub fn n3<T: Real>(rho3: &Density<T>) -> MeasureResult<T> {
    require_three_qubit(rho3)?;
    Ok(n3_from([
        negativity(rho3, 0)?,
        negativity(rho3, 1)?,
        negativity(rho3, 2)?,
    ]))
}

/// Averaged negativity monogamy residual, clamped at zero.
pub fn t3<T: Real>(rho3: &Density<T>) -> MeasureResult<T> {
    let c = all_centers(rho3, None)?;
    Ok(mean3([c[0].t3, c[1].t3, c[2].t3]).max(T::zero()))
}

/// Averaged residual with E_PPT in place of the one-versus-two entanglement
/// of formation. Not clamped.
pub fn tau_ub<T: Real>(rho3: &Density<T>, e_ppt: [T; 3]) -> MeasureResult<T> {
    let c = all_centers(rho3, Some(e_ppt))?;
    Ok(mean3(
        [0, 1, 2].map(|x| c[x].tau_ub.expect("e_ppt supplied")),
    ))
}

/// Averaged residual with the analytic lower bound, clamped at zero.
pub fn tau_lb<T: Real>(rho3: &Density<T>) -> MeasureResult<T> {
    let c = all_centers(rho3, None)?;
    Ok(mean3([c[0].tau_lb, c[1].tau_lb, c[2].tau_lb]).max(T::zero()))
}

/// The four tripartite measures of one state together with their
/// ingredients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MqcRecord<T> {
    pub n3: T,
    pub t3: T,
    /// `None` when no E_PPT values were supplied.
    pub tau_ub: Option<T>,
    pub tau_lb: T,
    pub per_center: [CenterTerms<T>; 3],
    /// N(ρ_{i|jk}), N(ρ_{j|ik}), N(ρ_{k|ij}).
    pub bipartite_negativities: [T; 3],
}

impl<T: Real> MqcRecord<T> {
    pub fn compute(rho3: &Density<T>, e_ppt: Option<[T; 3]>) -> MeasureResult<Self> {
        let per_center = all_centers(rho3, e_ppt)?;
        let negs = [0, 1, 2].map(|x| per_center[x].negativity);
        let t3 = mean3([0, 1, 2].map(|x| per_center[x].t3)).max(T::zero());
        let tau_lb = mean3([0, 1, 2].map(|x| per_center[x].tau_lb)).max(T::zero());
        let tau_ub =
            e_ppt.map(|_| mean3([0, 1, 2].map(|x| per_center[x].tau_ub.expect("e_ppt supplied"))));
        Ok(Self {
            n3: n3_from(negs),
            t3,
            tau_ub,
            tau_lb,
            per_center,
            bipartite_negativities: negs,
        })
    }

    /// Minimum of the three one-versus-two negativities.
    pub fn min_negativity(&self) -> T {
        self.bipartite_negativities
            .iter()
            .copied()
            .fold(T::infinity(), T::min)
    }
}
