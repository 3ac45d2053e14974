use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::{Chain, Params};
use crate::quadrature::{integrate_vec, QuadOptions};
use crate::scalar::Real;

/// Integrand numerator/denominator pair of the correlation sum at angle φ.
#[inline]
fn weight<T: Real>(phi: T, lambda: T, gamma: T) -> (T, T, T) {
    let (s, c) = phi.sin_cos();
    let a = T::one() + lambda * c;
    let b = lambda * gamma * s;
    let big = (a * a + b * b).sqrt();
    (a, b, big)
}

fn fill_terms<T: Real>(phi: T, lambda: T, gamma: T, max_r: usize, out: &mut [T]) {
    let (a, b, big) = weight(phi, lambda, gamma);
    if big <= T::min_positive_value() {
        out.iter_mut().for_each(|o| *o = T::zero());
        return;
    }
    let inv = T::one() / big;
    for (k, o) in out.iter_mut().enumerate() {
        let r = T::lit(k as f64 - max_r as f64);
        let (sr, cr) = (phi * r).sin_cos();
        *o = (cr * a - b * sr) * inv;
    }
}

fn infinite_values<T: Real>(lambda: T, gamma: T, max_r: usize) -> Vec<T> {
    let n = 2 * max_r + 1;
    let pi = T::PI();
    let mut breaks = Vec::new();
    if lambda > T::one() {
        breaks.push((-T::one() / lambda).acos());
    }
    let res = integrate_vec(
        |phi, out: &mut [T]| fill_terms(phi, lambda, gamma, max_r, out),
        T::zero(),
        pi,
        &breaks,
        n,
        QuadOptions::default(),
    );
    res.values.into_iter().map(|v| v / pi).collect()
}

fn finite_values<T: Real>(lambda: T, gamma: T, length: usize, max_r: usize) -> Vec<T> {
    let n = 2 * max_r + 1;
    let mut acc = vec![T::zero(); n];
    let mut buf = vec![T::zero(); n];
    let half = (length as i64 - 1) / 2;
    let two_pi = T::lit(2.0) * T::PI();
    let l = T::lit(length as f64);
    for q in -half..=half {
        let phi = two_pi * T::lit(q as f64) / l;
        fill_terms(phi, lambda, gamma, max_r, &mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += *b;
        }
    }
    acc.into_iter().map(|v| v / l).collect()
}

/// G_r = ⟨A_l B_{l+r}⟩ in the thermodynamic limit.
pub fn g_infinite<T: Real>(r: i64, params: &Params<T>) -> T {
    let m = r.unsigned_abs() as usize;
    let v = infinite_values(params.lambda, params.gamma, m);
    v[(r + m as i64) as usize]
}

/// G_r for a periodic ring of odd length L, momenta 2πq/L with integer
/// |q| ≤ (L−1)/2.
pub fn g_finite<T: Real>(r: i64, params: &Params<T>) -> T {
    let length = params.chain.length().expect("finite chain");
    let m = r.unsigned_abs() as usize;
    let v = finite_values(params.lambda, params.gamma, length, m);
    v[(r + m as i64) as usize]
}

/// G_r for all |r| ≤ max_r at one parameter point.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationTable<T> {
    params: Params<T>,
    max_r: usize,
    values: Vec<T>,
}

impl<T: Real> CorrelationTable<T> {
    pub fn compute(params: &Params<T>, max_r: usize) -> Self {
        let values = match params.chain {
            Chain::Infinite => infinite_values(params.lambda, params.gamma, max_r),
            Chain::Finite(l) => finite_values(params.lambda, params.gamma, l, max_r),
        };
        Self {
            params: *params,
            max_r,
            values,
        }
    }

    /// Builds a table from explicit values of G_{-max_r..=max_r}.
    pub fn from_values(params: Params<T>, values: Vec<T>) -> Self {
        assert!(values.len() % 2 == 1, "need an odd number of offsets");
        let max_r = values.len() / 2;
        Self {
            params,
            max_r,
            values,
        }
    }

    pub fn params(&self) -> &Params<T> {
        &self.params
    }

    pub fn max_r(&self) -> usize {
        self.max_r
    }

    /// G_r; panics when |r| exceeds the tabulated range.
    pub fn get(&self, r: i64) -> T {
        assert!(
            r.unsigned_abs() as usize <= self.max_r,
            "offset {r} outside table"
        );
        self.values[(r + self.max_r as i64) as usize]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

type Key = (u64, u64, Chain);

/// Thread-safe memo of correlation tables keyed on the exact bits of
/// (λ, γ) and the chain length.
#[derive(Debug, Default)]
pub struct CorrelationCache<T> {
    map: RwLock<HashMap<Key, Arc<CorrelationTable<T>>>>,
}

impl<T: Real> CorrelationCache<T> {
    pub fn new() -> Self {
        Self {
            map: RwLock::new(HashMap::new()),
        }
    }

    pub fn table(&self, params: &Params<T>, max_r: usize) -> Arc<CorrelationTable<T>> {
        let key = (
            params.lambda.as_f64().to_bits(),
            params.gamma.as_f64().to_bits(),
            params.chain,
        );
        if let Ok(map) = self.map.read() {
            if let Some(t) = map.get(&key) {
                if t.max_r >= max_r {
                    return Arc::clone(t);
                }
            }
        }
        let table = Arc::new(CorrelationTable::compute(params, max_r));
        if let Ok(mut map) = self.map.write() {
            let keep_existing = map.get(&key).is_some_and(|t| t.max_r >= max_r);
            if !keep_existing {
                map.insert(key, Arc::clone(&table));
            }
        }
        table
    }

    pub fn len(&self) -> usize {
        self.map.read().map(|m| m.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&self) {
        if let Ok(mut m) = self.map.write() {
            m.clear();
        }
    }
}
