//! Adaptive Gauss–Kronrod (10/21-point) integration of vector-valued
//! integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::scalar::Real;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-13,
            max_intervals: 4000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuadResult<T> {
    pub values: Vec<T>,
    /// Estimated absolute error, maximum over components.
    pub error: T,
    pub evaluations: usize,
    pub converged: bool,
}

struct Panel<T> {
    a: T,
    b: T,
    values: Vec<T>,
    error: T,
}

impl<T: Real> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real> Eq for Panel<T> {}
impl<T: Real> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

fn gk21<T: Real, F: FnMut(T, &mut [T])>(
    f: &mut F,
    a: T,
    b: T,
    n: usize,
    buf: &mut [T],
) -> Panel<T> {
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    let mut kron = vec![T::zero(); n];
    let mut gauss = vec![T::zero(); n];
    f(mid, buf);
    for k in 0..n {
        kron[k] = buf[k] * T::lit(WGK[10]);
    }
    for (j, &x) in XGK[..10].iter().enumerate() {
        let dx = half * T::lit(x);
        let wk = T::lit(WGK[j]);
        let wg = if j % 2 == 1 {
            Some(T::lit(WG[j / 2]))
        } else {
            None
        };
        for &p in &[mid - dx, mid + dx] {
            f(p, buf);
            for k in 0..n {
                kron[k] += wk * buf[k];
                if let Some(w) = wg {
                    gauss[k] += w * buf[k];
                }
            }
        }
    }
    let mut error = T::zero();
    for k in 0..n {
        kron[k] *= half;
        gauss[k] *= half;
        error = error.max((kron[k] - gauss[k]).abs());
    }
    Panel {
        a,
        b,
        values: kron,
        error,
    }
}

/// Integrates the `n`-component function `f` over `[a, b]`, splitting first
/// at the given interior breakpoints.
pub fn integrate_vec<T: Real, F: FnMut(T, &mut [T])>(
    mut f: F,
    a: T,
    b: T,
    breakpoints: &[T],
    n: usize,
    opts: QuadOptions,
) -> QuadResult<T> {
    let mut edges = vec![a];
    let mut inner: Vec<T> = breakpoints
        .iter()
        .copied()
        .filter(|&p| p > a && p < b)
        .collect();
    inner.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    edges.extend(inner);
    edges.push(b);

    let mut buf = vec![T::zero(); n];
    let mut heap = BinaryHeap::new();
    for w in edges.windows(2) {
        heap.push(gk21(&mut f, w[0], w[1], n, &mut buf));
    }
    let mut evaluations = 21 * heap.len();
    let abs_tol = T::lit(opts.abs_tol);
    let rel_tol = T::lit(opts.rel_tol);
    let mut converged = false;
    loop {
        let mut total = vec![T::zero(); n];
        let mut err = T::zero();
        for p in heap.iter() {
            for k in 0..n {
                total[k] += p.values[k];
            }
            err += p.error;
        }
        let scale = total.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if err <= abs_tol.max(rel_tol * scale) {
            converged = true;
        }
        let worst_width = heap
            .peek()
            .map(|p| (p.b - p.a).abs())
            .unwrap_or_else(T::zero);
        let too_narrow = worst_width <= T::epsilon() * T::lit(64.0) * (b - a).abs();
        if converged || heap.len() >= opts.max_intervals || too_narrow {
            return QuadResult {
                values: total,
                error: err,
                evaluations,
                converged,
            };
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = (worst.a + worst.b) * T::lit(0.5);
        heap.push(gk21(&mut f, worst.a, mid, n, &mut buf));
        heap.push(gk21(&mut f, mid, worst.b, n, &mut buf));
        evaluations += 42;
    }
}

/// Scalar convenience wrapper around [`integrate_vec`].
pub fn integrate<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    b: T,
    opts: QuadOptions,
) -> QuadResult<T> {
    integrate_vec(|x, out: &mut [T]| out[0] = f(x), a, b, &[], 1, opts)
}
