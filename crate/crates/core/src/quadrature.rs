// SPDX-License-Identifier: Apache-2.0

//! Adaptive Gauss-Kronrod (7/15) quadrature for complex integrands and
//! fixed Gauss-Legendre rules.

use crate::numeric::pairwise_sum;
use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-10, max_intervals: 4000 }
    }
}

impl QuadOptions {
    pub fn tol(abs_tol: f64, rel_tol: f64) -> Self {
        Self { abs_tol, rel_tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub converged: bool,
    pub evaluations: usize,
}

#[derive(Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut gauss = fc * WG[3];
    let mut kron = fc * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kron += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).norm();
    Segment { a, b, value, error }
}

/// Integrates `f` over `[a, b]`, pre-splitting at `breaks` (points outside
/// the interval are ignored).
pub fn integrate<F>(mut f: F, a: f64, b: f64, breaks: &[f64], opts: QuadOptions) -> QuadResult
where
    F: FnMut(f64) -> Complex64,
{
    if a == b {
        return QuadResult { value: Complex64::new(0.0, 0.0), error: 0.0, converged: true, evaluations: 0 };
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut pts = vec![lo];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > lo && x < hi).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    pts.extend(inner);
    pts.push(hi);

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in pts.windows(2) {
        heap.push(kronrod(&mut f, w[0], w[1]));
        evaluations += 15;
    }
    let mut converged = false;
    loop {
        let total: Complex64 = heap.iter().map(|s| s.value).sum();
        let err: f64 = heap.iter().map(|s| s.error).sum();
        if err <= opts.abs_tol.max(opts.rel_tol * total.norm()) {
            converged = true;
            break;
        }
        if heap.len() >= opts.max_intervals {
            break;
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in floating point
            heap.push(Segment { error: 0.0, ..worst });
            continue;
        }
        heap.push(kronrod(&mut f, worst.a, mid));
        heap.push(kronrod(&mut f, mid, worst.b));
        evaluations += 30;
    }
    let mut segs = heap.into_vec();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let values: Vec<Complex64> = segs.iter().map(|s| s.value).collect();
    let errors: Vec<f64> = segs.iter().map(|s| s.error).collect();
    QuadResult { value: pairwise_sum(&values) * sign, error: pairwise_sum(&errors), converged, evaluations }
}

/// Real-valued convenience wrapper.
pub fn integrate_real<F>(mut f: F, a: f64, b: f64, breaks: &[f64], opts: QuadOptions) -> QuadResult
where
    F: FnMut(f64) -> f64,
{
    integrate(|x| Complex64::new(f(x), 0.0), a, b, breaks, opts)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_oscillatory_exponential() {
        let z = Complex64::new(-0.1, 7.0);
        let r = integrate(|x| (z * x).exp(), 0.0, 10.0, &[], QuadOptions::tol(1e-13, 1e-12));
        let exact = ((z * 10.0).exp() - 1.0) / z;
        assert!(r.converged);
        assert!((r.value - exact).norm() < 1e-11);
    }

    #[test]
    fn kink_handled_with_break() {
        let r = integrate_real(|x: f64| (-x.abs()).exp(), -3.0, 5.0, &[0.0], QuadOptions::default());
        let exact = 2.0 - (-3.0f64).exp() - (-5.0f64).exp();
        assert!((r.value.re - exact).abs() < 1e-12);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let r = integrate_real(|x| x * x, 2.0, 0.0, &[], QuadOptions::default());
        assert!((r.value.re + 8.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        for n in [1usize, 2, 5, 16] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            let deg = 2 * n - 2;
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((s - 2.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n={n}");
        }
    }
}
