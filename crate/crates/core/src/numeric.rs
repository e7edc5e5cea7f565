// SPDX-License-Identifier: Apache-2.0

//! Small numerical primitives shared by the kernels: cancellation-free
//! exponential integrals and deterministic summation.

use num_complex::Complex64;
use std::ops::Add;

/// Below this value of `|z|·t` the exponential integrals switch to their
/// Taylor expansion.
pub const SERIES_THRESHOLD: f64 = 1e-4;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `e^w - 1` without cancellation for small `|w|`.
pub fn cexpm1(w: Complex64) -> Complex64 {
    let (a, b) = (w.re, w.im);
    let half = (0.5 * b).sin();
    let re = a.exp_m1() * b.cos() - 2.0 * half * half;
    let im = a.exp() * b.sin();
    Complex64::new(re, im)
}

/// `∫₀ᵗ e^{z s} ds = (e^{zt} − 1)/z`, continuous through `z = 0`.
pub fn exp_integral(z: Complex64, t: f64) -> Complex64 {
    let w = z * t;
    if w.norm() < SERIES_THRESHOLD {
        // 4th order Taylor; the first neglected term is w⁵/720.
        let series = 1.0 + w * (0.5 + w * (1.0 / 6.0 + w * (1.0 / 24.0 + w / 120.0)));
        series * t
    } else {
        cexpm1(w) / z
    }
}

/// `∫₀ᵗ uᵐ e^{z u} du`.
pub fn exp_moment(m: u32, z: Complex64, t: f64) -> Complex64 {
    if t == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let w = z * t;
    if w.norm() <= 2.0 {
        // Σ_j z^j t^{m+j+1} / (j! (m+j+1))
        let mut term = Complex64::new(t.powi(m as i32 + 1), 0.0);
        let mut sum = term / (m as f64 + 1.0);
        for j in 1..80 {
            term *= w / j as f64;
            let add = term / (m as f64 + j as f64 + 1.0);
            sum += add;
            if add.norm() <= 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        let ezt = w.exp();
        let mut acc = exp_integral(z, t);
        let mut tp = 1.0;
        for k in 1..=m {
            tp *= t;
            acc = (ezt * tp - acc * k as f64) / z;
        }
        acc
    }
}

/// `∫₀ᵗ dt₁ e^{a t₁} ∫₀^{t₁} dt₂ e^{b t₂}`, the ordered two-time exponential
/// integral, evaluated without cancellation for every `a`, `b`.
pub fn simplex_exp(a: Complex64, b: Complex64, t: f64) -> Complex64 {
    if t == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if b.norm() * t >= 0.5 {
        (exp_integral(a + b, t) - exp_integral(a, t)) / b
    } else if a.norm() * t >= 0.5 {
        -(exp_integral(a + b, t) - (a * t).exp() * exp_integral(b, t)) / a
    } else {
        // Expand (e^{b s} − 1)/b in powers of b.
        let mut sum = Complex64::new(0.0, 0.0);
        let mut coef = Complex64::new(1.0, 0.0);
        for k in 0..40u32 {
            // coef = b^k / (k+1)!
            let add = coef * exp_moment(k + 1, a, t);
            sum += add;
            coef *= b / (k as f64 + 2.0);
            if add.norm() <= 1e-18 * sum.norm() && k > 2 {
                break;
            }
        }
        sum
    }
}

/// Pairwise (tree) summation. The result depends only on the order of
/// `values`, never on how the work that produced them was scheduled.
pub fn pairwise_sum<T>(values: &[T]) -> T
where
    T: Copy + Default + Add<Output = T>,
{
    match values.len() {
        0 => T::default(),
        1 => values[0],
        n if n <= 8 => values.iter().fold(T::default(), |acc, &v| acc + v),
        n => {
            let (lo, hi) = values.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}
