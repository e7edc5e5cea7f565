// SPDX-License-Identifier: Apache-2.0

//! Finite-time second moments of noise-driven amplitudes.
//!
//! An amplitude is `X = ∫₀ᵗ G(τ) w(τ) dτ` with `G` a weighted sum of the two
//! second-order kernels. Its covariance with `Y` is
//! `E[X Y*] = w_white C(0) + ∫ f(u) C(u) du`, where
//! `C(u) = ∫ G_X(σ + u) G_Y*(σ) dσ` is exact for exponential sums.

use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::numeric::{exp_integral, pairwise_sum};
use crate::quadrature::{integrate, QuadOptions};
use num_complex::Complex64;

/// Below this `|c|·t` a kernel is integrated numerically instead of being
/// split into exponentials.
const DEGENERATE: f64 = 1e-2;

/// Which time of the ordered pair `t ≥ t₁ ≥ t₂` carries the noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    /// Noise at `t₂`: `∫₀ᵗ dt₁ e^{c₁t₁} ∫₀^{t₁} dt₂ e^{c₂t₂} w(t₂)`.
    Inner,
    /// Noise at `t₁`: `∫₀ᵗ dt₁ e^{c₁t₁} w(t₁) ∫₀^{t₁} dt₂ e^{c₂t₂}`.
    Outer,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelTerm {
    pub weight: Complex64,
    pub slot: Slot,
    pub c1: Complex64,
    pub c2: Complex64,
}

impl KernelTerm {
    /// Kernel of the amplitude with the noise vertex first: intermediate `n`,
    /// `c₁ = i(Δ_fn + ω_k) − Γ_n`, `c₂ = iΔ_ni + Γ_n`.
    pub fn noise_first(weight: Complex64, delta_fn: f64, delta_ni: f64, omega_k: f64, gamma_n: f64) -> Self {
        Self {
            weight,
            slot: Slot::Inner,
            c1: Complex64::new(-gamma_n, delta_fn + omega_k),
            c2: Complex64::new(gamma_n, delta_ni),
        }
    }

    /// Kernel of the amplitude with the photon emitted first: intermediate `n`,
    /// `c₁ = iΔ_fn − Γ_n`, `c₂ = i(Δ_ni + ω_k) + Γ_n`.
    pub fn photon_first(weight: Complex64, delta_fn: f64, delta_ni: f64, omega_k: f64, gamma_n: f64) -> Self {
        Self {
            weight,
            slot: Slot::Outer,
            c1: Complex64::new(-gamma_n, delta_fn),
            c2: Complex64::new(gamma_n, delta_ni + omega_k),
        }
    }

    /// Weight of `w(τ)` in the amplitude at final time `t`.
    pub fn eval(&self, tau: f64, t: f64) -> Complex64 {
        use crate::numeric::exp_integral as phi;
        let k = match self.slot {
            Slot::Inner => ((self.c1 + self.c2) * tau).exp() * phi(self.c1, t - tau),
            Slot::Outer => (self.c1 * tau).exp() * phi(self.c2, tau),
        };
        self.weight * k
    }

    /// `∂_t` of the kernel at fixed `τ` (zero for the outer slot).
    pub fn eval_dt(&self, tau: f64, t: f64) -> Complex64 {
        match self.slot {
            Slot::Inner => self.weight * (self.c2 * tau + self.c1 * t).exp(),
            Slot::Outer => Complex64::new(0.0, 0.0),
        }
    }

    fn degenerate(&self, t: f64) -> bool {
        let c = match self.slot {
            Slot::Inner => self.c1,
            Slot::Outer => self.c2,
        };
        c.norm() * t < DEGENERATE
    }

    /// Splits the kernel into `Σ coef e^{rate (τ − origin)}`, each piece
    /// bounded on `[0, t]`.
    fn exp_terms(&self, t: f64, out: &mut Vec<ExpTerm>) {
        let w = self.weight;
        match self.slot {
            Slot::Inner => {
                // e^{(c1+c2)τ}(e^{c1(t−τ)} − 1)/c1
                let inv = w / self.c1;
                out.push(ExpTerm { coef: inv * ((self.c1 + self.c2) * t).exp(), rate: self.c2, origin: t });
                out.push(ExpTerm { coef: -inv, rate: self.c1 + self.c2, origin: 0.0 });
            }
            Slot::Outer => {
                // e^{c1τ}(e^{c2τ} − 1)/c2
                let inv = w / self.c2;
                out.push(ExpTerm { coef: inv, rate: self.c1 + self.c2, origin: 0.0 });
                out.push(ExpTerm { coef: -inv, rate: self.c1, origin: 0.0 });
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct ExpTerm {
    coef: Complex64,
    rate: Complex64,
    origin: f64,
}

enum Representation {
    Exp(Vec<ExpTerm>),
    Direct(Vec<KernelTerm>),
}

fn represent(terms: &[KernelTerm], t: f64) -> Representation {
    if terms.iter().any(|k| k.degenerate(t)) {
        Representation::Direct(terms.to_vec())
    } else {
        let mut out = Vec::with_capacity(2 * terms.len());
        terms.iter().for_each(|k| k.exp_terms(t, &mut out));
        Representation::Exp(out)
    }
}

fn eval_sum(terms: &[KernelTerm], tau: f64, t: f64) -> Complex64 {
    let v: Vec<Complex64> = terms.iter().map(|k| k.eval(tau, t)).collect();
    pairwise_sum(&v)
}

/// `∫ G_X(σ+u) G_Y*(σ) dσ` over the admissible range of `σ`.
fn lag_overlap(x: &Representation, y: &Representation, u: f64, t: f64) -> Complex64 {
    let (lo, hi) = (0f64.max(-u), t.min(t - u));
    if hi <= lo {
        return Complex64::new(0.0, 0.0);
    }
    match (x, y) {
        (Representation::Exp(xs), Representation::Exp(ys)) => {
            let len = hi - lo;
            let mut parts = Vec::with_capacity(xs.len() * ys.len());
            for a in xs {
                for b in ys {
                    let rb = b.rate.conj();
                    let z = a.rate + rb;
                    let expo = |s: f64| a.rate * (s + u - a.origin) + rb * (s - b.origin);
                    let integral = if z.re >= 0.0 {
                        expo(hi).exp() * exp_integral(-z, len)
                    } else {
                        expo(lo).exp() * exp_integral(z, len)
                    };
                    parts.push(a.coef * b.coef.conj() * integral);
                }
            }
            pairwise_sum(&parts)
        }
        _ => direct_overlap(x, y, u, t, lo, hi),
    }
}

fn rep_eval(r: &Representation, s: f64, t: f64) -> Complex64 {
    match r {
        Representation::Exp(ts) => {
            let v: Vec<Complex64> = ts.iter().map(|e| e.coef * (e.rate * (s - e.origin)).exp()).collect();
            pairwise_sum(&v)
        }
        Representation::Direct(k) => eval_sum(k, s, t),
    }
}

fn direct_overlap(x: &Representation, y: &Representation, u: f64, t: f64, lo: f64, hi: f64) -> Complex64 {
    integrate(
        |s| rep_eval(x, s + u, t) * rep_eval(y, s, t).conj(),
        lo,
        hi,
        &[],
        QuadOptions::tol(1e-300, 1e-11),
    )
    .value
}

fn quad_opts() -> QuadOptions {
    QuadOptions { abs_tol: 0.0, rel_tol: 1e-10, max_intervals: 20_000 }
}

/// `E[X Y*]` at time `t` for amplitudes built from `x` and `y` driven by the
/// same noise channel.
pub fn covariance(x: &[KernelTerm], y: &[KernelTerm], t: f64, noise: &NoiseModel) -> Result<Complex64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParams(format!("time must be finite and non-negative, got {t}")));
    }
    if t == 0.0 || x.is_empty() || y.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let rx = represent(x, t);
    let ry = represent(y, t);
    let mut total = Complex64::new(0.0, 0.0);
    let white = noise.white_weight();
    if white != 0.0 {
        total += lag_overlap(&rx, &ry, 0.0, t) * white;
    }
    if !noise.smooth_components().is_empty() {
        let cut = t.min(noise.smooth_cutoff());
        let mut breaks = noise.smooth_breakpoints();
        breaks.retain(|b| *b < cut);
        let f = |u: f64| noise.smooth_correlation(u);
        let scale = lag_overlap(&rx, &ry, 0.0, t).norm().max(f64::MIN_POSITIVE) * f(0.0).abs().max(1e-300);
        let opts = QuadOptions { abs_tol: 1e-14 * scale, ..quad_opts() };
        let pos = integrate(|u| f(u) * lag_overlap(&rx, &ry, u, t), 0.0, cut, &breaks, opts);
        if !pos.converged {
            return Err(Error::QuadratureNonConvergent { estimate: pos.error });
        }
        if std::ptr::eq(x, y) {
            // C(−u) = C(u)* when both sides coincide
            total += 2.0 * pos.value.re;
        } else {
            let neg_breaks: Vec<f64> = breaks.iter().map(|b| -b).collect();
            let neg = integrate(|u| f(u) * lag_overlap(&rx, &ry, u, t), -cut, 0.0, &neg_breaks, opts);
            if !neg.converged {
                return Err(Error::QuadratureNonConvergent { estimate: neg.error });
            }
            total += pos.value + neg.value;
        }
    }
    Ok(total)
}

/// `E|X|²` at time `t`.
pub fn second_moment(x: &[KernelTerm], t: f64, noise: &NoiseModel) -> Result<f64> {
    Ok(covariance(x, x, t, noise)?.re)
}

/// Central window difference `[F(t + W/2) − F(t − W/2)] / W` of the covariance.
pub fn windowed_rate(x: &[KernelTerm], y: &[KernelTerm], t: f64, window: f64, noise: &NoiseModel) -> Result<Complex64> {
    if !(window > 0.0 && window <= 2.0 * t) {
        return Err(Error::InvalidParams(format!("window {window} must lie in (0, 2t] with t = {t}")));
    }
    let hi = covariance(x, y, t + 0.5 * window, noise)?;
    let lo = covariance(x, y, t - 0.5 * window, noise)?;
    Ok((hi - lo) / window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::c;

    fn brute_white(x: &[KernelTerm], t: f64) -> Complex64 {
        integrate(|s| eval_sum(x, s, t) * eval_sum(x, s, t).conj(), 0.0, t, &[], QuadOptions::tol(1e-300, 1e-12)).value
    }

    #[test]
    fn white_matches_direct_quadrature() {
        let x = [
            KernelTerm { weight: c(1.0, 0.5), slot: Slot::Inner, c1: c(-0.2, 1.7), c2: c(0.2, -0.4) },
            KernelTerm { weight: c(-0.3, 0.0), slot: Slot::Outer, c1: c(-0.1, 0.6), c2: c(0.1, 2.2) },
        ];
        let t = 7.0;
        let got = covariance(&x, &x, t, &NoiseModel::white()).unwrap();
        let expect = brute_white(&x, t);
        assert!((got - expect).norm() < 1e-10 * expect.norm());
    }

    #[test]
    fn degenerate_kernel_is_continuous() {
        let mk = |eps: f64| {
            vec![KernelTerm { weight: c(1.0, 0.0), slot: Slot::Inner, c1: c(0.0, eps), c2: c(0.0, 0.8) }]
        };
        let noise = NoiseModel::exponential(0.5).unwrap();
        let t = 20.0;
        let a = second_moment(&mk(0.0), t, &noise).unwrap();
        let b = second_moment(&mk(1e-4), t, &noise).unwrap();
        let d = second_moment(&mk(1e-3), t, &noise).unwrap();
        assert!((a - b).abs() < 1e-3 * a.abs());
        assert!((b - d).abs() < 1e-2 * a.abs());
    }

    #[test]
    fn colored_matches_nested_quadrature() {
        let x = [KernelTerm { weight: c(1.0, 0.0), slot: Slot::Inner, c1: c(-0.3, 1.1), c2: c(0.3, 0.5) }];
        let noise = NoiseModel::exponential(0.8).unwrap();
        let t = 6.0;
        let got = covariance(&x, &x, t, &noise).unwrap();
        let inner = |tau: f64| {
            integrate(
                |s| eval_sum(&x, s, t).conj() * noise.smooth_correlation(tau - s),
                0.0,
                t,
                &[tau],
                QuadOptions::tol(1e-300, 1e-12),
            )
            .value
        };
        let expect = integrate(|tau| eval_sum(&x, tau, t) * inner(tau), 0.0, t, &[], QuadOptions::tol(1e-300, 1e-11)).value;
        assert!((got - expect).norm() < 1e-8 * expect.norm(), "{got} vs {expect}");
    }
}
