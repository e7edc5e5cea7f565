// SPDX-License-Identifier: Apache-2.0

//! Second-order amplitudes integrated directly over a sampled trajectory.
//!
//! `A₁ = (√γ/ħ) Σ_{n,ℓ} ⟨f|R|n⟩⟨n|N_ℓ|i⟩ ∫₀ᵗdt₁ e^{c₁t₁} ∫₀^{t₁}dt₂ e^{c₂t₂} w_ℓ(t₂)`
//! with the noise at the earlier time, and `A₂` the same with the noise at
//! `t₁`. The projection `R = R_k · ε` uses `ε` along one Cartesian axis.

use super::sampling::NoiseRealization;
use crate::error::{Error, Result};
use crate::numeric::{c, exp_integral, I};
use crate::system::SystemSpec;
use num_complex::Complex64;

/// Grid misalignment tolerated when locating `t` on the sample grid.
const GRID_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeSetup {
    /// Polarization axis `j`.
    pub direction: usize,
    /// Include the `e^{−Γ_n(t₁−t₂)}` propagator decay.
    pub damped: bool,
    pub gamma: f64,
}

impl AmplitudeSetup {
    pub fn new(direction: usize, damped: bool, gamma: f64) -> Self {
        Self { direction, damped, gamma }
    }
}

fn steps(real: &NoiseRealization, t: f64) -> Result<usize> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParams(format!("time must be non-negative, got {t}")));
    }
    if t > real.duration() * (1.0 + GRID_TOL) {
        return Err(Error::TrajectoryTooShort { available: real.duration(), requested: t });
    }
    let s = (t / real.dt).round();
    if (s * real.dt - t).abs() > GRID_TOL * t.max(real.dt) {
        return Err(Error::InvalidParams(format!("t = {t} is not a multiple of dt = {}", real.dt)));
    }
    Ok(s as usize)
}

fn check(spec: &SystemSpec, real: &NoiseRealization, f: usize, setup: &AmplitudeSetup) -> Result<()> {
    if f >= spec.len() {
        return Err(Error::IndexOutOfRange { index: f, len: spec.len() });
    }
    if setup.direction > 2 {
        return Err(Error::InvalidParams(format!("direction {} is not 0, 1 or 2", setup.direction)));
    }
    if real.samples.len() < spec.noise_couplings.len() {
        return Err(Error::InvalidParams(format!(
            "realization has {} channels, system needs {}",
            real.samples.len(),
            spec.noise_couplings.len()
        )));
    }
    Ok(())
}

fn trapezoid(values: &[Complex64], h: f64) -> Complex64 {
    match values.len() {
        0 | 1 => Complex64::new(0.0, 0.0),
        n => {
            let inner: Complex64 = values[1..n - 1].iter().sum();
            (inner + 0.5 * (values[0] + values[n - 1])) * h
        }
    }
}

/// `∫₀ᵗ dt₁ e^{c₁t₁} ∫₀^{t₁} dt₂ e^{c₂t₂} w(t₂)` by nested cumulative
/// trapezoid. The inner integral is carried as `H(t₁) = e^{c₁t₁}∫₀^{t₁}…`,
/// which stays bounded when `Re c₂ > 0`.
fn inner_slot(c1: Complex64, c2: Complex64, w: &[f64], h: f64) -> Complex64 {
    let step = (c1 * h).exp();
    let s = c1 + c2;
    let mut hval = Complex64::new(0.0, 0.0);
    let mut outer = Vec::with_capacity(w.len());
    outer.push(hval);
    for k in 1..w.len() {
        let prev = (s * ((k - 1) as f64 * h)).exp() * w[k - 1];
        let next = (s * (k as f64 * h)).exp() * w[k];
        hval = step * (hval + 0.5 * h * prev) + 0.5 * h * next;
        outer.push(hval);
    }
    trapezoid(&outer, h)
}

/// `∫₀ᵗ dt₁ e^{c₁t₁} w(t₁) ∫₀^{t₁} dt₂ e^{c₂t₂}` with the inner integral exact.
fn outer_slot(c1: Complex64, c2: Complex64, w: &[f64], h: f64) -> Complex64 {
    let vals: Vec<Complex64> = w
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let t1 = k as f64 * h;
            (c1 * t1).exp() * exp_integral(c2, t1) * x
        })
        .collect();
    trapezoid(&vals, h)
}

fn width(spec: &SystemSpec, n: usize, setup: &AmplitudeSetup) -> f64 {
    if setup.damped {
        spec.widths[n]
    } else {
        0.0
    }
}

fn radiation(spec: &SystemSpec, k: f64, setup: &AmplitudeSetup) -> Result<ndarray::Array2<Complex64>> {
    Ok(spec.current_matrix(setup.direction)? * c(spec.alpha(k), 0.0))
}

/// Noise-first amplitude at time `t`.
pub fn amplitude_a1_direct(
    spec: &SystemSpec,
    real: &NoiseRealization,
    k: f64,
    f: usize,
    t: f64,
    setup: &AmplitudeSetup,
) -> Result<Complex64> {
    check(spec, real, f, setup)?;
    let ns = steps(real, t)?;
    let r = radiation(spec, k, setup)?;
    let i = spec.initial_state;
    let h = spec.constants.hbar;
    let omega_k = spec.photon_frequency(k);
    let mut acc = Complex64::new(0.0, 0.0);
    for (l, ch) in spec.noise_couplings.iter().enumerate() {
        let w = &real.samples[l][..=ns];
        for n in 0..spec.len() {
            let weight = r[[f, n]] * ch.matrix[[n, i]];
            if weight.norm() == 0.0 {
                continue;
            }
            let g = width(spec, n, setup);
            let dfn = (spec.levels[f].energy - spec.levels[n].energy) / h;
            let dni = (spec.levels[n].energy - spec.levels[i].energy) / h;
            acc += weight * inner_slot(c(-g, dfn + omega_k), c(g, dni), w, real.dt);
        }
    }
    Ok(acc * (setup.gamma.sqrt() / h))
}

/// Photon-first amplitude at time `t`.
pub fn amplitude_a2_direct(
    spec: &SystemSpec,
    real: &NoiseRealization,
    k: f64,
    f: usize,
    t: f64,
    setup: &AmplitudeSetup,
) -> Result<Complex64> {
    check(spec, real, f, setup)?;
    let ns = steps(real, t)?;
    let r = radiation(spec, k, setup)?;
    let i = spec.initial_state;
    let h = spec.constants.hbar;
    let omega_k = spec.photon_frequency(k);
    let mut acc = Complex64::new(0.0, 0.0);
    for (l, ch) in spec.noise_couplings.iter().enumerate() {
        let w = &real.samples[l][..=ns];
        for n in 0..spec.len() {
            let weight = ch.matrix[[f, n]] * r[[n, i]];
            if weight.norm() == 0.0 {
                continue;
            }
            let g = width(spec, n, setup);
            let dfn = (spec.levels[f].energy - spec.levels[n].energy) / h;
            let dni = (spec.levels[n].energy - spec.levels[i].energy) / h;
            acc += weight * outer_slot(c(-g, dfn), c(g, dni + omega_k), w, real.dt);
        }
    }
    Ok(acc * (setup.gamma.sqrt() / h))
}

/// First-order amplitude `(−i/ħ)⟨f|R|i⟩ ∫₀ᵗ e^{i(Δ_fi+ω_k)t₁} dt₁`; it does
/// not involve the noise.
pub fn amplitude_b(spec: &SystemSpec, k: f64, f: usize, t: f64, direction: usize) -> Result<Complex64> {
    let i = spec.initial_state;
    let r = spec.radiation_element(k, f, i, direction)?;
    let x = spec.bohr_frequency(f, i)? + spec.photon_frequency(k);
    Ok(-I / spec.constants.hbar * r * exp_integral(I * x, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoiseModel;
    use crate::numeric::simplex_exp;
    use crate::system::builtin_harmonic_oscillator;
    use crate::units::Constants;

    fn toy() -> SystemSpec {
        let mut s = builtin_harmonic_oscillator(1.0, 1.0, 1.0, 2, Constants::reduced()).unwrap();
        s.widths = vec![0.0, 0.25];
        s
    }

    fn cosine(nu: f64, t: f64, dt: f64) -> NoiseRealization {
        let n = (t / dt).round() as usize + 1;
        let w: Vec<f64> = (0..n).map(|k| (nu * k as f64 * dt).cos()).collect();
        NoiseRealization { dt, samples: vec![w], seed: 0, stream: 0, target: NoiseModel::white() }
    }

    #[test]
    fn zero_trajectory_gives_zero() {
        let s = toy();
        let mut r = cosine(1.0, 5.0, 0.01);
        r.samples[0].iter_mut().for_each(|x| *x = 0.0);
        let setup = AmplitudeSetup::new(0, true, 1.0);
        assert_eq!(amplitude_a1_direct(&s, &r, 1.5, 0, 5.0, &setup).unwrap(), c(0.0, 0.0));
        assert_eq!(amplitude_a2_direct(&s, &r, 1.5, 0, 5.0, &setup).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn cosine_drive_matches_closed_form() {
        // cos(νt) = (e^{iνt} + e^{−iνt})/2 turns both slots into simplex integrals
        let s = toy();
        let (nu, t, dt, k) = (0.7, 6.0, 1e-3, 1.5);
        let r = cosine(nu, t, dt);
        let setup = AmplitudeSetup::new(0, true, 1.0);
        let g = 0.25;
        let rad = s.radiation_element(k, 0, 1, 0).unwrap();
        let nq = s.noise_couplings[0].matrix[[1, 0]];
        let (c1, c2) = (c(-g, -1.0 + k), c(g, 1.0));
        let expect = rad * nq * 0.5 * (simplex_exp(c1, c2 + I * nu, t) + simplex_exp(c1, c2 - I * nu, t));
        let got = amplitude_a1_direct(&s, &r, k, 0, t, &setup).unwrap();
        assert!((got - expect).norm() < 1e-5 * expect.norm(), "{got} vs {expect}");

        let rad2 = s.radiation_element(k, 1, 0, 0).unwrap();
        let (d1, d2) = (c(-g, -1.0), c(g, 1.0 + k));
        let expect2 = nq * rad2 * 0.5
            * (simplex_exp(d1 + I * nu, d2, t) + simplex_exp(d1 - I * nu, d2, t));
        let got2 = amplitude_a2_direct(&s, &r, k, 0, t, &setup).unwrap();
        assert!((got2 - expect2).norm() < 1e-5 * expect2.norm(), "{got2} vs {expect2}");
    }

    #[test]
    fn linear_in_trajectory() {
        let s = toy();
        let r = cosine(0.3, 4.0, 0.01);
        let setup = AmplitudeSetup::new(0, false, 2.0);
        let a = amplitude_a1_direct(&s, &r, 1.1, 0, 4.0, &setup).unwrap();
        let b = amplitude_a1_direct(&s, &r.clone().scaled(3.0), 1.1, 0, 4.0, &setup).unwrap();
        assert!((b - 3.0 * a).norm() < 1e-13 * b.norm());
    }

    #[test]
    fn short_trajectory_rejected() {
        let s = toy();
        let r = cosine(0.3, 4.0, 0.01);
        let setup = AmplitudeSetup::new(0, true, 1.0);
        assert!(matches!(amplitude_a2_direct(&s, &r, 1.1, 0, 5.0, &setup), Err(Error::TrajectoryTooShort { .. })));
    }
}
