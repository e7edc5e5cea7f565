// SPDX-License-Identifier: Apache-2.0

//! Radiative widths from the imaginary part of the vacuum energy shift, in
//! dipole approximation.

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;
use crate::system::SystemSpec;
use crate::units::Constants;
use std::f64::consts::PI;

/// `β = e²/(6π ε0 c³)`.
pub fn beta_constant(e: f64, constants: &Constants) -> f64 {
    e * e / (6.0 * PI * constants.eps0 * constants.c.powi(3))
}

/// Excitation `(i₁, i₂, i₃)` of an isotropic 3-D oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorState {
    pub quanta: [u32; 3],
    pub omega0: f64,
    pub m: f64,
    pub e: f64,
}

impl OscillatorState {
    pub fn new(quanta: [u32; 3], omega0: f64, m: f64, e: f64) -> Result<Self> {
        if !(omega0.is_finite() && omega0 > 0.0 && m.is_finite() && m > 0.0 && e.is_finite()) {
            return Err(Error::InvalidParams(format!("oscillator needs ω0 > 0 and m > 0, got {omega0}, {m}")));
        }
        Ok(Self { quanta, omega0, m, e })
    }

    pub fn total_quanta(&self) -> u32 {
        self.quanta.iter().sum()
    }

    /// `Λ = β ω0² / 2m`.
    pub fn decay_rate(&self, constants: &Constants) -> f64 {
        beta_constant(self.e, constants) * self.omega0 * self.omega0 / (2.0 * self.m)
    }
}

/// Imaginary part of the energy shift, `−ħ Λ Σ_j i_j`.
pub fn ho_energy_shift(state: &OscillatorState, constants: &Constants) -> f64 {
    -constants.hbar * state.decay_rate(constants) * state.total_quanta() as f64
}

/// `Γ = −ΔE/ħ = Λ Σ_j i_j`.
pub fn ho_width(state: &OscillatorState, constants: &Constants) -> f64 {
    state.decay_rate(constants) * state.total_quanta() as f64
}

/// Width of level `i`: `Σ_{E_n < E_i} Δ_in Σ_j |⟨n|D_j|i⟩|² / (6π ε0 c³ ħ)`
/// with `D_j = Σ_p (−e_p/m_p) p_{p,j}`.
pub fn generic_linewidth(spec: &SystemSpec, i: usize) -> Result<f64> {
    if i >= spec.len() {
        return Err(Error::IndexOutOfRange { index: i, len: spec.len() });
    }
    let c = &spec.constants;
    let d = [spec.current_matrix(0)?, spec.current_matrix(1)?, spec.current_matrix(2)?];
    let ei = spec.levels[i].energy;
    let mut terms = Vec::new();
    for n in (0..spec.len()).filter(|&n| spec.levels[n].energy < ei) {
        let delta = (ei - spec.levels[n].energy) / c.hbar;
        let weight: f64 = d.iter().map(|m| m[[n, i]].norm_sqr()).sum();
        terms.push(delta * weight);
    }
    Ok(pairwise_sum(&terms) / (6.0 * PI * c.eps0 * c.c.powi(3) * c.hbar))
}

/// Replaces every width of `spec` by its radiative value.
pub fn fill_widths(spec: &mut SystemSpec) -> Result<()> {
    let widths = (0..spec.len()).map(|i| generic_linewidth(spec, i)).collect::<Result<Vec<_>>>()?;
    spec.widths = widths;
    Ok(())
}
