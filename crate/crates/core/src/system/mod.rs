// SPDX-License-Identifier: Apache-2.0

//! Bounded quantum systems given as level spectra plus matrix elements.

mod io;
mod oscillator;
mod toy;

pub use io::{load_system, parse_system, save_system, write_system};
pub use oscillator::{builtin_harmonic_oscillator, find_quanta, harmonic_oscillator_3d};
pub use toy::two_level_system;

use crate::error::{Error, Result};
use crate::units::Constants;
use ndarray::Array2;
use num_complex::Complex64;
use std::f64::consts::PI;

const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub label: String,
    pub energy: f64,
    /// Level sits at the truncation edge of its basis.
    pub edge: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub charge: f64,
    pub mass: f64,
}

/// One noise channel `ℓ` with the matrix `⟨a|N_ℓ|b⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseChannel {
    /// Free-form unit convention (e.g. `position`, `density`).
    pub unit: String,
    pub matrix: Array2<Complex64>,
}

/// Momentum matrix `⟨a|p_j|b⟩` of one particle along axis `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DipoleBlock {
    pub direction: usize,
    pub particle: usize,
    pub matrix: Array2<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub levels: Vec<Level>,
    pub widths: Vec<f64>,
    pub noise_couplings: Vec<NoiseChannel>,
    pub dipole: Vec<DipoleBlock>,
    /// Optional per-axis replacement for `Σ_p (−e_p/m_p) ⟨a|p_{p,j}|b⟩`,
    /// used for couplings beyond the dipole approximation.
    pub radiation: Option<[Array2<Complex64>; 3]>,
    pub particles: Vec<Particle>,
    pub constants: Constants,
    pub initial_state: usize,
}

impl SystemSpec {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index, len: self.len() })
        }
    }

    /// `Δ_ab = (E_a − E_b)/ħ`.
    pub fn bohr_frequency(&self, a: usize, b: usize) -> Result<f64> {
        self.check_index(a)?;
        self.check_index(b)?;
        Ok((self.levels[a].energy - self.levels[b].energy) / self.constants.hbar)
    }

    pub fn ground_index(&self) -> usize {
        (0..self.len())
            .min_by(|&a, &b| self.levels[a].energy.total_cmp(&self.levels[b].energy))
            .unwrap_or(0)
    }

    pub fn has_radiation_data(&self) -> bool {
        self.radiation.is_some() || !self.dipole.is_empty()
    }

    /// `ω_k = c k`.
    pub fn photon_frequency(&self, k: f64) -> f64 {
        self.constants.c * k
    }

    /// `α_k = sqrt(ħ / (2 ε0 ω_k (2π)³))`.
    pub fn alpha(&self, k: f64) -> f64 {
        let c = &self.constants;
        (c.hbar / (2.0 * c.eps0 * self.photon_frequency(k) * (2.0 * PI).powi(3))).sqrt()
    }

    /// `Σ_p (−e_p/m_p) ⟨a|p_{p,j}|b⟩` (or the user override) for axis `j`.
    pub fn current_matrix(&self, j: usize) -> Result<Array2<Complex64>> {
        if let Some(r) = &self.radiation {
            return Ok(r[j].clone());
        }
        if self.dipole.is_empty() {
            return Err(Error::MissingDipoleData);
        }
        let n = self.len();
        let mut out = Array2::<Complex64>::zeros((n, n));
        for block in self.dipole.iter().filter(|b| b.direction == j) {
            let p = self.particles[block.particle];
            out.scaled_add(Complex64::new(-p.charge / p.mass, 0.0), &block.matrix);
        }
        Ok(out)
    }

    /// The three radiation matrices `⟨a|R_k^j|b⟩` at wavenumber `k`.
    pub fn radiation_matrices(&self, k: f64) -> Result<[Array2<Complex64>; 3]> {
        let a = Complex64::new(self.alpha(k), 0.0);
        Ok([
            self.current_matrix(0)? * a,
            self.current_matrix(1)? * a,
            self.current_matrix(2)? * a,
        ])
    }

    /// `⟨f|R_k^j|n⟩ = α_k Σ_p (−e_p/m_p) ⟨f|p_{p,j}|n⟩` in dipole approximation.
    pub fn radiation_element(&self, k: f64, f: usize, n: usize, direction: usize) -> Result<Complex64> {
        self.check_index(f)?;
        self.check_index(n)?;
        if direction > 2 {
            return Err(Error::InvalidParams(format!("direction {direction} is not 0, 1 or 2")));
        }
        let m = self.current_matrix(direction)?;
        Ok(m[[f, n]] * self.alpha(k))
    }

    /// Checks every structural and physical invariant.
    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        let bad = |m: String| Err(Error::InvariantViolation(m));
        if n == 0 {
            return bad("system has no levels".into());
        }
        for w in self.levels.windows(2) {
            if !(w[1].energy >= w[0].energy) {
                return bad(format!("levels not sorted ascending at `{}`", w[1].label));
            }
        }
        if self.levels.iter().any(|l| !l.energy.is_finite()) {
            return bad("non-finite energy".into());
        }
        if self.widths.len() != n {
            return bad(format!("{} widths for {} levels", self.widths.len(), n));
        }
        if let Some(w) = self.widths.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return bad(format!("width {w} is negative or non-finite"));
        }
        if self.initial_state >= n {
            return bad(format!("initial state {} out of range", self.initial_state));
        }
        for (l, ch) in self.noise_couplings.iter().enumerate() {
            if ch.matrix.dim() != (n, n) {
                return bad(format!("noise coupling {l} has shape {:?}", ch.matrix.dim()));
            }
            if let Some((a, b)) = hermiticity_defect(&ch.matrix) {
                return bad(format!("noise coupling {l} is not Hermitian at ({a}, {b})"));
            }
        }
        for block in &self.dipole {
            if block.matrix.dim() != (n, n) {
                return bad(format!("dipole block ({}, {}) has wrong shape", block.direction, block.particle));
            }
            if block.direction > 2 {
                return bad(format!("dipole direction {} is not 0, 1 or 2", block.direction));
            }
            if block.particle >= self.particles.len() {
                return bad(format!("dipole block refers to missing particle {}", block.particle));
            }
            if let Some((a, b)) = hermiticity_defect(&block.matrix) {
                return bad(format!("dipole block ({}, {}) is not Hermitian at ({a}, {b})", block.direction, block.particle));
            }
        }
        if let Some(r) = &self.radiation {
            if r.iter().any(|m| m.dim() != (n, n)) {
                return bad("radiation override has wrong shape".into());
            }
        }
        for p in &self.particles {
            if !(p.mass.is_finite() && p.mass > 0.0 && p.charge.is_finite()) {
                return bad(format!("particle (charge {}, mass {}) invalid", p.charge, p.mass));
            }
        }
        self.constants.validate()?;
        Ok(())
    }
}

fn hermiticity_defect(m: &Array2<Complex64>) -> Option<(usize, usize)> {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let (r, c) = m.dim();
    for a in 0..r {
        for b in 0..c {
            if (m[[a, b]] - m[[b, a]].conj()).norm() > HERMITIAN_TOL * scale {
                return Some((a, b));
            }
        }
    }
    None
}

pub fn bohr_frequency(spec: &SystemSpec, a: usize, b: usize) -> Result<f64> {
    spec.bohr_frequency(a, b)
}

pub fn radiation_element(spec: &SystemSpec, k: f64, f: usize, n: usize, direction: usize) -> Result<Complex64> {
    spec.radiation_element(k, f, n, direction)
}

/// Noise coupling `γ` plus an optional collapse-model parameter record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConstants {
    pub gamma: f64,
    pub csl_map: Option<CslParameters>,
}

/// Collapse-rate `λ`, correlation length `r_C` and reference mass `m0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CslParameters {
    pub lambda: f64,
    pub r_c: f64,
    pub m0: f64,
}

impl CouplingConstants {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvariantViolation(format!("gamma must be positive, got {gamma}")));
        }
        Ok(Self { gamma, csl_map: None })
    }

    pub fn with_csl(mut self, p: CslParameters) -> Result<Self> {
        if [p.lambda, p.r_c, p.m0].iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvariantViolation("collapse parameters must be positive".into()));
        }
        self.csl_map = Some(p);
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn two_level() -> SystemSpec {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        SystemSpec {
            levels: vec![
                Level { label: "g".into(), energy: 0.0, edge: false },
                Level { label: "e".into(), energy: 1.0, edge: false },
            ],
            widths: vec![0.0, 0.1],
            noise_couplings: vec![NoiseChannel { unit: "position".into(), matrix: array![[z, one], [one, z]] }],
            dipole: vec![DipoleBlock {
                direction: 0,
                particle: 0,
                matrix: array![[z, Complex64::new(0.0, -1.0)], [Complex64::new(0.0, 1.0), z]],
            }],
            radiation: None,
            particles: vec![Particle { charge: 1.0, mass: 1.0 }],
            constants: Constants::reduced(),
            initial_state: 1,
        }
    }

    #[test]
    fn bohr_frequency_antisymmetric() {
        let s = two_level();
        assert_eq!(s.bohr_frequency(0, 0).unwrap(), 0.0);
        assert_eq!(s.bohr_frequency(1, 0).unwrap(), -s.bohr_frequency(0, 1).unwrap());
        assert!(matches!(s.bohr_frequency(0, 2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn non_hermitian_coupling_rejected() {
        let mut s = two_level();
        s.validate().unwrap();
        s.noise_couplings[0].matrix[[0, 1]] = Complex64::new(2.0, 0.0);
        assert!(matches!(s.validate(), Err(Error::InvariantViolation(_))));
    }

    #[test]
    fn missing_dipole_reported() {
        let mut s = two_level();
        s.dipole.clear();
        assert_eq!(s.radiation_element(1.0, 0, 1, 0), Err(Error::MissingDipoleData));
    }
}
