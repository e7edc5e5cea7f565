// SPDX-License-Identifier: Apache-2.0

use super::{DipoleBlock, Level, NoiseChannel, Particle, SystemSpec};
use crate::error::{Error, Result};
use crate::units::Constants;
use ndarray::array;
use num_complex::Complex64;

/// Two levels `g` (energy 0) and `e` (energy `gap`) with one noise channel
/// `N = noise·σ_x`, momentum `p_x = momentum·σ_y` and a unit-charge,
/// unit-mass particle.
pub fn two_level_system(gap: f64, noise: f64, momentum: f64, widths: [f64; 2], constants: Constants) -> Result<SystemSpec> {
    if !(gap.is_finite() && gap >= 0.0) {
        return Err(Error::InvariantViolation(format!("gap must be non-negative, got {gap}")));
    }
    let z = Complex64::new(0.0, 0.0);
    let n = Complex64::new(noise, 0.0);
    let p = Complex64::new(0.0, momentum);
    let spec = SystemSpec {
        levels: vec![
            Level { label: "g".into(), energy: 0.0, edge: false },
            Level { label: "e".into(), energy: gap, edge: false },
        ],
        widths: widths.to_vec(),
        noise_couplings: vec![NoiseChannel { unit: "dimensionless".into(), matrix: array![[z, n], [n, z]] }],
        dipole: vec![DipoleBlock { direction: 0, particle: 0, matrix: array![[z, -p], [p, z]] }],
        radiation: None,
        particles: vec![Particle { charge: 1.0, mass: 1.0 }],
        constants,
        initial_state: 0,
    };
    spec.validate()?;
    Ok(spec)
}
