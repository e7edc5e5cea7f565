// SPDX-License-Identifier: Apache-2.0

use super::{DipoleBlock, Level, NoiseChannel, Particle, SystemSpec};
use crate::error::{Error, Result};
use crate::units::Constants;
use ndarray::Array2;
use num_complex::Complex64;

/// Ladder matrices `(q, p)` of a 1-D oscillator truncated to `n` levels.
fn ladder(omega0: f64, m: f64, hbar: f64, n: usize) -> (Array2<Complex64>, Array2<Complex64>) {
    let mut q = Array2::zeros((n, n));
    let mut p = Array2::zeros((n, n));
    let qs = (hbar / (2.0 * m * omega0)).sqrt();
    let ps = (m * omega0 * hbar / 2.0).sqrt();
    for k in 0..n.saturating_sub(1) {
        let s = ((k + 1) as f64).sqrt();
        q[[k + 1, k]] = Complex64::new(qs * s, 0.0);
        q[[k, k + 1]] = Complex64::new(qs * s, 0.0);
        // p = i sqrt(mωħ/2)(b† − b)
        p[[k + 1, k]] = Complex64::new(0.0, ps * s);
        p[[k, k + 1]] = Complex64::new(0.0, -ps * s);
    }
    (q, p)
}

fn check(omega0: f64, m: f64, e: f64) -> Result<()> {
    if !(omega0.is_finite() && omega0 > 0.0 && m.is_finite() && m > 0.0 && e.is_finite()) {
        return Err(Error::InvariantViolation(format!(
            "oscillator needs omega0 > 0 and m > 0 (got {omega0}, {m})"
        )));
    }
    Ok(())
}

/// One-dimensional oscillator along x: `E_n = ħω0(n + ½)`, noise coupled
/// through the position operator, radiation through `p_x`.
pub fn builtin_harmonic_oscillator(
    omega0: f64,
    m: f64,
    e: f64,
    n_levels: usize,
    constants: Constants,
) -> Result<SystemSpec> {
    if n_levels < 2 {
        return Err(Error::TooFewLevels(n_levels));
    }
    check(omega0, m, e)?;
    let (q, p) = ladder(omega0, m, constants.hbar, n_levels);
    let levels = (0..n_levels)
        .map(|n| Level {
            label: n.to_string(),
            energy: constants.hbar * omega0 * (n as f64 + 0.5),
            edge: n + 1 == n_levels,
        })
        .collect();
    let spec = SystemSpec {
        levels,
        widths: vec![0.0; n_levels],
        noise_couplings: vec![NoiseChannel { unit: "position".into(), matrix: q }],
        dipole: vec![DipoleBlock { direction: 0, particle: 0, matrix: p }],
        radiation: None,
        particles: vec![Particle { charge: e, mass: m }],
        constants,
        initial_state: 0,
    };
    spec.validate()?;
    Ok(spec)
}

/// Isotropic 3-D oscillator on the product basis `n_x, n_y, n_z < n_max`,
/// ordered by total quanta. Labels read `nx,ny,nz`.
pub fn harmonic_oscillator_3d(
    omega0: f64,
    m: f64,
    e: f64,
    n_max: usize,
    constants: Constants,
) -> Result<SystemSpec> {
    if n_max < 2 {
        return Err(Error::TooFewLevels(n_max));
    }
    check(omega0, m, e)?;
    let mut states: Vec<[usize; 3]> = Vec::with_capacity(n_max.pow(3));
    for a in 0..n_max {
        for b in 0..n_max {
            for c in 0..n_max {
                states.push([a, b, c]);
            }
        }
    }
    states.sort_by_key(|s| (s[0] + s[1] + s[2], *s));
    let dim = states.len();
    let index = |s: [usize; 3]| states.iter().position(|x| *x == s);
    let (q1, p1) = ladder(omega0, m, constants.hbar, n_max);
    let mut qs = vec![Array2::zeros((dim, dim)); 3];
    let mut ps = vec![Array2::zeros((dim, dim)); 3];
    for (col, s) in states.iter().enumerate() {
        for axis in 0..3 {
            for target in [s[axis].wrapping_sub(1), s[axis] + 1] {
                if target >= n_max {
                    continue;
                }
                let mut t = *s;
                t[axis] = target;
                let row = index(t).expect("basis closed under axis moves");
                qs[axis][[row, col]] = q1[[target, s[axis]]];
                ps[axis][[row, col]] = p1[[target, s[axis]]];
            }
        }
    }
    let levels = states
        .iter()
        .map(|s| Level {
            label: format!("{},{},{}", s[0], s[1], s[2]),
            energy: constants.hbar * omega0 * ((s[0] + s[1] + s[2]) as f64 + 1.5),
            edge: s.iter().any(|&x| x + 1 == n_max),
        })
        .collect();
    let mut noise_couplings = Vec::new();
    let mut dipole = Vec::new();
    for (axis, (q, p)) in qs.into_iter().zip(ps).enumerate() {
        noise_couplings.push(NoiseChannel { unit: "position".into(), matrix: q });
        dipole.push(DipoleBlock { direction: axis, particle: 0, matrix: p });
    }
    let spec = SystemSpec {
        levels,
        widths: vec![0.0; dim],
        noise_couplings,
        dipole,
        radiation: None,
        particles: vec![Particle { charge: e, mass: m }],
        constants,
        initial_state: 0,
    };
    spec.validate()?;
    Ok(spec)
}

/// Index of the 3-D oscillator state with the given quanta.
pub fn find_quanta(spec: &SystemSpec, quanta: [usize; 3]) -> Option<usize> {
    let label = format!("{},{},{}", quanta[0], quanta[1], quanta[2]);
    spec.levels.iter().position(|l| l.label == label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    #[test]
    fn two_level_energies() {
        let s = builtin_harmonic_oscillator(1.0, 1.0, 1.0, 2, Constants::reduced()).unwrap();
        assert_eq!(s.energies(), vec![0.5, 1.5]);
        assert!((s.noise_couplings[0].matrix[[1, 0]].re - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(matches!(
            builtin_harmonic_oscillator(1.0, 1.0, 1.0, 1, Constants::reduced()),
            Err(Error::TooFewLevels(1))
        ));
    }

    #[test]
    fn canonical_commutator_below_edge() {
        let hbar = 0.7;
        let c = Constants { hbar, ..Constants::reduced() };
        let s = builtin_harmonic_oscillator(1.3, 2.1, 1.0, 8, c).unwrap();
        let q = &s.noise_couplings[0].matrix;
        let p = &s.dipole[0].matrix;
        let comm: Array2<Complex64> = q.dot(p) - p.dot(q);
        for a in 0..7 {
            for b in 0..7 {
                let expect = if a == b { Complex64::new(0.0, hbar) } else { Complex64::new(0.0, 0.0) };
                assert!((comm[[a, b]] - expect).norm() < 1e-10, "({a},{b})");
            }
        }
    }

    #[test]
    fn product_basis_is_consistent() {
        let s = harmonic_oscillator_3d(1.0, 1.0, 1.0, 3, Constants::reduced()).unwrap();
        assert_eq!(s.len(), 27);
        assert_eq!(s.levels[0].label, "0,0,0");
        let i = find_quanta(&s, [1, 0, 0]).unwrap();
        let g = find_quanta(&s, [0, 0, 0]).unwrap();
        assert!((s.dipole[0].matrix[[i, g]] - Complex64::new(0.0, 0.5f64.sqrt())).norm() < 1e-15);
        assert_eq!(s.dipole[1].matrix[[i, g]], Complex64::new(0.0, 0.0));
    }
}
