// SPDX-License-Identifier: Apache-2.0

//! Polarization sum and solid-angle integral `Σ_λ ∫ dΩ ε_λ^j ε_λ^{j'}`.

use crate::quadrature::gauss_legendre;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AngularMethod {
    /// Closed form `(8π/3) δ_jj'`, valid in dipole approximation.
    #[default]
    DipoleIdentity,
    /// Product rule: Gauss-Legendre in `cos θ` times trapezoid in `φ`.
    SphereQuadrature,
}

const POLAR_NODES: usize = 16;
const AZIMUTH_NODES: usize = 32;

/// Two unit vectors orthogonal to each other and to `k̂(θ, φ)`.
pub fn polarization_vectors(cos_theta: f64, phi: f64) -> [[f64; 3]; 2] {
    let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
    let (sp, cp) = phi.sin_cos();
    [[cos_theta * cp, cos_theta * sp, -sin_theta], [-sp, cp, 0.0]]
}

fn sphere_matrix() -> [[f64; 3]; 3] {
    let (x, w) = gauss_legendre(POLAR_NODES);
    let dphi = 2.0 * PI / AZIMUTH_NODES as f64;
    let mut m = [[0.0; 3]; 3];
    for (ct, wt) in x.iter().zip(&w) {
        for q in 0..AZIMUTH_NODES {
            let phi = q as f64 * dphi;
            for e in polarization_vectors(*ct, phi) {
                for (j, row) in m.iter_mut().enumerate() {
                    for (jp, cell) in row.iter_mut().enumerate() {
                        *cell += wt * dphi * e[j] * e[jp];
                    }
                }
            }
        }
    }
    m
}

/// The full 3×3 angular matrix.
pub fn angular_matrix(method: AngularMethod) -> [[f64; 3]; 3] {
    match method {
        AngularMethod::DipoleIdentity => {
            let d = 8.0 * PI / 3.0;
            [[d, 0.0, 0.0], [0.0, d, 0.0], [0.0, 0.0, d]]
        }
        AngularMethod::SphereQuadrature => sphere_matrix(),
    }
}

/// Entry `(j, j')` of [`angular_matrix`].
pub fn angular_polarization_factor(method: AngularMethod, j: usize, jp: usize) -> f64 {
    angular_matrix(method)[j][jp]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polarizations_are_transverse() {
        for (ct, phi) in [(0.3f64, 1.1f64), (-0.9, 4.0), (1.0, 0.0)] {
            let st = (1.0f64 - ct * ct).sqrt();
            let k = [st * phi.cos(), st * phi.sin(), ct];
            let [a, b] = polarization_vectors(ct, phi);
            let dot = |u: &[f64; 3], v: &[f64; 3]| u.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();
            assert!(dot(&a, &k).abs() < 1e-15 && dot(&b, &k).abs() < 1e-15 && dot(&a, &b).abs() < 1e-15);
        }
    }

    #[test]
    fn identity_is_exact() {
        assert_eq!(angular_polarization_factor(AngularMethod::DipoleIdentity, 1, 1), 8.0 * PI / 3.0);
        assert_eq!(angular_polarization_factor(AngularMethod::DipoleIdentity, 0, 2), 0.0);
    }
}
