// SPDX-License-Identifier: Apache-2.0

use super::{KernelParams, KernelValue};
use crate::error::Result;
use crate::numeric::{c, exp_integral, simplex_exp, I};
use num_complex::Complex64;

/// `T = ∫₀ᵗ dt₁ ∫₀^{t₁} dt₂ e^{c₁t₁} e^{d t₂}` with
/// `c₁ = i(Δ_fn + ω_k) − Γ_n` and `d = i(Δ_ni − ν) + Γ_n`, written as
/// `T = prefactor · (resonant − non_resonant)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TKernel {
    pub value: KernelValue,
    /// `(e^{ixt} − 1)/(ix)` with `x = Δ_fi + ω_k − ν`.
    pub resonant: Complex64,
    /// `e^{c₁t} (e^{dt} − 1)/d`.
    pub non_resonant: Complex64,
    /// `−1/c₁`; infinite when `c₁ = 0`, in which case `value` is still exact.
    pub prefactor: Complex64,
}

/// Propagator integral with the intermediate level decaying at `Γ_n`.
pub fn kernel_t_damped(p: &KernelParams) -> Result<TKernel> {
    p.validate()?;
    let c1 = c(-p.gamma_n, p.delta_fn + p.omega_k);
    let d = c(p.gamma_n, p.delta_ni - p.nu);
    let x = p.delta_fi + p.omega_k - p.nu;
    let t = p.t;
    let resonant = exp_integral(I * x, t);
    let non_resonant = (c1 * t).exp() * exp_integral(d, t);
    let value = simplex_exp(c1, d, t);
    // dT/dt is the inner integral at t₁ = t
    let derivative = non_resonant;
    let prefactor = if c1.norm() == 0.0 { c(f64::INFINITY, 0.0) } else { -1.0 / c1 };
    Ok(TKernel { value: KernelValue::finite(value, Some(derivative)), resonant, non_resonant, prefactor })
}

/// Propagator integral without decay; identical to the damped kernel at
/// `Γ_n = 0`.
pub fn kernel_t_undamped(p: &KernelParams) -> Result<TKernel> {
    kernel_t_damped(&KernelParams { gamma_n: 0.0, ..*p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadOptions};

    fn params() -> KernelParams {
        KernelParams { nu: 0.4, t: 6.0, ..KernelParams::from_levels(1.0, 0.0, 2.3, 0.0, 1.7, 0.35, 0.0, 6.0) }
    }

    fn simplex_oracle(p: &KernelParams) -> Complex64 {
        let c1 = c(-p.gamma_n, p.delta_fn + p.omega_k);
        let d = c(p.gamma_n, p.delta_ni - p.nu);
        let opts = QuadOptions::tol(1e-300, 1e-12);
        integrate(
            |t1| (c1 * t1).exp() * integrate(|t2| (d * t2).exp(), 0.0, t1, &[], opts).value,
            0.0,
            p.t,
            &[],
            opts,
        )
        .value
    }

    #[test]
    fn zero_time_gives_zero() {
        let p = KernelParams { t: 0.0, ..params() };
        assert_eq!(kernel_t_damped(&p).unwrap().value.value, c(0.0, 0.0));
    }

    #[test]
    fn matches_simplex_quadrature() {
        for p in [params(), KernelParams { gamma_n: 0.0, ..params() }] {
            let k = kernel_t_damped(&p).unwrap();
            let o = simplex_oracle(&p);
            assert!((k.value.value - o).norm() < 1e-8 * o.norm());
            let split = k.prefactor * (k.resonant - k.non_resonant);
            assert!((split - o).norm() < 1e-8 * o.norm());
        }
    }

    #[test]
    fn undamped_is_damped_at_zero_width() {
        let p = KernelParams { gamma_n: 0.0, ..params() };
        assert_eq!(kernel_t_undamped(&params()).unwrap(), kernel_t_damped(&p).unwrap());
    }

    #[test]
    fn resonant_peak_is_t_squared() {
        let mut p = params();
        p.nu = p.delta_fi + p.omega_k;
        let k = kernel_t_undamped(&p).unwrap();
        assert!((k.resonant.norm_sqr() - p.t * p.t).abs() < 1e-12 * p.t * p.t);
    }

    #[test]
    fn removable_singularity() {
        // Δ_fn + ω_k = 0 with no damping
        let p = KernelParams { nu: 0.2, ..KernelParams::from_levels(0.0, -1.0, 1.5, 0.0, 1.5, 0.0, 0.0, 3.0) };
        let k = kernel_t_undamped(&p).unwrap();
        let o = simplex_oracle(&p);
        assert!((k.value.value - o).norm() < 1e-9 * o.norm());
    }
}
