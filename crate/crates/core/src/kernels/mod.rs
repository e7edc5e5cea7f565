// SPDX-License-Identifier: Apache-2.0

//! Time kernels of the second-order emission amplitudes: the propagator
//! integral `T`, its large-time derivatives, the two-time noise integral
//! `I(a, b, t)` and the mixed-term derivative.

mod asymptotic;
pub mod finite_time;
mod mixed;
mod noise_integrals;
mod propagator;

pub(crate) use asymptotic::{a_coef, b_coef};
pub use asymptotic::{
    dt1_dt_asymptotic, dt1_dt_naive, dt2_dt_asymptotic, dt2_dt_naive, dt3_dt_asymptotic, dt3_dt_naive,
};
pub use mixed::{mixed_dbc1_dt, mixed_dbc1_window_average, MixedTerm};
pub use noise_integrals::{correlation_moment, i_abt, i_abt_linear_slope};
pub use propagator::{kernel_t_damped, kernel_t_undamped, TKernel};

use crate::error::{Error, Result};
use num_complex::Complex64;

const CONSISTENCY_TOL: f64 = 1e-12;

/// Frequencies (rad/time), widths (1/time) and time entering the kernels.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KernelParams {
    pub delta_fn: f64,
    pub delta_ni: f64,
    pub delta_fm: f64,
    pub delta_mi: f64,
    pub delta_fi: f64,
    pub delta_nm: f64,
    pub omega_k: f64,
    pub nu: f64,
    pub gamma_n: f64,
    pub gamma_m: f64,
    pub t: f64,
}

impl KernelParams {
    /// Builds a consistent parameter set from the level frequencies
    /// `E/ħ` of `f`, `i`, `n` and `m`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_levels(wf: f64, wi: f64, wn: f64, wm: f64, omega_k: f64, gamma_n: f64, gamma_m: f64, t: f64) -> Self {
        Self {
            delta_fn: wf - wn,
            delta_ni: wn - wi,
            delta_fm: wf - wm,
            delta_mi: wm - wi,
            delta_fi: wf - wi,
            delta_nm: wn - wm,
            omega_k,
            nu: 0.0,
            gamma_n,
            gamma_m,
            t,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        let fields = [
            self.delta_fn, self.delta_ni, self.delta_fm, self.delta_mi, self.delta_fi, self.delta_nm,
            self.omega_k, self.nu, self.gamma_n, self.gamma_m, self.t,
        ];
        if fields.iter().any(|v| !v.is_finite()) {
            return bad("non-finite kernel parameter".into());
        }
        if self.gamma_n < 0.0 || self.gamma_m < 0.0 {
            return bad("widths must be non-negative".into());
        }
        if self.t < 0.0 {
            return bad("time must be non-negative".into());
        }
        let check = |lhs: f64, rhs: f64, what: &str| -> Result<()> {
            let scale = lhs.abs().max(rhs.abs()).max(1.0);
            if (lhs - rhs).abs() > CONSISTENCY_TOL * scale {
                Err(Error::InvalidParams(format!("inconsistent frequencies: {what}")))
            } else {
                Ok(())
            }
        };
        check(self.delta_fi, self.delta_fn + self.delta_ni, "Δ_fi ≠ Δ_fn + Δ_ni")?;
        check(self.delta_fi, self.delta_fm + self.delta_mi, "Δ_fi ≠ Δ_fm + Δ_mi")?;
        check(self.delta_nm, self.delta_ni - self.delta_mi, "Δ_nm ≠ Δ_ni − Δ_mi")?;
        Ok(())
    }

    /// `Δ_fi + ω_k`, the frequency at which the noise is probed.
    pub fn resonance(&self) -> f64 {
        self.delta_fi + self.omega_k
    }

    /// Same parameters with both widths set to zero.
    pub fn undamped(&self) -> Self {
        Self { gamma_n: 0.0, gamma_m: 0.0, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: Complex64,
    pub derivative: Option<Complex64>,
    /// Large-time limit rather than a finite-time evaluation.
    pub asymptotic: bool,
}

impl KernelValue {
    pub fn finite(value: Complex64, derivative: Option<Complex64>) -> Self {
        Self { value, derivative, asymptotic: false }
    }

    pub fn limit(value: Complex64) -> Self {
        Self { value, derivative: None, asymptotic: true }
    }
}
