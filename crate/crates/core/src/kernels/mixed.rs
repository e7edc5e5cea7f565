// SPDX-License-Identifier: Apache-2.0

//! Large-time derivative of the interference between the first-order
//! amplitude and the third-order amplitude with two noise vertices.

use super::noise_integrals::correlation_moment;
use super::{KernelParams, KernelValue};
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::numeric::{c, pairwise_sum, I};
use crate::quadrature::gauss_legendre;
use num_complex::Complex64;
use std::f64::consts::PI;

const NODES_PER_PERIOD: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedTerm {
    pub value: KernelValue,
    /// Modulus bound of the bracket, `(|J₁|/|iΔ_ni + Γ_n| + |J₂|/|i(Δ_fn+ω_k) − Γ_n|)/|Δ_fi + ω_k|`.
    pub bound: f64,
}

fn parts(p: &KernelParams, t: f64, noise: &NoiseModel) -> Result<(Complex64, Complex64, f64)> {
    let x = p.resonance();
    if x == 0.0 {
        return Err(Error::ResonantMixedTerm);
    }
    let dn = c(p.gamma_n, p.delta_ni);
    let en = c(-p.gamma_n, p.delta_fn + p.omega_k);
    if dn.norm() == 0.0 || en.norm() == 0.0 {
        return Err(Error::ZeroWidthInRegularizedMode);
    }
    let j1 = correlation_moment(c(-p.gamma_m, -p.delta_mi), t, noise)?;
    let j2 = correlation_moment(c(-p.gamma_m, p.delta_fm + p.omega_k), t, noise)?;
    let v = ((I * x * t).exp() * j1 / dn + (-I * x * t).exp() * j2 / en) / (I * x);
    let bound = (j1.norm() / dn.norm() + j2.norm() / en.norm()) / x.abs();
    Ok((v, c(bound, 0.0), x))
}

/// `d/dt` of the mixed kernel at `t = p.t`, in its large-time form.
pub fn mixed_dbc1_dt(p: &KernelParams, noise: &NoiseModel) -> Result<MixedTerm> {
    p.validate()?;
    let (v, b, _) = parts(p, p.t, noise)?;
    Ok(MixedTerm { value: KernelValue::finite(v, None), bound: b.re })
}

/// Mean of [`mixed_dbc1_dt`] over `periods` full oscillation periods
/// `[t, t + 2π·periods/|Δ_fi + ω_k|]`.
pub fn mixed_dbc1_window_average(p: &KernelParams, noise: &NoiseModel, periods: u32) -> Result<Complex64> {
    p.validate()?;
    if periods == 0 {
        return Err(Error::InvalidParams("window must span at least one period".into()));
    }
    let x = p.resonance();
    if x == 0.0 {
        return Err(Error::ResonantMixedTerm);
    }
    let period = 2.0 * PI / x.abs();
    let (nodes, weights) = gauss_legendre(NODES_PER_PERIOD);
    let mut acc = Vec::with_capacity(periods as usize * NODES_PER_PERIOD);
    for k in 0..periods {
        let a = p.t + k as f64 * period;
        for (xi, wi) in nodes.iter().zip(&weights) {
            let s = a + 0.5 * period * (xi + 1.0);
            acc.push(parts(p, s, noise)?.0 * (0.5 * wi / periods as f64));
        }
    }
    Ok(pairwise_sum(&acc))
}
