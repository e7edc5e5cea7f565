// SPDX-License-Identifier: Apache-2.0

//! Large-time growth rates of the three second-moment kernels.
//!
//! With `a_n = 1/(i(Δ_fn + ω_k) − Γ_n)` and `b_n = 1/(i(Δ_ni + ω_k) + Γ_n)`
//! the rates are `a_n a_m* f̃`, `−a_n b_m* f̃` and `b_n b_m* f̃`, all probed at
//! `Δ_fi + ω_k`. The naive variants drop the widths and differentiate the
//! finite-time moments numerically instead.

use super::finite_time::{windowed_rate, KernelTerm};
use super::{KernelParams, KernelValue};
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::numeric::c;
use num_complex::Complex64;

fn one() -> Complex64 {
    c(1.0, 0.0)
}

fn require_widths(p: &KernelParams) -> Result<()> {
    p.validate()?;
    if p.gamma_n > 0.0 && p.gamma_m > 0.0 {
        Ok(())
    } else {
        Err(Error::ZeroWidthInRegularizedMode)
    }
}

fn inv(z: Complex64) -> Result<Complex64> {
    if z.norm() == 0.0 {
        Err(Error::ZeroWidthInRegularizedMode)
    } else {
        Ok(1.0 / z)
    }
}

pub(crate) fn a_coef(delta_fn: f64, omega_k: f64, gamma: f64) -> Result<Complex64> {
    inv(c(-gamma, delta_fn + omega_k))
}

pub(crate) fn b_coef(delta_ni: f64, omega_k: f64, gamma: f64) -> Result<Complex64> {
    inv(c(gamma, delta_ni + omega_k))
}

/// `d/dt E[X_n X_m*]` for large `t`, both amplitudes noise-first.
pub fn dt1_dt_asymptotic(p: &KernelParams, noise: &NoiseModel) -> Result<KernelValue> {
    require_widths(p)?;
    let an = a_coef(p.delta_fn, p.omega_k, p.gamma_n)?;
    let am = a_coef(p.delta_fm, p.omega_k, p.gamma_m)?;
    Ok(KernelValue::limit(an * am.conj() * noise.spectral_density(p.resonance())?))
}

/// `d/dt E[X_n Y_m*]` for large `t`, `Y` photon-first.
pub fn dt2_dt_asymptotic(p: &KernelParams, noise: &NoiseModel) -> Result<KernelValue> {
    require_widths(p)?;
    let an = a_coef(p.delta_fn, p.omega_k, p.gamma_n)?;
    let bm = b_coef(p.delta_mi, p.omega_k, p.gamma_m)?;
    Ok(KernelValue::limit(-an * bm.conj() * noise.spectral_density(p.resonance())?))
}

/// `d/dt E[Y_n Y_m*]` for large `t`.
pub fn dt3_dt_asymptotic(p: &KernelParams, noise: &NoiseModel) -> Result<KernelValue> {
    require_widths(p)?;
    let bn = b_coef(p.delta_ni, p.omega_k, p.gamma_n)?;
    let bm = b_coef(p.delta_mi, p.omega_k, p.gamma_m)?;
    Ok(KernelValue::limit(bn * bm.conj() * noise.spectral_density(p.resonance())?))
}

fn naive(x: KernelTerm, y: KernelTerm, p: &KernelParams, noise: &NoiseModel, window: f64) -> Result<KernelValue> {
    p.validate()?;
    let v = windowed_rate(&[x], &[y], p.t, window, noise)?;
    Ok(KernelValue::finite(v, None))
}

/// Undamped counterpart of [`dt1_dt_asymptotic`]: the window difference
/// `[T₁(t + W/2) − T₁(t − W/2)]/W` at `t = p.t` with both widths zero.
pub fn dt1_dt_naive(p: &KernelParams, noise: &NoiseModel, window: f64) -> Result<KernelValue> {
    let x = KernelTerm::noise_first(one(), p.delta_fn, p.delta_ni, p.omega_k, 0.0);
    let y = KernelTerm::noise_first(one(), p.delta_fm, p.delta_mi, p.omega_k, 0.0);
    naive(x, y, p, noise, window)
}

pub fn dt2_dt_naive(p: &KernelParams, noise: &NoiseModel, window: f64) -> Result<KernelValue> {
    let x = KernelTerm::noise_first(one(), p.delta_fn, p.delta_ni, p.omega_k, 0.0);
    let y = KernelTerm::photon_first(one(), p.delta_fm, p.delta_mi, p.omega_k, 0.0);
    naive(x, y, p, noise, window)
}

pub fn dt3_dt_naive(p: &KernelParams, noise: &NoiseModel, window: f64) -> Result<KernelValue> {
    let x = KernelTerm::photon_first(one(), p.delta_fn, p.delta_ni, p.omega_k, 0.0);
    let y = KernelTerm::photon_first(one(), p.delta_fm, p.delta_mi, p.omega_k, 0.0);
    naive(x, y, p, noise, window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::finite_time::covariance;

    fn params() -> KernelParams {
        KernelParams::from_levels(0.0, 0.0, -2.0, -2.0, 1.0, 0.1, 0.1, 250.0)
    }

    #[test]
    fn white_reference_value() {
        let v = dt1_dt_asymptotic(&params(), &NoiseModel::white()).unwrap().value;
        assert!((v.re - 1.0 / 9.01).abs() < 1e-15);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn zero_width_rejected() {
        let p = KernelParams { gamma_m: 0.0, ..params() };
        let w = NoiseModel::white();
        assert_eq!(dt2_dt_asymptotic(&p, &w), Err(Error::ZeroWidthInRegularizedMode));
        assert!(dt2_dt_naive(&KernelParams { t: 10.0, ..p }, &w, 1.0).is_ok());
    }

    #[test]
    fn finite_time_slope_approaches_limit() {
        let p = KernelParams::from_levels(0.0, 0.5, 1.7, 2.4, 1.1, 0.3, 0.2, 100.0);
        let noise = NoiseModel::exponential(0.6).unwrap();
        let x = [KernelTerm::noise_first(one(), p.delta_fn, p.delta_ni, p.omega_k, p.gamma_n)];
        let y = [KernelTerm::photon_first(one(), p.delta_fm, p.delta_mi, p.omega_k, p.gamma_m)];
        let h = 0.05;
        let d = (covariance(&x, &y, p.t + h, &noise).unwrap() - covariance(&x, &y, p.t - h, &noise).unwrap()) / (2.0 * h);
        let lim = dt2_dt_asymptotic(&p, &noise).unwrap().value;
        assert!((d - lim).norm() < 1e-4 * lim.norm(), "{d} vs {lim}");
    }
}
