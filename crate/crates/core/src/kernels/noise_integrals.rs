// SPDX-License-Identifier: Apache-2.0

use super::KernelValue;
use crate::error::{Error, Result};
use crate::noise::{NoiseKind, NoiseModel};
use crate::numeric::{c, exp_integral, I};
use crate::quadrature::{integrate, QuadOptions};
use num_complex::Complex64;

const MAX_TABLE_BREAKS: usize = 4096;

fn opts() -> QuadOptions {
    QuadOptions { abs_tol: 1e-15, rel_tol: 1e-12, max_intervals: 20_000 }
}

/// `J(z, t) = ∫₀ᵗ e^{zx} f(x) dx`. A white component sits on the endpoint
/// and contributes half its weight.
pub fn correlation_moment(z: Complex64, t: f64, noise: &NoiseModel) -> Result<Complex64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParams(format!("time must be finite and non-negative, got {t}")));
    }
    if t == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut acc = Complex64::new(0.5 * noise.white_weight(), 0.0);
    for part in noise.smooth_components() {
        acc += match &part.kind {
            NoiseKind::Exponential { tau } => part.scale / (2.0 * tau) * exp_integral(z - 1.0 / tau, t),
            _ => {
                let hi = t.min(part.smooth_cutoff());
                let breaks = table_breaks(&part, hi);
                let r = integrate(|x| (z * x).exp() * part.smooth_correlation(x), 0.0, hi, &breaks, opts());
                if !r.converged {
                    return Err(Error::QuadratureNonConvergent { estimate: r.error });
                }
                r.value
            }
        };
    }
    Ok(acc)
}

fn table_breaks(part: &NoiseModel, hi: f64) -> Vec<f64> {
    match &part.kind {
        NoiseKind::Tabulated(tab) => {
            let inside: Vec<f64> = tab.nodes().iter().copied().filter(|&s| s > 0.0 && s < hi).collect();
            if inside.len() <= MAX_TABLE_BREAKS {
                inside
            } else {
                Vec::new()
            }
        }
        _ => Vec::new(),
    }
}

/// `I(a, b, t) = ∫₀ᵗ∫₀ᵗ e^{a t₁} e^{b t₂} f(t₁ − t₂) dt₁ dt₂`.
pub fn i_abt(a: Complex64, b: Complex64, t: f64, noise: &NoiseModel) -> Result<Complex64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParams(format!("time must be finite and non-negative, got {t}")));
    }
    if t == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let s = a + b;
    if s.norm() * t >= 1.0 {
        // (1/(a+b)) [e^{(a+b)t}(J(−b) + J(−a)) − J(a) − J(b)]
        let jp = correlation_moment(-b, t, noise)? + correlation_moment(-a, t, noise)?;
        let jm = correlation_moment(a, t, noise)? + correlation_moment(b, t, noise)?;
        return Ok(((s * t).exp() * jp - jm) / s);
    }
    // near a = −b the reduction cancels; integrate f(u)(e^{au} + e^{bu})φ(a+b, t−u)
    let mut acc = noise.white_weight() * exp_integral(s, t);
    for part in noise.smooth_components() {
        let hi = t.min(part.smooth_cutoff());
        let breaks = table_breaks(&part, hi);
        let r = integrate(
            |u| part.smooth_correlation(u) * ((a * u).exp() + (b * u).exp()) * exp_integral(s, t - u),
            0.0,
            hi,
            &breaks,
            opts(),
        );
        if !r.converged {
            return Err(Error::QuadratureNonConvergent { estimate: r.error });
        }
        acc += r.value;
    }
    Ok(acc)
}

/// Growth rate of `I(iν, −iν, t)`: `J(iν, t) + J(−iν, t)` at finite `t`,
/// `f̃(ν)` in the limit (`t = ∞`).
pub fn i_abt_linear_slope(nu: f64, t: f64, noise: &NoiseModel) -> Result<KernelValue> {
    if t == f64::INFINITY {
        return Ok(KernelValue::limit(c(noise.spectral_density(nu)?, 0.0)));
    }
    let v = correlation_moment(I * nu, t, noise)? + correlation_moment(-I * nu, t, noise)?;
    Ok(KernelValue::finite(v, None))
}
