// SPDX-License-Identifier: Apache-2.0

use super::amplitude::{amplitude_a1_direct, amplitude_a2_direct, AmplitudeSetup};
use super::sampling::{NoiseRealization, NoiseSampler};
use crate::error::{Error, Result};
use crate::kernels::finite_time::{covariance, KernelTerm};
use crate::noise::NoiseModel;
use crate::numeric::{c, pairwise_sum};
use crate::parallel::{par_map_range, Execution};
use crate::system::SystemSpec;

pub const MIN_SAMPLES: usize = 100;

/// Sample mean with its standard error `sd/√n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: usize,
}

impl AmplitudeEstimate {
    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len();
        let mean = pairwise_sum(values) / n as f64;
        let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        let var = if n > 1 { pairwise_sum(&dev) / (n - 1) as f64 } else { 0.0 };
        Self { mean, stderr: (var / n as f64).sqrt(), n_samples: n }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EstimateOptions {
    pub dt: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub setup: AmplitudeSetup,
    pub execution: Execution,
}

/// Monte-Carlo `E|A₁ + A₂|²` at time `t`; realization `r` uses stream `r`
/// of `seed`.
pub fn estimate_pfi(
    spec: &SystemSpec,
    model: &NoiseModel,
    k: f64,
    f: usize,
    t: f64,
    opts: &EstimateOptions,
) -> Result<AmplitudeEstimate> {
    if opts.n_samples < MIN_SAMPLES {
        return Err(Error::InvalidParams(format!("need at least {MIN_SAMPLES} samples, got {}", opts.n_samples)));
    }
    let omega_max = max_frequency(spec, k);
    if omega_max > 0.0 && opts.dt > 2.0 * std::f64::consts::PI / omega_max / 20.0 {
        return Err(Error::InvalidParams(format!("dt = {} does not resolve frequency {omega_max}", opts.dt)));
    }
    let sampler = NoiseSampler::new(model, t, opts.dt)?;
    let channels = spec.noise_couplings.len();
    let results = par_map_range(opts.execution, opts.n_samples, |r| -> Result<f64> {
        let real = sampler.sample(opts.seed, r as u64, channels);
        let a = amplitude_a1_direct(spec, &real, k, f, t, &opts.setup)?
            + amplitude_a2_direct(spec, &real, k, f, t, &opts.setup)?;
        Ok(a.norm_sqr())
    });
    let values = results.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(AmplitudeEstimate::from_samples(&values))
}

fn max_frequency(spec: &SystemSpec, k: f64) -> f64 {
    let e = spec.energies();
    let span = e.last().copied().unwrap_or(0.0) - e.first().copied().unwrap_or(0.0);
    span / spec.constants.hbar + spec.photon_frequency(k)
}

/// Closed-form `E|A₁ + A₂|²` at finite `t` for the same polarization axis
/// and damping choice as the Monte-Carlo estimate.
pub fn predicted_pfi(
    spec: &SystemSpec,
    model: &NoiseModel,
    k: f64,
    f: usize,
    t: f64,
    setup: &AmplitudeSetup,
) -> Result<f64> {
    if f >= spec.len() {
        return Err(Error::IndexOutOfRange { index: f, len: spec.len() });
    }
    let r = spec.current_matrix(setup.direction)? * c(spec.alpha(k), 0.0);
    let i = spec.initial_state;
    let h = spec.constants.hbar;
    let omega_k = spec.photon_frequency(k);
    let mut parts = Vec::new();
    for ch in &spec.noise_couplings {
        let mut terms = Vec::new();
        for n in 0..spec.len() {
            let g = if setup.damped { spec.widths[n] } else { 0.0 };
            let dfn = (spec.levels[f].energy - spec.levels[n].energy) / h;
            let dni = (spec.levels[n].energy - spec.levels[i].energy) / h;
            let w1 = r[[f, n]] * ch.matrix[[n, i]];
            let w2 = ch.matrix[[f, n]] * r[[n, i]];
            if w1.norm() != 0.0 {
                terms.push(KernelTerm::noise_first(w1, dfn, dni, omega_k, g));
            }
            if w2.norm() != 0.0 {
                terms.push(KernelTerm::photon_first(w2, dfn, dni, omega_k, g));
            }
        }
        parts.push(covariance(&terms, &terms, t, model)?.re);
    }
    Ok(setup.gamma / (h * h) * pairwise_sum(&parts))
}

/// Analytic value against a Monte-Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub analytic: f64,
    pub mc_mean: f64,
    pub stderr: f64,
    /// `(mc_mean − analytic)/stderr`.
    pub z_score: f64,
}

impl Comparison {
    pub fn new(analytic: f64, est: &AmplitudeEstimate) -> Self {
        let z = if est.stderr > 0.0 { (est.mean - analytic) / est.stderr } else { f64::INFINITY };
        Self { analytic, mc_mean: est.mean, stderr: est.stderr, z_score: z }
    }

    pub fn within(&self, sigmas: f64) -> bool {
        self.z_score.abs() <= sigmas
    }
}

/// Autocovariance at one lag: time average within each realization, mean
/// and standard error across realizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagEstimate {
    pub lag: f64,
    pub value: AmplitudeEstimate,
}

pub fn empirical_autocovariance(reals: &[NoiseRealization], channel: usize, lags: &[usize]) -> Vec<LagEstimate> {
    let dt = reals.first().map_or(0.0, |r| r.dt);
    lags.iter()
        .map(|&lag| {
            let per: Vec<f64> = reals
                .iter()
                .map(|r| {
                    let w = &r.samples[channel];
                    let prods: Vec<f64> = w.iter().zip(&w[lag.min(w.len())..]).map(|(a, b)| a * b).collect();
                    pairwise_sum(&prods) / prods.len().max(1) as f64
                })
                .collect();
            LagEstimate { lag: lag as f64 * dt, value: AmplitudeEstimate::from_samples(&per) }
        })
        .collect()
}
