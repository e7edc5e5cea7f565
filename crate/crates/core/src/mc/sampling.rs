// SPDX-License-Identifier: Apache-2.0

//! Stationary Gaussian trajectories by circulant embedding.

use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// Eigenvalues above `-NEG_TOL · max` are treated as rounding and clipped.
const NEG_TOL: f64 = 1e-10;
const MAX_EMBEDDING: usize = 1 << 24;

/// One sampled trajectory per channel on `t_k = k·dt`, `k = 0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRealization {
    pub dt: f64,
    pub samples: Vec<Vec<f64>>,
    pub seed: u64,
    pub stream: u64,
    pub target: NoiseModel,
}

impl NoiseRealization {
    pub fn len(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Last time covered by the grid.
    pub fn duration(&self) -> f64 {
        self.len().saturating_sub(1) as f64 * self.dt
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.samples.iter_mut().flatten().for_each(|w| *w *= c);
        self
    }
}

/// Precomputed square-root spectrum of the embedded covariance, reusable
/// for any number of realizations.
pub struct NoiseSampler {
    model: NoiseModel,
    dt: f64,
    len: usize,
    white_sd: f64,
    sqrt_eig: Vec<f64>,
    fft: Option<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for NoiseSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NoiseSampler")
            .field("model", &self.model)
            .field("dt", &self.dt)
            .field("len", &self.len)
            .field("embedding", &self.sqrt_eig.len())
            .finish()
    }
}

impl NoiseSampler {
    pub fn new(model: &NoiseModel, t_total: f64, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0 && t_total.is_finite() && t_total >= 0.0) {
            return Err(Error::InvalidParams(format!("need dt > 0 and t_total ≥ 0, got {dt}, {t_total}")));
        }
        if let Some(tc) = model.correlation_time() {
            if dt > tc / 20.0 {
                return Err(Error::InvalidParams(format!("dt = {dt} does not resolve the correlation time {tc}")));
            }
        }
        let white = model.white_weight();
        if white < 0.0 {
            return Err(Error::InadmissibleNoise { omega: 0.0, value: white });
        }
        let len = (t_total / dt).round() as usize + 1;
        let mut sampler =
            Self { model: model.clone(), dt, len, white_sd: (white / dt).sqrt(), sqrt_eig: Vec::new(), fft: None };
        if !model.smooth_components().is_empty() {
            sampler.embed()?;
        }
        Ok(sampler)
    }

    fn embed(&mut self) -> Result<()> {
        let mut m = (2 * (self.len.max(2) - 1)).next_power_of_two();
        let mut planner = FftPlanner::new();
        loop {
            let half = m / 2;
            let mut buf: Vec<Complex64> = (0..m)
                .map(|j| {
                    let lag = if j <= half { j } else { m - j };
                    Complex64::new(self.model.smooth_correlation(lag as f64 * self.dt), 0.0)
                })
                .collect();
            let fft = planner.plan_fft_forward(m);
            fft.process(&mut buf);
            let max = buf.iter().map(|z| z.re).fold(0.0, f64::max);
            let (kmin, min) = buf
                .iter()
                .enumerate()
                .map(|(k, z)| (k, z.re))
                .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
            if min >= -NEG_TOL * max {
                self.sqrt_eig = buf.iter().map(|z| (z.re.max(0.0) / m as f64).sqrt()).collect();
                self.fft = Some(fft);
                return Ok(());
            }
            // once the embedding covers the whole correlation, padding cannot help
            let covered = half as f64 * self.dt >= self.model.smooth_cutoff();
            if covered || 2 * m > MAX_EMBEDDING {
                let k = if kmin <= half { kmin as f64 } else { kmin as f64 - m as f64 };
                return Err(Error::InadmissibleNoise { omega: 2.0 * PI * k / (m as f64 * self.dt), value: min * self.dt });
            }
            m *= 2;
        }
    }

    /// Grid points per trajectory.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Size of the circulant embedding (zero for pure white noise).
    pub fn embedding(&self) -> usize {
        self.sqrt_eig.len()
    }

    /// Realization `stream` of the sequence seeded by `seed`; channels are
    /// independent.
    pub fn sample(&self, seed: u64, stream: u64, channels: usize) -> NoiseRealization {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut samples = Vec::with_capacity(channels);
        for _ in 0..channels {
            let mut w = vec![0.0; self.len];
            if let Some(fft) = &self.fft {
                let mut buf: Vec<Complex64> = self
                    .sqrt_eig
                    .iter()
                    .map(|s| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        Complex64::new(re, im) * s
                    })
                    .collect();
                fft.process(&mut buf);
                w.iter_mut().zip(&buf).for_each(|(x, z)| *x = z.re);
            }
            if self.white_sd > 0.0 {
                for x in w.iter_mut() {
                    let z: f64 = rng.sample(StandardNormal);
                    *x += self.white_sd * z;
                }
            }
            samples.push(w);
        }
        NoiseRealization { dt: self.dt, samples, seed, stream, target: self.model.clone() }
    }
}

/// One single-channel trajectory of length `t_total`.
pub fn sample_noise(model: &NoiseModel, t_total: f64, dt: f64, seed: u64) -> Result<NoiseRealization> {
    Ok(NoiseSampler::new(model, t_total, dt)?.sample(seed, 0, 1))
}
