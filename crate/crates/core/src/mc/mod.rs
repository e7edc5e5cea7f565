// SPDX-License-Identifier: Apache-2.0

//! Monte-Carlo check of the closed forms: Gaussian noise trajectories, direct
//! time quadrature of the amplitudes and ensemble averages.

mod amplitude;
mod estimate;
mod sampling;

pub use amplitude::{amplitude_a1_direct, amplitude_a2_direct, amplitude_b, AmplitudeSetup};
pub use estimate::{
    empirical_autocovariance, estimate_pfi, predicted_pfi, AmplitudeEstimate, Comparison, EstimateOptions,
    LagEstimate, MIN_SAMPLES,
};
pub use sampling::{sample_noise, NoiseRealization, NoiseSampler};
