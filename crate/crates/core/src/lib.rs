// SPDX-License-Identifier: Apache-2.0

//! Photon emission spectra of bounded quantum systems coupled to classical
//! Gaussian noise, with the intermediate-state propagators damped by their
//! radiative widths.

pub mod cli;
pub mod error;
pub mod kernels;
pub mod linewidth;
pub mod mc;
pub mod noise;
pub mod numeric;
pub mod parallel;
pub mod quadrature;
pub mod rate;
pub mod system;
pub mod units;

pub use error::{Error, Result};
