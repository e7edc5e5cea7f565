// SPDX-License-Identifier: Apache-2.0

//! Emission spectra `dΓ/dk`.
//!
//! For each final state `f`, channel `ℓ` and axis `j` the regularized rate
//! collects `S_j = Σ_n [⟨f|R^j|n⟩⟨n|N_ℓ|i⟩ a_n − ⟨f|N_ℓ|n⟩⟨n|R^j|i⟩ b_n]` and
//! reports `k² (γ/ħ²) Σ_f f̃(Δ_fi + ω_k) Σ_ℓ Σ_jj' M_jj' S_j S_j'*`, where
//! `M` is the angular matrix. The naive mode replaces the large-time limit by
//! a window difference of the finite-time second moment with all widths zero.

mod angular;

pub use angular::{angular_matrix, angular_polarization_factor, polarization_vectors, AngularMethod};

use crate::error::{Error, Result};
use crate::kernels::finite_time::{windowed_rate, KernelTerm};
use crate::kernels::{a_coef, b_coef};
use crate::noise::NoiseModel;
use crate::numeric::pairwise_sum;
use crate::parallel::{par_map, Execution};
use crate::system::{CouplingConstants, SystemSpec};
use crate::units::UnitSystem;
use ndarray::Array2;
use num_complex::Complex64;

/// Edge-level share of a rate above which a truncation warning is raised.
const EDGE_SHARE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Regularized,
    Naive,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Regularized => "regularized",
            Mode::Naive => "naive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum FinalStates {
    #[default]
    All,
    List(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// The initial state is not the lowest level.
    NonGroundInitial { initial: usize, ground: usize },
    /// Intermediate levels flagged `edge` carry more than 1% of the rate.
    EdgeTruncation { k: f64, share: f64 },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::NonGroundInitial { initial, ground } => {
                write!(f, "initial state {initial} is not the ground state {ground}")
            }
            Warning::EdgeTruncation { k, share } => {
                write!(f, "edge levels carry {:.2}% of the rate at k = {k}", 100.0 * share)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRequest {
    pub spec: SystemSpec,
    pub coupling: CouplingConstants,
    pub noise: NoiseModel,
    pub k_grid: Vec<f64>,
    pub mode: Mode,
    pub final_states: FinalStates,
    /// Naive mode: window width `W` of the difference quotient.
    pub window: f64,
    /// Naive mode: centre time of the window.
    pub t_eval: f64,
    pub angular: AngularMethod,
    pub units: UnitSystem,
    pub execution: Execution,
}

impl RateRequest {
    pub fn new(spec: SystemSpec, coupling: CouplingConstants, noise: NoiseModel, k_grid: Vec<f64>) -> Self {
        Self {
            spec,
            coupling,
            noise,
            k_grid,
            mode: Mode::Regularized,
            final_states: FinalStates::All,
            window: 5.0,
            t_eval: 50.0,
            angular: AngularMethod::DipoleIdentity,
            units: UnitSystem::Reduced,
            execution: Execution::default(),
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        self.spec.validate()?;
        if !self.spec.has_radiation_data() {
            return Err(Error::MissingDipoleData);
        }
        if self.k_grid.is_empty() {
            return bad("k grid is empty".into());
        }
        if let Some(k) = self.k_grid.iter().find(|k| !(k.is_finite() && **k > 0.0)) {
            return bad(format!("k = {k} is not positive"));
        }
        if let FinalStates::List(fs) = &self.final_states {
            if let Some(&f) = fs.iter().find(|&&f| f >= self.spec.len()) {
                return Err(Error::IndexOutOfRange { index: f, len: self.spec.len() });
            }
        }
        if self.mode == Mode::Naive && !(self.window > 0.0 && self.window <= 2.0 * self.t_eval) {
            return bad(format!("window {} must lie in (0, 2 t_eval] with t_eval = {}", self.window, self.t_eval));
        }
        Ok(())
    }

    fn finals(&self) -> Vec<usize> {
        match &self.final_states {
            FinalStates::All => (0..self.spec.len()).collect(),
            FinalStates::List(v) => v.clone(),
        }
    }

    /// `γ/ħ²`.
    fn prefactor(&self) -> f64 {
        self.coupling.gamma / self.spec.constants.hbar.powi(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub k: f64,
    pub dgamma_dk: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmissionSpectrum {
    pub points: Vec<SpectrumPoint>,
    pub mode: Mode,
    pub warnings: Vec<Warning>,
    pub units: UnitSystem,
    /// Phase-space factor included in `dΓ/dk`.
    pub jacobian: &'static str,
    /// `c`, relating `dΓ/dω = (dΓ/dk)/c` at `ω = c k`.
    pub speed_of_light: f64,
}

impl EmissionSpectrum {
    /// `(ω, dΓ/dω)` pairs.
    pub fn per_frequency(&self) -> Vec<(f64, f64)> {
        let c = self.speed_of_light;
        self.points.iter().map(|p| (c * p.k, p.dgamma_dk / c)).collect()
    }
}

/// Bohr frequencies `Δ_ab` for every pair.
fn frequencies(spec: &SystemSpec) -> Array2<f64> {
    let e = spec.energies();
    let h = spec.constants.hbar;
    Array2::from_shape_fn((e.len(), e.len()), |(a, b)| (e[a] - e[b]) / h)
}

/// Resonant coefficients of one intermediate level, checked against the
/// width requirement of the regularized mode.
fn coefficients(spec: &SystemSpec, d: &Array2<f64>, f: usize, n: usize, omega_k: f64) -> (Result<Complex64>, Result<Complex64>) {
    let i = spec.initial_state;
    let g = spec.widths[n];
    let needs_width = g == 0.0 && n != spec.ground_index();
    if needs_width {
        return (Err(Error::ZeroWidth { level: n }), Err(Error::ZeroWidth { level: n }));
    }
    let a = a_coef(d[[f, n]], omega_k, g).map_err(|_| Error::ZeroWidth { level: n });
    let b = b_coef(d[[n, i]], omega_k, g).map_err(|_| Error::ZeroWidth { level: n });
    (a, b)
}

struct Context<'a> {
    spec: &'a SystemSpec,
    noise: &'a NoiseModel,
    d: Array2<f64>,
    r: [Array2<Complex64>; 3],
    omega_k: f64,
}

impl<'a> Context<'a> {
    fn new(spec: &'a SystemSpec, noise: &'a NoiseModel, k: f64) -> Result<Self> {
        Ok(Self { spec, noise, d: frequencies(spec), r: spec.radiation_matrices(k)?, omega_k: spec.photon_frequency(k) })
    }

    fn spectral(&self, f: usize) -> Result<f64> {
        self.noise.spectral_density(self.d[[f, self.spec.initial_state]] + self.omega_k)
    }

    /// Per-level terms `⟨f|R^j|n⟩⟨n|N_ℓ|i⟩ a_n` and `⟨f|N_ℓ|n⟩⟨n|R^j|i⟩ b_n`,
    /// restricted to `keep(n)`.
    fn pieces(&self, f: usize, l: usize, j: usize, keep: &dyn Fn(usize) -> bool) -> Result<Vec<(Complex64, Complex64)>> {
        let i = self.spec.initial_state;
        let nmat = &self.spec.noise_couplings[l].matrix;
        let mut out = Vec::with_capacity(self.spec.len());
        for n in (0..self.spec.len()).filter(|&n| keep(n)) {
            let w1 = self.r[j][[f, n]] * nmat[[n, i]];
            let w2 = nmat[[f, n]] * self.r[j][[n, i]];
            let (a, b) = coefficients(self.spec, &self.d, f, n, self.omega_k);
            let x = if w1.norm() == 0.0 { Complex64::default() } else { w1 * a? };
            let y = if w2.norm() == 0.0 { Complex64::default() } else { w2 * b? };
            out.push((x, y));
        }
        Ok(out)
    }

    /// `S_j` for every axis.
    fn amplitudes(&self, f: usize, l: usize, keep: &dyn Fn(usize) -> bool) -> Result<[Complex64; 3]> {
        let mut s = [Complex64::default(); 3];
        for (j, sj) in s.iter_mut().enumerate() {
            let v: Vec<Complex64> = self.pieces(f, l, j, keep)?.into_iter().map(|(x, y)| x - y).collect();
            *sj = pairwise_sum(&v);
        }
        Ok(s)
    }
}

fn contract(m: &[[f64; 3]; 3], s: &[Complex64; 3]) -> f64 {
    let mut terms = Vec::with_capacity(9);
    for j in 0..3 {
        for jp in 0..3 {
            if m[j][jp] != 0.0 {
                terms.push((s[j] * s[jp].conj()).re * m[j][jp]);
            }
        }
    }
    pairwise_sum(&terms)
}

/// Which cross product of the kernel pieces a rate term collects.
#[derive(Clone, Copy)]
enum Pairing {
    NoiseNoise,
    NoisePhoton,
    PhotonPhoton,
}

fn pair_sum(spec: &SystemSpec, noise: &NoiseModel, k: f64, f: usize, pairing: Pairing) -> Result<Complex64> {
    if f >= spec.len() {
        return Err(Error::IndexOutOfRange { index: f, len: spec.len() });
    }
    let ctx = Context::new(spec, noise, k)?;
    let ft = ctx.spectral(f)?;
    let mut terms = Vec::new();
    for l in 0..spec.noise_couplings.len() {
        for j in 0..3 {
            let p = ctx.pieces(f, l, j, &|_| true)?;
            for (xn, yn) in &p {
                for (xm, ym) in &p {
                    terms.push(match pairing {
                        Pairing::NoiseNoise => *xn * xm.conj(),
                        Pairing::NoisePhoton => -*xn * ym.conj(),
                        Pairing::PhotonPhoton => *yn * ym.conj(),
                    });
                }
            }
        }
    }
    Ok(pairwise_sum(&terms) * ft)
}

/// Both amplitudes with the noise vertex first, summed over `n`, `m`, `ℓ`
/// and the axis `j` (polarization contraction `δ_jj'`).
pub fn rate_r11(spec: &SystemSpec, noise: &NoiseModel, k: f64, f: usize) -> Result<Complex64> {
    pair_sum(spec, noise, k, f, Pairing::NoiseNoise)
}

/// Cross term between the noise-first and photon-first amplitudes.
pub fn rate_r12(spec: &SystemSpec, noise: &NoiseModel, k: f64, f: usize) -> Result<Complex64> {
    pair_sum(spec, noise, k, f, Pairing::NoisePhoton)
}

/// Both amplitudes with the photon emitted first.
pub fn rate_r22(spec: &SystemSpec, noise: &NoiseModel, k: f64, f: usize) -> Result<Complex64> {
    pair_sum(spec, noise, k, f, Pairing::PhotonPhoton)
}

/// `f̃ Σ_ℓ Σ_j |S_j|²` for one final state, the modulus form of
/// `R11 + 2 Re R12 + R22`.
pub fn modulus_form(spec: &SystemSpec, noise: &NoiseModel, k: f64, f: usize) -> Result<f64> {
    if f >= spec.len() {
        return Err(Error::IndexOutOfRange { index: f, len: spec.len() });
    }
    let ctx = Context::new(spec, noise, k)?;
    let m = angular_matrix(AngularMethod::DipoleIdentity);
    let unit = m[0][0];
    let mut terms = Vec::new();
    for l in 0..spec.noise_couplings.len() {
        terms.push(contract(&m, &ctx.amplitudes(f, l, &|_| true)?) / unit);
    }
    Ok(pairwise_sum(&terms) * ctx.spectral(f)?)
}

fn regularized(req: &RateRequest, k: f64) -> Result<(f64, f64)> {
    let spec = &req.spec;
    let ctx = Context::new(spec, &req.noise, k)?;
    let m = angular_matrix(req.angular);
    let has_edge = spec.levels.iter().any(|l| l.edge);
    let mut full = Vec::new();
    let mut inner = Vec::new();
    for f in req.finals() {
        let ft = ctx.spectral(f)?;
        for l in 0..spec.noise_couplings.len() {
            full.push(ft * contract(&m, &ctx.amplitudes(f, l, &|_| true)?));
            if has_edge {
                inner.push(ft * contract(&m, &ctx.amplitudes(f, l, &|n| !spec.levels[n].edge)?));
            }
        }
    }
    let total = pairwise_sum(&full);
    let share = if has_edge && total != 0.0 { ((total - pairwise_sum(&inner)) / total).abs() } else { 0.0 };
    Ok((k * k * req.prefactor() * total, share))
}

fn naive(req: &RateRequest, k: f64) -> Result<(f64, f64)> {
    let spec = &req.spec;
    let ctx = Context::new(spec, &req.noise, k)?;
    let m = angular_matrix(req.angular);
    let i = spec.initial_state;
    let d = &ctx.d;
    let has_edge = spec.levels.iter().any(|l| l.edge);
    let build = |f: usize, l: usize, j: usize, keep: &dyn Fn(usize) -> bool| -> Vec<KernelTerm> {
        let nmat = &spec.noise_couplings[l].matrix;
        let mut out = Vec::new();
        for n in (0..spec.len()).filter(|&n| keep(n)) {
            let w1 = ctx.r[j][[f, n]] * nmat[[n, i]];
            let w2 = nmat[[f, n]] * ctx.r[j][[n, i]];
            if w1.norm() != 0.0 {
                out.push(KernelTerm::noise_first(w1, d[[f, n]], d[[n, i]], ctx.omega_k, 0.0));
            }
            if w2.norm() != 0.0 {
                out.push(KernelTerm::photon_first(w2, d[[f, n]], d[[n, i]], ctx.omega_k, 0.0));
            }
        }
        out
    };
    let total = |keep: &dyn Fn(usize) -> bool| -> Result<f64> {
        let mut terms = Vec::new();
        for f in req.finals() {
            for l in 0..spec.noise_couplings.len() {
                let xs: Vec<Vec<KernelTerm>> = (0..3).map(|j| build(f, l, j, keep)).collect();
                for j in 0..3 {
                    for jp in 0..3 {
                        if m[j][jp] == 0.0 || xs[j].is_empty() || xs[jp].is_empty() {
                            continue;
                        }
                        let y = if j == jp { &xs[j] } else { &xs[jp] };
                        let v = windowed_rate(&xs[j], y, req.t_eval, req.window, &req.noise)?;
                        terms.push(m[j][jp] * v.re);
                    }
                }
            }
        }
        Ok(pairwise_sum(&terms))
    };
    let full = total(&|_| true)?;
    let share = if has_edge && full != 0.0 {
        ((full - total(&|n| !spec.levels[n].edge)?) / full).abs()
    } else {
        0.0
    };
    Ok((k * k * req.prefactor() * full, share))
}

fn rate_with_share(req: &RateRequest, k: f64) -> Result<(f64, f64)> {
    match req.mode {
        Mode::Regularized => regularized(req, k),
        Mode::Naive => naive(req, k),
    }
}

/// `dΓ/dk` at one wavenumber.
pub fn emission_rate_at_k(req: &RateRequest, k: f64) -> Result<f64> {
    req.validate()?;
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidParams(format!("k = {k} is not positive")));
    }
    Ok(rate_with_share(req, k)?.0)
}

/// Evaluates the request on its whole grid.
pub fn spectrum(req: &RateRequest) -> Result<EmissionSpectrum> {
    req.validate()?;
    let results = par_map(req.execution, &req.k_grid, |&k| rate_with_share(req, k));
    let mut points = Vec::with_capacity(results.len());
    let mut warnings = Vec::new();
    let ground = req.spec.ground_index();
    let i = req.spec.initial_state;
    if req.spec.levels[i].energy > req.spec.levels[ground].energy {
        warnings.push(Warning::NonGroundInitial { initial: i, ground });
    }
    let mut failures = Vec::new();
    for (index, (k, r)) in req.k_grid.iter().zip(results).enumerate() {
        match r {
            Ok((v, share)) => {
                if share > EDGE_SHARE {
                    warnings.push(Warning::EdgeTruncation { k: *k, share });
                }
                points.push(SpectrumPoint { k: *k, dgamma_dk: v });
            }
            Err(e) => failures.push(Error::AtGridPoint { index, k: *k, source: Box::new(e) }),
        }
    }
    match failures.len() {
        0 => {}
        1 => return Err(failures.remove(0)),
        _ => return Err(Error::GridFailures(failures)),
    }
    Ok(EmissionSpectrum {
        points,
        mode: req.mode,
        warnings,
        units: req.units,
        jacobian: "k^2",
        speed_of_light: req.spec.constants.c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::builtin_harmonic_oscillator;
    use crate::units::Constants;

    fn oscillator() -> SystemSpec {
        let mut s = builtin_harmonic_oscillator(1.0, 1.0, 1.0, 4, Constants::reduced()).unwrap();
        s.widths = vec![0.0, 0.1, 0.2, 0.3];
        s
    }

    fn request(mode: Mode) -> RateRequest {
        RateRequest::new(oscillator(), CouplingConstants::new(0.5).unwrap(), NoiseModel::white(), vec![0.3, 1.2, 2.5])
            .with_mode(mode)
    }

    #[test]
    fn assembly_matches_modulus_form() {
        let s = oscillator();
        let n = NoiseModel::exponential(0.4).unwrap();
        for f in 0..s.len() {
            let sum = rate_r11(&s, &n, 0.9, f).unwrap() + 2.0 * rate_r12(&s, &n, 0.9, f).unwrap().re + rate_r22(&s, &n, 0.9, f).unwrap();
            let m = modulus_form(&s, &n, 0.9, f).unwrap();
            assert!((sum.re - m).abs() <= 1e-12 * m.abs().max(1e-300));
            assert!(sum.im.abs() <= 1e-12 * m.abs().max(1e-300));
        }
    }

    #[test]
    fn zero_width_is_reported() {
        let mut req = request(Mode::Regularized);
        req.spec.widths[1] = 0.0;
        assert!(matches!(emission_rate_at_k(&req, 1.0), Err(Error::ZeroWidth { level: 1 })));
    }

    #[test]
    fn reversed_grid_reorders() {
        let req = request(Mode::Regularized);
        let a = spectrum(&req).unwrap();
        let mut rev = req.clone();
        rev.k_grid.reverse();
        let b = spectrum(&rev).unwrap();
        for (p, q) in a.points.iter().zip(b.points.iter().rev()) {
            assert_eq!(p, q);
        }
        assert!(a.points.iter().all(|p| p.dgamma_dk >= 0.0));
    }

    #[test]
    fn rate_is_linear_in_gamma() {
        let req = request(Mode::Regularized);
        let mut twice = req.clone();
        twice.coupling.gamma *= 2.0;
        let (a, b) = (emission_rate_at_k(&req, 1.2).unwrap(), emission_rate_at_k(&twice, 1.2).unwrap());
        assert!((b - 2.0 * a).abs() < 1e-14 * b);
    }

    #[test]
    fn naive_runs_on_oscillator() {
        let mut req = request(Mode::Naive);
        req.t_eval = 20.0;
        req.window = 2.0;
        let v = emission_rate_at_k(&req, 1.2).unwrap();
        assert!(v.is_finite());
    }
}
