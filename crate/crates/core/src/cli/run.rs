// SPDX-License-Identifier: Apache-2.0

use super::config::{Builtin, Command, NoiseKindConfig, RunConfig, SystemSource, Widths};
use super::output::{num, svg_polyline, Table};
use crate::error::{Error, Result};
use crate::linewidth::fill_widths;
use crate::mc::{estimate_pfi, predicted_pfi, AmplitudeSetup, Comparison, EstimateOptions};
use crate::noise::NoiseModel;
use crate::parallel::Execution;
use crate::rate::{spectrum, EmissionSpectrum, Mode, RateRequest};
use crate::system::{builtin_harmonic_oscillator, harmonic_oscillator_3d, load_system, two_level_system, CouplingConstants, SystemSpec};
use crate::units::Constants;
use std::fmt::Write as _;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

/// Everything a run produces; nothing touches the filesystem until
/// [`Outcome::write`].
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Outcome {
    pub status: i32,
    pub files: Vec<(PathBuf, String)>,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn failed(status: i32, e: &Error) -> Self {
        Self { status, stderr: format!("error: {e}\n"), ..Default::default() }
    }

    pub fn write(&self) -> std::io::Result<()> {
        for (path, body) in &self.files {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(path, body)?;
        }
        Ok(())
    }
}

/// Inputs resolved from the configuration. Failures here count as
/// validation errors.
struct Prepared {
    spec: Option<SystemSpec>,
    noise: NoiseModel,
    coupling: CouplingConstants,
    execution: Execution,
}

pub fn build_system(cfg: &RunConfig) -> Result<SystemSpec> {
    let s = cfg.system.as_ref().ok_or_else(|| Error::InvalidParams("no [system] section".into()))?;
    let constants = Constants::for_units(cfg.units);
    let mut spec = match &s.source {
        SystemSource::File(p) => load_system(p)?,
        SystemSource::Builtin(Builtin::Oscillator) => {
            builtin_harmonic_oscillator(s.omega0, s.mass, s.charge, s.levels, constants)?
        }
        SystemSource::Builtin(Builtin::Oscillator3d) => {
            harmonic_oscillator_3d(s.omega0, s.mass, s.charge, s.levels, constants)?
        }
        SystemSource::Builtin(Builtin::TwoLevel) => {
            two_level_system(s.gap * constants.hbar, s.noise_element, s.momentum_element, [0.0, 0.0], constants)?
        }
    };
    if let Some(i) = s.initial {
        if i >= spec.len() {
            return Err(Error::IndexOutOfRange { index: i, len: spec.len() });
        }
        spec.initial_state = i;
    }
    match &s.widths {
        Widths::File => {}
        Widths::Radiative => fill_widths(&mut spec)?,
        Widths::Explicit(w) => {
            if w.len() != spec.len() {
                return Err(Error::InvalidParams(format!("{} widths given for {} levels", w.len(), spec.len())));
            }
            spec.widths = w.clone();
        }
    }
    spec.validate()?;
    Ok(spec)
}

pub fn build_noise(cfg: &RunConfig) -> Result<NoiseModel> {
    let n = &cfg.noise;
    let base = match n.kind {
        NoiseKindConfig::White => NoiseModel::white(),
        NoiseKindConfig::Exponential => NoiseModel::exponential(n.tau)?,
        NoiseKindConfig::Gaussian => NoiseModel::gaussian(n.tau)?,
        NoiseKindConfig::Tabulated => {
            let p = n.path.as_ref().ok_or_else(|| Error::InvalidNoise("tabulated noise needs a path".into()))?;
            NoiseModel::load_tabulated(p)?
        }
    }
    .scaled(n.scale);
    if n.spike_amplitude > 0.0 {
        let spike = NoiseModel::gaussian(n.spike_tau)?.scaled(n.spike_amplitude);
        Ok(NoiseModel::sum(vec![base, spike]))
    } else {
        Ok(base)
    }
}

impl Prepared {
    fn spec(&self) -> Result<&SystemSpec> {
        self.spec.as_ref().ok_or_else(|| Error::InvalidParams("no [system] section".into()))
    }
}

fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    Ok(Prepared {
        spec: cfg.system.as_ref().map(|_| build_system(cfg)).transpose()?,
        noise: build_noise(cfg)?,
        coupling: CouplingConstants::new(cfg.gamma)?,
        execution: Execution::from_threads(cfg.threads),
    })
}

/// Runs the configured command. Returned files are written by the caller
/// only when the status is not a validation failure.
pub fn run(cfg: &RunConfig) -> Outcome {
    let prep = match prepare(cfg) {
        Ok(p) => p,
        Err(e) => return Outcome::failed(EXIT_INVALID, &e),
    };
    let result = match cfg.command {
        Command::Spectrum => run_spectrum(cfg, &prep),
        Command::Compare => run_compare(cfg, &prep),
        Command::Linewidth => run_linewidth(cfg, &prep),
        Command::Oracle => run_oracle(cfg, &prep),
        Command::ValidateNoise => run_validate(cfg, &prep),
    };
    result.unwrap_or_else(|e| Outcome::failed(EXIT_RUNTIME, &e))
}

fn request(cfg: &RunConfig, prep: &Prepared, mode: Mode) -> Result<RateRequest> {
    let grid = cfg.grid.ok_or_else(|| Error::InvalidParams("no k grid configured".into()))?;
    let mut req = RateRequest::new(prep.spec()?.clone(), prep.coupling, prep.noise.clone(), grid.values()).with_mode(mode);
    req.final_states = cfg.rate.final_states.clone();
    req.window = cfg.rate.window;
    req.t_eval = cfg.rate.t_eval;
    req.angular = cfg.rate.angular;
    req.units = cfg.units;
    req.execution = prep.execution;
    Ok(req)
}

fn warn(out: &mut Outcome, s: &EmissionSpectrum) {
    for w in &s.warnings {
        let _ = writeln!(out.stderr, "warning: {w}");
    }
}

fn header(cfg: &RunConfig, mode: &str) -> String {
    format!("mode={mode}, units={}, jacobian=k^2", cfg.units.name())
}

fn run_spectrum(cfg: &RunConfig, prep: &Prepared) -> Result<Outcome> {
    let s = spectrum(&request(cfg, prep, cfg.rate.mode)?)?;
    let mut out = Outcome::default();
    warn(&mut out, &s);
    let mut t = Table::new(vec!["k", "dGamma_dk"]).comment(header(cfg, s.mode.name()));
    for p in &s.points {
        t.push(vec![num(p.k), num(p.dgamma_dk)]);
    }
    out.files.push((cfg.output_path(".csv"), t.to_csv()));
    if cfg.plot.svg {
        let pts: Vec<(f64, f64)> = s.points.iter().map(|p| (p.k, p.dgamma_dk)).collect();
        let log_y = cfg.plot.log_y && pts.iter().all(|p| p.1 > 0.0);
        if cfg.plot.log_y && !log_y {
            out.stderr.push_str("warning: non-positive rates, plotting on a linear axis\n");
        }
        out.files.push((cfg.output_path(".svg"), svg_polyline(&pts, log_y, "k", "dGamma/dk")));
    }
    let _ = writeln!(out.stdout, "{} points written to {}", s.points.len(), cfg.output_path(".csv").display());
    Ok(out)
}

fn run_compare(cfg: &RunConfig, prep: &Prepared) -> Result<Outcome> {
    let reg = spectrum(&request(cfg, prep, Mode::Regularized)?)?;
    let naive = spectrum(&request(cfg, prep, Mode::Naive)?)?;
    let mut out = Outcome::default();
    warn(&mut out, &reg);
    let mut t = Table::new(vec!["k", "regularized", "naive", "difference"]).comment(header(cfg, "compare"));
    for (r, n) in reg.points.iter().zip(&naive.points) {
        t.push(vec![num(r.k), num(r.dgamma_dk), num(n.dgamma_dk), num(n.dgamma_dk - r.dgamma_dk)]);
    }
    out.files.push((cfg.output_path(".csv"), t.to_csv()));
    let _ = writeln!(out.stdout, "{} points written to {}", reg.points.len(), cfg.output_path(".csv").display());
    Ok(out)
}

fn run_linewidth(cfg: &RunConfig, prep: &Prepared) -> Result<Outcome> {
    let spec = prep.spec()?;
    let mut out = Outcome::default();
    let mut t = Table::new(vec!["level", "label", "energy", "width"]).comment(format!("units={}", cfg.units.name()));
    let _ = writeln!(out.stdout, "{:>5}  {:<12} {:>24} {:>24}", "level", "label", "energy", "width");
    for (n, (l, w)) in spec.levels.iter().zip(&spec.widths).enumerate() {
        let _ = writeln!(out.stdout, "{n:>5}  {:<12} {:>24e} {:>24e}", l.label, l.energy, w);
        t.push(vec![n.to_string(), l.label.clone(), num(l.energy), num(*w)]);
    }
    out.files.push((cfg.output_path(".csv"), t.to_csv()));
    Ok(out)
}

fn run_oracle(cfg: &RunConfig, prep: &Prepared) -> Result<Outcome> {
    let o = cfg.oracle.as_ref().ok_or_else(|| Error::InvalidParams("no [oracle] section".into()))?;
    let setup = AmplitudeSetup::new(o.direction, o.damped, prep.coupling.gamma);
    let opts = EstimateOptions { dt: o.dt, n_samples: o.samples, seed: cfg.seed, setup, execution: prep.execution };
    let mut t = Table::new(vec!["k", "f", "t", "analytic", "mc_mean", "stderr", "z_score"])
        .comment(format!("seed={}, samples={}, dt={:e}, damped={}", cfg.seed, o.samples, o.dt, o.damped));
    let mut out = Outcome::default();
    for &k in &o.k {
        let analytic = predicted_pfi(prep.spec()?, &prep.noise, k, o.final_state, o.t, &setup)?;
        let est = estimate_pfi(prep.spec()?, &prep.noise, k, o.final_state, o.t, &opts)?;
        let cmp = Comparison::new(analytic, &est);
        t.push(vec![
            num(k),
            o.final_state.to_string(),
            num(o.t),
            num(cmp.analytic),
            num(cmp.mc_mean),
            num(cmp.stderr),
            num(cmp.z_score),
        ]);
        let _ = writeln!(out.stdout, "k = {k:e}: z = {:.3}", cmp.z_score);
    }
    out.files.push((cfg.output_path(".csv"), t.to_csv()));
    Ok(out)
}

fn run_validate(cfg: &RunConfig, prep: &Prepared) -> Result<Outcome> {
    let v = cfg.validate;
    let grid: Vec<f64> = (0..v.points)
        .map(|j| v.omega_min + (v.omega_max - v.omega_min) * j as f64 / (v.points - 1) as f64)
        .collect();
    let report = prep.noise.validate_admissible(&grid);
    let mut t = Table::new(vec!["omega", "spectral_density"]).comment(prep.noise.describe());
    for &w in &grid {
        let value = prep.noise.spectral_density(w).map(num).unwrap_or_else(|_| "nan".into());
        t.push(vec![num(w), value]);
    }
    let mut out = Outcome::default();
    out.files.push((cfg.output_path(".csv"), t.to_csv()));
    if report.admissible() {
        let _ = writeln!(out.stdout, "admissible: minimum {:e} over {} frequencies", report.min_value, grid.len());
    } else {
        out.status = EXIT_INVALID;
        for s in &report.negative {
            let _ = writeln!(out.stderr, "negative spectral density {:e} at omega = {:e}", s.value, s.omega);
        }
        for (w, e) in &report.failed {
            let _ = writeln!(out.stderr, "spectral density failed at omega = {w:e}: {e}");
        }
    }
    Ok(out)
}
