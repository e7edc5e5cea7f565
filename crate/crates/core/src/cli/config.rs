// SPDX-License-Identifier: Apache-2.0

//! Sectioned `key = value` run configuration. See `docs/config_format.md`.

use crate::error::{Error, Result};
use crate::rate::{AngularMethod, FinalStates, Mode};
use crate::units::UnitSystem;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Compare,
    Linewidth,
    Oracle,
    ValidateNoise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Oscillator,
    Oscillator3d,
    TwoLevel,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SystemSource {
    Builtin(Builtin),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Widths {
    Radiative,
    /// Keep whatever the system file (or builtin) carries.
    File,
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub source: SystemSource,
    pub omega0: f64,
    pub mass: f64,
    pub charge: f64,
    /// Levels of the 1-D oscillator, or quanta per axis of the 3-D one.
    pub levels: usize,
    pub gap: f64,
    pub noise_element: f64,
    pub momentum_element: f64,
    pub widths: Widths,
    pub initial: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKindConfig {
    White,
    Exponential,
    Gaussian,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseConfig {
    pub kind: NoiseKindConfig,
    pub tau: f64,
    pub scale: f64,
    pub path: Option<PathBuf>,
    /// Gaussian-correlated component with spectrum `A·exp(−ω²τ_s²/2)`,
    /// added on top of the base model.
    pub spike_amplitude: f64,
    pub spike_tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub k_min: f64,
    pub k_max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl GridConfig {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        if n == 1 {
            return vec![self.k_min];
        }
        (0..n)
            .map(|j| {
                let u = j as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.k_min + (self.k_max - self.k_min) * u,
                    Spacing::Log => (self.k_min.ln() + (self.k_max.ln() - self.k_min.ln()) * u).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateConfig {
    pub mode: Mode,
    pub final_states: FinalStates,
    pub window: f64,
    pub t_eval: f64,
    pub angular: AngularMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlotConfig {
    pub svg: bool,
    pub log_y: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    pub k: Vec<f64>,
    pub final_state: usize,
    pub t: f64,
    pub dt: f64,
    pub samples: usize,
    pub direction: usize,
    pub damped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateConfig {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    /// Prefix of every output file.
    pub output: PathBuf,
    pub units: UnitSystem,
    pub threads: Option<usize>,
    /// Absent only for `validate-noise`.
    pub system: Option<SystemConfig>,
    pub gamma: f64,
    pub noise: NoiseConfig,
    pub grid: Option<GridConfig>,
    pub rate: RateConfig,
    pub plot: PlotConfig,
    pub oracle: Option<OracleConfig>,
    pub validate: ValidateConfig,
}

struct Entry {
    line: usize,
    value: String,
}

/// Raw entries keyed by `(section, key)`; every lookup consumes its entry so
/// that leftovers can be reported as unknown keys.
struct Doc {
    entries: BTreeMap<(String, String), Entry>,
    sections: BTreeMap<String, usize>,
    base: PathBuf,
}

fn cerr(line: usize, key: &str, message: impl Into<String>) -> Error {
    Error::Config { line, key: key.to_string(), message: message.into() }
}

const SECTIONS: [&str; 9] = ["", "system", "coupling", "noise", "grid", "rate", "plot", "oracle", "validate"];

impl Doc {
    fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut sections = BTreeMap::new();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| cerr(line, rest, "unterminated section header"))?
                    .trim()
                    .to_string();
                if !SECTIONS.contains(&name.as_str()) {
                    return Err(cerr(line, &name, "unknown section"));
                }
                if sections.insert(name.clone(), line).is_some() {
                    return Err(cerr(line, &name, "duplicate section"));
                }
                section = name;
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| cerr(line, content, "expected `key = value`"))?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(cerr(line, "", "empty key"));
            }
            let full = qualified(&section, &key);
            if entries.insert((section.clone(), key), Entry { line, value: value.trim().to_string() }).is_some() {
                return Err(cerr(line, &full, "duplicate key"));
            }
        }
        Ok(Self { entries, sections, base: base.to_path_buf() })
    }

    fn take(&mut self, section: &str, key: &str) -> Option<(usize, String, String)> {
        self.entries
            .remove(&(section.to_string(), key.to_string()))
            .map(|e| (e.line, qualified(section, key), e.value))
    }

    fn line_of(&self, section: &str) -> usize {
        self.sections.get(section).copied().unwrap_or(0)
    }

    fn parsed<T>(&mut self, section: &str, key: &str, f: impl Fn(&str) -> Option<T>, what: &str) -> Result<Option<(usize, T)>> {
        match self.take(section, key) {
            None => Ok(None),
            Some((line, name, v)) => match f(&v) {
                Some(x) => Ok(Some((line, x))),
                None => Err(cerr(line, &name, format!("`{v}` is not {what}"))),
            },
        }
    }

    fn f64(&mut self, section: &str, key: &str) -> Result<Option<(usize, f64)>> {
        self.parsed(section, key, |v| v.parse::<f64>().ok().filter(|x| x.is_finite()), "a finite number")
    }

    fn usize(&mut self, section: &str, key: &str) -> Result<Option<(usize, usize)>> {
        self.parsed(section, key, |v| v.parse::<usize>().ok(), "a non-negative integer")
    }

    fn bool(&mut self, section: &str, key: &str) -> Result<Option<(usize, bool)>> {
        self.parsed(
            section,
            key,
            |v| match v {
                "true" | "yes" | "on" | "1" => Some(true),
                "false" | "no" | "off" | "0" => Some(false),
                _ => None,
            },
            "a boolean",
        )
    }

    fn list(&mut self, section: &str, key: &str) -> Result<Option<(usize, Vec<f64>)>> {
        self.parsed(
            section,
            key,
            |v| v.split(',').map(|x| x.trim().parse::<f64>().ok().filter(|x| x.is_finite())).collect(),
            "a comma-separated list of numbers",
        )
    }

    fn path(&mut self, section: &str, key: &str) -> Option<(usize, PathBuf)> {
        self.take(section, key).map(|(line, _, v)| {
            let p = PathBuf::from(v);
            (line, if p.is_absolute() { p } else { self.base.join(p) })
        })
    }

    fn finish(self) -> Result<()> {
        match self.entries.into_iter().next() {
            None => Ok(()),
            Some(((section, key), e)) => Err(cerr(e.line, &qualified(&section, &key), "unknown key")),
        }
    }
}

fn qualified(section: &str, key: &str) -> String {
    if section.is_empty() {
        key.to_string()
    } else {
        format!("{section}.{key}")
    }
}

fn require_positive(line: usize, key: &str, v: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(cerr(line, key, format!("must be positive, got {v}")))
    }
}

fn or_default<T>(v: Option<(usize, T)>, d: T) -> T {
    v.map_or(d, |x| x.1)
}

impl RunConfig {
    /// Parses configuration text; relative paths are resolved against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut doc = Doc::parse(text, base)?;

        let command = match doc.take("", "command") {
            None => return Err(cerr(0, "command", "missing")),
            Some((line, key, v)) => match v.as_str() {
                "spectrum" => Command::Spectrum,
                "compare" => Command::Compare,
                "linewidth" => Command::Linewidth,
                "oracle" => Command::Oracle,
                "validate-noise" => Command::ValidateNoise,
                _ => return Err(cerr(line, &key, format!("unknown command `{v}`"))),
            },
        };
        let seed = doc.parsed("", "seed", |v| v.parse::<u64>().ok(), "an unsigned integer")?.map_or(0, |x| x.1);
        let output = doc.path("", "output").map_or_else(|| base.join("out"), |x| x.1);
        let units = match doc.take("", "units") {
            None => UnitSystem::Reduced,
            Some((line, key, v)) => match v.to_ascii_lowercase().as_str() {
                "reduced" => UnitSystem::Reduced,
                "si" => UnitSystem::Si,
                _ => return Err(cerr(line, &key, format!("unknown unit system `{v}` (reduced or si)"))),
            },
        };
        let threads = doc.usize("", "threads")?.map(|x| x.1);

        let system = if command == Command::ValidateNoise && !doc.sections.contains_key("system") {
            None
        } else {
            Some(system_section(&mut doc, units)?)
        };

        let gamma = match doc.f64("coupling", "gamma")? {
            None => 1.0,
            Some((line, g)) => require_positive(line, "coupling.gamma", g)?,
        };

        let noise = noise_section(&mut doc)?;

        let grid_needed = matches!(command, Command::Spectrum | Command::Compare);
        let grid = grid_section(&mut doc, grid_needed)?;
        let rate = rate_section(&mut doc)?;
        let plot = PlotConfig {
            svg: or_default(doc.bool("plot", "svg")?, false),
            log_y: or_default(doc.bool("plot", "log_y")?, false),
        };
        let oracle = oracle_section(&mut doc, command == Command::Oracle)?;
        let validate = validate_section(&mut doc)?;
        doc.finish()?;

        Ok(Self { command, seed, output, units, threads, system, gamma, noise, grid, rate, plot, oracle, validate })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base)
    }

    pub fn output_path(&self, suffix: &str) -> PathBuf {
        let mut s = self.output.clone().into_os_string();
        s.push(suffix);
        PathBuf::from(s)
    }
}

fn system_section(doc: &mut Doc, units: UnitSystem) -> Result<SystemConfig> {
    let builtin = doc.take("system", "builtin");
    let path = doc.path("system", "path");
    let source = match (builtin, path) {
        (Some((line, key, _)), Some(_)) => return Err(cerr(line, &key, "give either builtin or path, not both")),
        (None, None) => return Err(cerr(doc.line_of("system"), "system.builtin", "missing (or give system.path)")),
        (None, Some((_, p))) => SystemSource::File(p),
        (Some((line, key, v)), None) => SystemSource::Builtin(match v.as_str() {
            "oscillator" => Builtin::Oscillator,
            "oscillator3d" => Builtin::Oscillator3d,
            "two-level" => Builtin::TwoLevel,
            _ => return Err(cerr(line, &key, format!("unknown builtin `{v}`"))),
        }),
    };
    let (def_charge, def_mass) = match units {
        UnitSystem::Reduced => (1.0, 1.0),
        UnitSystem::Si => (crate::units::SI_ELEMENTARY_CHARGE, crate::units::SI_ELECTRON_MASS),
    };
    let omega0 = match doc.f64("system", "omega0")? {
        Some((line, v)) => require_positive(line, "system.omega0", v)?,
        None if units == UnitSystem::Si && matches!(source, SystemSource::Builtin(Builtin::Oscillator | Builtin::Oscillator3d)) => {
            return Err(cerr(doc.line_of("system"), "system.omega0", "required in SI units"))
        }
        None => 1.0,
    };
    let mass = match doc.f64("system", "mass")? {
        Some((line, v)) => require_positive(line, "system.mass", v)?,
        None => def_mass,
    };
    let charge = or_default(doc.f64("system", "charge")?, def_charge);
    let levels = match doc.usize("system", "levels")? {
        Some((line, n)) if n < 2 => return Err(cerr(line, "system.levels", "at least two levels are required")),
        Some((_, n)) => n,
        None => 8,
    };
    let gap = match doc.f64("system", "gap")? {
        Some((line, v)) if v < 0.0 => return Err(cerr(line, "system.gap", "must be non-negative")),
        Some((_, v)) => v,
        None => 1.0,
    };
    let noise_element = or_default(doc.f64("system", "noise_element")?, 1.0);
    let momentum_element = or_default(doc.f64("system", "momentum_element")?, 1.0);
    let widths = match doc.take("system", "widths") {
        None => match source {
            SystemSource::File(_) => Widths::File,
            SystemSource::Builtin(_) => Widths::Radiative,
        },
        Some((line, key, v)) => match v.as_str() {
            "radiative" => Widths::Radiative,
            "file" => Widths::File,
            list => {
                let vals: Option<Vec<f64>> = list.split(',').map(|x| x.trim().parse::<f64>().ok()).collect();
                match vals {
                    Some(w) if w.iter().all(|x| x.is_finite() && *x >= 0.0) => Widths::Explicit(w),
                    _ => {
                        return Err(cerr(line, &key, "expected radiative, file or a list of non-negative numbers"))
                    }
                }
            }
        },
    };
    let initial = doc.usize("system", "initial")?.map(|x| x.1);
    Ok(SystemConfig { source, omega0, mass, charge, levels, gap, noise_element, momentum_element, widths, initial })
}

fn noise_section(doc: &mut Doc) -> Result<NoiseConfig> {
    let kind = match doc.take("noise", "kind") {
        None => NoiseKindConfig::White,
        Some((line, key, v)) => match v.as_str() {
            "white" => NoiseKindConfig::White,
            "exponential" => NoiseKindConfig::Exponential,
            "gaussian" => NoiseKindConfig::Gaussian,
            "tabulated" => NoiseKindConfig::Tabulated,
            _ => return Err(cerr(line, &key, format!("unknown noise kind `{v}`"))),
        },
    };
    let tau = match doc.f64("noise", "tau")? {
        Some((line, v)) => require_positive(line, "noise.tau", v)?,
        None if matches!(kind, NoiseKindConfig::Exponential | NoiseKindConfig::Gaussian) => {
            return Err(cerr(doc.line_of("noise"), "noise.tau", "required for this noise kind"))
        }
        None => 1.0,
    };
    let scale = match doc.f64("noise", "scale")? {
        Some((line, v)) if v < 0.0 => return Err(cerr(line, "noise.scale", "must be non-negative")),
        Some((_, v)) => v,
        None => 1.0,
    };
    let path = doc.path("noise", "path").map(|x| x.1);
    if kind == NoiseKindConfig::Tabulated && path.is_none() {
        return Err(cerr(doc.line_of("noise"), "noise.path", "required for tabulated noise"));
    }
    let spike_amplitude = match doc.f64("noise", "spike_amplitude")? {
        Some((line, v)) if v < 0.0 => return Err(cerr(line, "noise.spike_amplitude", "must be non-negative")),
        Some((_, v)) => v,
        None => 0.0,
    };
    let spike_tau = match doc.f64("noise", "spike_tau")? {
        Some((line, v)) => require_positive(line, "noise.spike_tau", v)?,
        None => 1000.0,
    };
    Ok(NoiseConfig { kind, tau, scale, path, spike_amplitude, spike_tau })
}

fn grid_section(doc: &mut Doc, needed: bool) -> Result<Option<GridConfig>> {
    let k_min = doc.f64("grid", "k_min")?;
    let k_max = doc.f64("grid", "k_max")?;
    let points = doc.usize("grid", "points")?;
    let spacing = match doc.take("grid", "spacing") {
        None => Spacing::Linear,
        Some((line, key, v)) => match v.as_str() {
            "linear" => Spacing::Linear,
            "log" => Spacing::Log,
            _ => return Err(cerr(line, &key, format!("unknown spacing `{v}` (linear or log)"))),
        },
    };
    let Some((lmin, k_min)) = k_min else {
        return if needed { Err(cerr(doc.line_of("grid"), "grid.k_min", "missing")) } else { Ok(None) };
    };
    let k_min = require_positive(lmin, "grid.k_min", k_min)?;
    let (lmax, k_max) = k_max.unwrap_or((lmin, k_min));
    if k_max < k_min {
        return Err(cerr(lmax, "grid.k_max", format!("must be at least k_min = {k_min}")));
    }
    let points = match points {
        Some((line, 0)) => return Err(cerr(line, "grid.points", "must be at least 1")),
        Some((_, n)) => n,
        None => 64,
    };
    Ok(Some(GridConfig { k_min, k_max, points, spacing }))
}

fn rate_section(doc: &mut Doc) -> Result<RateConfig> {
    let mode = match doc.take("rate", "mode") {
        None => Mode::Regularized,
        Some((line, key, v)) => match v.as_str() {
            "regularized" => Mode::Regularized,
            "naive" => Mode::Naive,
            _ => return Err(cerr(line, &key, format!("unknown mode `{v}` (regularized or naive)"))),
        },
    };
    let final_states = match doc.take("rate", "final_states") {
        None => FinalStates::All,
        Some((_, _, v)) if v == "all" => FinalStates::All,
        Some((line, key, v)) => {
            let idx: Option<Vec<usize>> = v.split(',').map(|x| x.trim().parse().ok()).collect();
            FinalStates::List(idx.ok_or_else(|| cerr(line, &key, "expected `all` or a list of level indices"))?)
        }
    };
    let window = match doc.f64("rate", "window")? {
        Some((line, v)) => require_positive(line, "rate.window", v)?,
        None => 5.0,
    };
    let t_eval = match doc.f64("rate", "t_eval")? {
        Some((line, v)) => require_positive(line, "rate.t_eval", v)?,
        None => 50.0,
    };
    if window > 2.0 * t_eval {
        return Err(cerr(doc.line_of("rate"), "rate.window", "must not exceed 2 t_eval"));
    }
    let angular = match doc.take("rate", "angular") {
        None => AngularMethod::DipoleIdentity,
        Some((line, key, v)) => match v.as_str() {
            "identity" => AngularMethod::DipoleIdentity,
            "quadrature" => AngularMethod::SphereQuadrature,
            _ => return Err(cerr(line, &key, format!("unknown angular method `{v}` (identity or quadrature)"))),
        },
    };
    Ok(RateConfig { mode, final_states, window, t_eval, angular })
}

fn oracle_section(doc: &mut Doc, needed: bool) -> Result<Option<OracleConfig>> {
    let k = doc.list("oracle", "k")?;
    let final_state = or_default(doc.usize("oracle", "final")?, 0);
    let t = match doc.f64("oracle", "t")? {
        Some((line, v)) => require_positive(line, "oracle.t", v)?,
        None => 20.0,
    };
    let dt = match doc.f64("oracle", "dt")? {
        Some((line, v)) => require_positive(line, "oracle.dt", v)?,
        None => 0.02,
    };
    let samples = match doc.usize("oracle", "samples")? {
        Some((line, n)) if n < crate::mc::MIN_SAMPLES => {
            return Err(cerr(line, "oracle.samples", format!("must be at least {}", crate::mc::MIN_SAMPLES)))
        }
        Some((_, n)) => n,
        None => 1000,
    };
    let direction = match doc.take("oracle", "direction") {
        None => 0,
        Some((line, key, v)) => match v.as_str() {
            "x" | "0" => 0,
            "y" | "1" => 1,
            "z" | "2" => 2,
            _ => return Err(cerr(line, &key, format!("`{v}` is not an axis (x, y or z)"))),
        },
    };
    let damped = or_default(doc.bool("oracle", "damped")?, true);
    let Some((line, k)) = k else {
        return if needed { Err(cerr(doc.line_of("oracle"), "oracle.k", "missing")) } else { Ok(None) };
    };
    if let Some(bad) = k.iter().find(|x| **x <= 0.0) {
        return Err(cerr(line, "oracle.k", format!("k = {bad} is not positive")));
    }
    Ok(Some(OracleConfig { k, final_state, t, dt, samples, direction, damped }))
}

fn validate_section(doc: &mut Doc) -> Result<ValidateConfig> {
    let omega_min = or_default(doc.f64("validate", "omega_min")?, -50.0);
    let omega_max = match doc.f64("validate", "omega_max")? {
        Some((line, v)) if v <= omega_min => {
            return Err(cerr(line, "validate.omega_max", format!("must exceed omega_min = {omega_min}")))
        }
        Some((_, v)) => v,
        None => 50.0_f64.max(omega_min + 1.0),
    };
    let points = match doc.usize("validate", "points")? {
        Some((line, n)) if n < 2 => return Err(cerr(line, "validate.points", "must be at least 2")),
        Some((_, n)) => n,
        None => 201,
    };
    Ok(ValidateConfig { omega_min, omega_max, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig> {
        RunConfig::parse(text, Path::new("/tmp"))
    }

    #[test]
    fn minimal_spectrum() {
        let c = parse("command = spectrum\n[system]\nbuiltin = oscillator\n[grid]\nk_min = 0.5\nk_max = 2\npoints = 4\n").unwrap();
        assert_eq!(c.command, Command::Spectrum);
        assert_eq!(c.grid.unwrap().values(), vec![0.5, 1.0, 1.5, 2.0]);
        assert_eq!(c.output, PathBuf::from("/tmp/out"));
        assert_eq!(c.system.unwrap().widths, Widths::Radiative);
    }

    #[test]
    fn log_grid_hits_endpoints() {
        let g = GridConfig { k_min: 0.1, k_max: 10.0, points: 3, spacing: Spacing::Log };
        let v = g.values();
        assert!((v[1] - 1.0).abs() < 1e-15 && (v[2] - 10.0).abs() < 1e-14);
    }

    #[test]
    fn errors_name_key_and_line() {
        let e = parse("command = spectrum\n[system]\nbuiltin = oscillator\n[grid]\nk_min = -1\n").unwrap_err();
        assert_eq!(e, Error::Config { line: 5, key: "grid.k_min".into(), message: "must be positive, got -1".into() });
        let e = parse("command = linewidth\n[system]\nbuiltin = oscillator\nfoo = 1\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 4, ref key, .. } if key == "system.foo"), "{e:?}");
        let e = parse("command = spectrum\nseed = 1\nseed = 2\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 3, .. }));
    }

    #[test]
    fn explicit_widths() {
        let c = parse("command = linewidth\n[system]\nbuiltin = two-level\nwidths = 0, 0.25\n").unwrap();
        assert_eq!(c.system.unwrap().widths, Widths::Explicit(vec![0.0, 0.25]));
    }
}
