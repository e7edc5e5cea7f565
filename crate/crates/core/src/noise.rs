// SPDX-License-Identifier: Apache-2.0

//! Stationary noise statistics: the correlation `f(s)` and its spectral
//! density `f̃(ω) = ∫ f(s) e^{iωs} ds`.

use crate::error::{Error, Result};
use std::f64::consts::PI;
use std::path::Path;

const ASYMMETRY_TOL: f64 = 1e-9;
const NEGATIVITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseKind {
    White,
    Exponential { tau: f64 },
    GaussianCorr { tau: f64 },
    Tabulated(Table),
    /// Independent superposition; correlations and spectra add.
    Sum(Vec<NoiseModel>),
}

/// Correlation tabulated on `s ≥ 0` after symmetrization.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    s: Vec<f64>,
    f: Vec<f64>,
}

impl Table {
    pub fn support(&self) -> f64 {
        *self.s.last().expect("table non-empty")
    }

    pub fn nodes(&self) -> &[f64] {
        &self.s
    }

    fn interp(&self, s: f64) -> Option<f64> {
        let a = s.abs();
        if a > self.support() {
            return None;
        }
        let j = self.s.partition_point(|&x| x <= a);
        if j == 0 {
            return Some(self.f[0]);
        }
        if j == self.s.len() {
            return Some(self.f[j - 1]);
        }
        let (s0, s1) = (self.s[j - 1], self.s[j]);
        let w = (a - s0) / (s1 - s0);
        Some(self.f[j - 1] * (1.0 - w) + self.f[j] * w)
    }

    /// Exact `2∫₀^S f(s) cos(ωs) ds` of the piecewise-linear interpolant.
    fn fourier(&self, omega: f64) -> Result<f64> {
        let (s, f) = (&self.s, &self.f);
        let n = s.len();
        if omega == 0.0 {
            let area: f64 = (1..n).map(|j| 0.5 * (s[j] - s[j - 1]) * (f[j] + f[j - 1])).sum();
            return Ok(2.0 * area);
        }
        // Per segment: [f sin(ωs)/ω + m cos(ωs)/ω²]; the first part telescopes.
        let mut acc = f[n - 1] * (omega * s[n - 1]).sin() / omega;
        for j in 1..n {
            let h = s[j] - s[j - 1];
            let m = (f[j] - f[j - 1]) / h;
            let dcos = -2.0 * (0.5 * omega * (s[j] + s[j - 1])).sin() * (0.5 * omega * h).sin();
            acc += m * dcos / (omega * omega);
        }
        Ok(2.0 * acc)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationValue {
    pub value: f64,
    /// Set when a tabulated model was queried outside its support.
    pub beyond_support: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSample {
    pub omega: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AdmissibilityReport {
    pub negative: Vec<SpectralSample>,
    pub failed: Vec<(f64, Error)>,
    pub min_value: f64,
}

impl AdmissibilityReport {
    pub fn admissible(&self) -> bool {
        self.negative.is_empty() && self.failed.is_empty()
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidNoise(format!("{name} must be finite and positive, got {v}")))
    }
}

impl NoiseModel {
    pub fn white() -> Self {
        Self { kind: NoiseKind::White, scale: 1.0 }
    }

    pub fn exponential(tau: f64) -> Result<Self> {
        Ok(Self { kind: NoiseKind::Exponential { tau: positive("tau", tau)? }, scale: 1.0 })
    }

    pub fn gaussian(tau: f64) -> Result<Self> {
        Ok(Self { kind: NoiseKind::GaussianCorr { tau: positive("tau", tau)? }, scale: 1.0 })
    }

    /// Builds a tabulated model from `(s, f(s))` samples with strictly
    /// increasing `s`. Samples on both sides of zero are checked for evenness
    /// and averaged.
    pub fn tabulated(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidNoise("tabulated correlation needs at least two samples".into()));
        }
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidNoise(format!("s values not strictly increasing at s = {}", w[1].0)));
            }
        }
        if samples.iter().any(|(s, f)| !s.is_finite() || !f.is_finite()) {
            return Err(Error::InvalidNoise("non-finite sample".into()));
        }
        let pos: Vec<(f64, f64)> = samples.iter().copied().filter(|p| p.0 >= 0.0).collect();
        let mut neg: Vec<(f64, f64)> = samples.iter().filter(|p| p.0 <= 0.0).map(|&(s, f)| (-s, f)).collect();
        neg.reverse();
        let interp = |tab: &[(f64, f64)], a: f64| -> Option<f64> {
            if tab.is_empty() || a < tab[0].0 || a > tab[tab.len() - 1].0 {
                return None;
            }
            let j = tab.partition_point(|p| p.0 <= a);
            if j == tab.len() {
                return Some(tab[j - 1].1);
            }
            if j == 0 {
                return Some(tab[0].1);
            }
            let (s0, f0) = tab[j - 1];
            let (s1, f1) = tab[j];
            Some(f0 + (f1 - f0) * (a - s0) / (s1 - s0))
        };
        let mut grid: Vec<f64> = pos.iter().chain(neg.iter()).map(|p| p.0).collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
        if grid[0] != 0.0 {
            return Err(Error::InvalidNoise("tabulated correlation must cover s = 0".into()));
        }
        let fmax = samples.iter().map(|p| p.1.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let mut s_out = Vec::with_capacity(grid.len());
        let mut f_out = Vec::with_capacity(grid.len());
        for &a in &grid {
            let v = match (interp(&pos, a), interp(&neg, a)) {
                (Some(p), Some(n)) => {
                    if (p - n).abs() > ASYMMETRY_TOL * fmax {
                        return Err(Error::InvalidNoise(format!(
                            "correlation not even at |s| = {a}: {p} vs {n}"
                        )));
                    }
                    0.5 * (p + n)
                }
                (Some(p), None) => p,
                (None, Some(n)) => n,
                (None, None) => continue,
            };
            s_out.push(a);
            f_out.push(v);
        }
        Ok(Self { kind: NoiseKind::Tabulated(Table { s: s_out, f: f_out }), scale: 1.0 })
    }

    /// Reads a two-column `s f(s)` file; `#` lines are comments.
    pub fn load_tabulated(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut samples = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<f64> {
                tok.ok_or_else(|| Error::Parse { line: i + 1, message: "expected two columns".into() })?
                    .parse::<f64>()
                    .map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })
            };
            let s = parse(it.next())?;
            let f = parse(it.next())?;
            if it.next().is_some() {
                return Err(Error::Parse { line: i + 1, message: "expected two columns".into() });
            }
            samples.push((s, f));
        }
        Self::tabulated(&samples)
    }

    pub fn sum(parts: Vec<NoiseModel>) -> Self {
        Self { kind: NoiseKind::Sum(parts), scale: 1.0 }
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.scale *= c;
        self
    }

    pub fn is_white(&self) -> bool {
        self.smooth_components().is_empty()
    }

    /// `f(s)`. White noise has no pointwise value.
    pub fn eval_correlation(&self, s: f64) -> Result<CorrelationValue> {
        if self.has_white_component() {
            return Err(Error::PointwiseUndefined);
        }
        let mut beyond = false;
        let value = self.smooth_eval(s, &mut beyond);
        Ok(CorrelationValue { value, beyond_support: beyond })
    }

    fn has_white_component(&self) -> bool {
        match &self.kind {
            NoiseKind::White => true,
            NoiseKind::Sum(p) => p.iter().any(|m| m.has_white_component()),
            _ => false,
        }
    }

    fn smooth_eval(&self, s: f64, beyond: &mut bool) -> f64 {
        let v = match &self.kind {
            NoiseKind::White => 0.0,
            NoiseKind::Exponential { tau } => (-s.abs() / tau).exp() / (2.0 * tau),
            NoiseKind::GaussianCorr { tau } => {
                (-0.5 * (s / tau).powi(2)).exp() / ((2.0 * PI).sqrt() * tau)
            }
            NoiseKind::Tabulated(t) => match t.interp(s) {
                Some(v) => v,
                None => {
                    *beyond = true;
                    0.0
                }
            },
            NoiseKind::Sum(parts) => parts.iter().map(|m| m.smooth_eval(s, beyond)).sum(),
        };
        self.scale * v
    }

    /// Non-white part of `f(s)`; zero beyond tabulated support.
    pub fn smooth_correlation(&self, s: f64) -> f64 {
        let mut beyond = false;
        self.smooth_eval(s, &mut beyond)
    }

    /// Total weight of the `δ(s)` component.
    pub fn white_weight(&self) -> f64 {
        self.scale
            * match &self.kind {
                NoiseKind::White => 1.0,
                NoiseKind::Sum(p) => p.iter().map(NoiseModel::white_weight).sum(),
                _ => 0.0,
            }
    }

    /// Leaf components other than white noise, each with its accumulated scale.
    pub fn smooth_components(&self) -> Vec<NoiseModel> {
        let mut out = Vec::new();
        self.collect_smooth(1.0, &mut out);
        out
    }

    fn collect_smooth(&self, outer: f64, out: &mut Vec<NoiseModel>) {
        let total = outer * self.scale;
        match &self.kind {
            NoiseKind::White => {}
            NoiseKind::Sum(parts) => parts.iter().for_each(|m| m.collect_smooth(total, out)),
            k => out.push(NoiseModel { kind: k.clone(), scale: total }),
        }
    }

    /// |s| beyond which the smooth correlation is negligible (below e^{-40}
    /// of its peak, or past the tabulated support).
    pub fn smooth_cutoff(&self) -> f64 {
        self.smooth_components()
            .iter()
            .map(|m| match &m.kind {
                NoiseKind::Exponential { tau } => 40.0 * tau,
                NoiseKind::GaussianCorr { tau } => 9.0 * tau,
                NoiseKind::Tabulated(t) => t.support(),
                _ => 0.0,
            })
            .fold(0.0, f64::max)
    }

    /// Shortest correlation time among the smooth components.
    pub fn correlation_time(&self) -> Option<f64> {
        self.smooth_components()
            .iter()
            .filter_map(|m| match &m.kind {
                NoiseKind::Exponential { tau } | NoiseKind::GaussianCorr { tau } => Some(*tau),
                NoiseKind::Tabulated(t) => {
                    let s = t.nodes();
                    Some(s.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min) * 20.0)
                }
                _ => None,
            })
            .reduce(f64::min)
    }

    /// Points where the smooth correlation has a kink (besides `s = 0`).
    pub fn smooth_breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for m in self.smooth_components() {
            if let NoiseKind::Tabulated(t) = &m.kind {
                out.push(t.support());
            }
        }
        out
    }

    /// `f̃(ω)`.
    pub fn spectral_density(&self, omega: f64) -> Result<f64> {
        let v = match &self.kind {
            NoiseKind::White => 1.0,
            NoiseKind::Exponential { tau } => 1.0 / (1.0 + (omega * tau).powi(2)),
            NoiseKind::GaussianCorr { tau } => (-0.5 * (omega * tau).powi(2)).exp(),
            NoiseKind::Tabulated(t) => t.fourier(omega)?,
            NoiseKind::Sum(parts) => {
                let mut acc = 0.0;
                for p in parts {
                    acc += p.spectral_density(omega)?;
                }
                acc
            }
        };
        Ok(self.scale * v)
    }

    pub fn validate_admissible(&self, grid: &[f64]) -> AdmissibilityReport {
        let mut report = AdmissibilityReport { min_value: f64::INFINITY, ..Default::default() };
        for &omega in grid {
            match self.spectral_density(omega) {
                Ok(value) => {
                    report.min_value = report.min_value.min(value);
                    if value < -NEGATIVITY_TOL {
                        report.negative.push(SpectralSample { omega, value });
                    }
                }
                Err(e) => report.failed.push((omega, e)),
            }
        }
        report
    }

    pub fn describe(&self) -> String {
        let body = match &self.kind {
            NoiseKind::White => "white".to_string(),
            NoiseKind::Exponential { tau } => format!("exponential(tau={tau})"),
            NoiseKind::GaussianCorr { tau } => format!("gaussian(tau={tau})"),
            NoiseKind::Tabulated(t) => format!("tabulated({} nodes, support {})", t.s.len(), t.support()),
            NoiseKind::Sum(p) => p.iter().map(NoiseModel::describe).collect::<Vec<_>>().join(" + "),
        };
        if self.scale == 1.0 {
            body
        } else {
            format!("{}*[{}]", self.scale, body)
        }
    }
}

pub fn eval_correlation(model: &NoiseModel, s: f64) -> Result<CorrelationValue> {
    model.eval_correlation(s)
}

pub fn spectral_density(model: &NoiseModel, omega: f64) -> Result<f64> {
    model.spectral_density(omega)
}

pub fn validate_admissible(model: &NoiseModel, grid: &[f64]) -> AdmissibilityReport {
    model.validate_admissible(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_real, QuadOptions};

    fn tabulate(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
        (0..=n)
            .map(|j| {
                let s = lo + (hi - lo) * j as f64 / n as f64;
                (s, f(s))
            })
            .collect()
    }

    #[test]
    fn exponential_values() {
        let m = NoiseModel::exponential(1.0).unwrap();
        assert_eq!(m.eval_correlation(0.0).unwrap().value, 0.5);
        assert_eq!(m.eval_correlation(2.0).unwrap(), m.eval_correlation(-2.0).unwrap());
        assert!((m.spectral_density(1.0).unwrap() - 0.5).abs() < 1e-15);
        let norm = integrate_real(|s| m.smooth_correlation(s), -60.0, 60.0, &[0.0], QuadOptions::default());
        assert!((norm.value.re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn white_is_symbolic() {
        let w = NoiseModel::white();
        assert_eq!(w.eval_correlation(0.3), Err(Error::PointwiseUndefined));
        assert_eq!(w.spectral_density(123.0).unwrap(), 1.0);
        assert!(w.validate_admissible(&[-5.0, 0.0, 5.0]).admissible());
    }

    #[test]
    fn builtin_spectra_match_fourier_quadrature() {
        for m in [NoiseModel::exponential(0.7).unwrap(), NoiseModel::gaussian(1.3).unwrap()] {
            let tau = m.correlation_time().unwrap();
            for j in 0..=40 {
                let omega = -20.0 / tau + 40.0 / tau * j as f64 / 40.0;
                let cut = m.smooth_cutoff();
                let q = integrate_real(
                    |s| m.smooth_correlation(s) * (omega * s).cos(),
                    -cut,
                    cut,
                    &[0.0],
                    QuadOptions::tol(1e-14, 1e-12),
                );
                let exact = m.spectral_density(omega).unwrap();
                assert!((q.value.re - exact).abs() <= 1e-6 * exact.abs().max(1e-9), "omega={omega}");
            }
        }
    }

    #[test]
    fn tabulated_matches_closed_form() {
        let base = NoiseModel::exponential(1.0).unwrap();
        let samples = tabulate(|s| base.smooth_correlation(s), -10.0, 10.0, 20_000);
        let tab = NoiseModel::tabulated(&samples).unwrap();
        let v = tab.eval_correlation(1.0).unwrap();
        assert!((v.value - 0.5 * (-1.0f64).exp()).abs() < 1e-6);
        assert!(!v.beyond_support);
        let out = tab.eval_correlation(11.0).unwrap();
        assert_eq!(out.value, 0.0);
        assert!(out.beyond_support);
        let st = tab.spectral_density(0.4).unwrap();
        assert_eq!(st, tab.spectral_density(-0.4).unwrap());
        // truncated at |s| = 10: tail weight e^{-10}
        assert!((st - base.spectral_density(0.4).unwrap()).abs() < 1e-4);
    }

    #[test]
    fn triangle_transform_is_exact() {
        let tab = NoiseModel::tabulated(&[(0.0, 1.0), (0.25, 0.75), (1.0, 0.0)]).unwrap();
        for w in [0.0, 1e-4, 0.7, 3.0, 80.0] {
            let exact = if w == 0.0 { 1.0 } else { (2.0 * f64::sin(0.5 * w) / w).powi(2) };
            assert!((tab.spectral_density(w).unwrap() - exact).abs() < 1e-12, "ω = {w}");
        }
    }

    #[test]
    fn asymmetric_table_rejected() {
        let samples = vec![(-1.0, 0.2), (0.0, 1.0), (1.0, 0.3)];
        assert!(matches!(NoiseModel::tabulated(&samples), Err(Error::InvalidNoise(_))));
    }

    #[test]
    fn inadmissible_table_detected() {
        let samples = tabulate(|s| (1.0 - 4.0 * s * s) * (-s * s).exp(), -8.0, 8.0, 16_000);
        let m = NoiseModel::tabulated(&samples).unwrap();
        let grid: Vec<f64> = (0..41).map(|j| -2.0 + 0.1 * j as f64).collect();
        let r = m.validate_admissible(&grid);
        assert!(!r.admissible());
        assert!(r.negative.iter().all(|p| p.omega.abs() < 1.0));
        let ok = tabulate(|s| (5.0 * s).cos() * (-s * s).exp(), -8.0, 8.0, 16_000);
        assert!(NoiseModel::tabulated(&ok).unwrap().validate_admissible(&grid).admissible());
    }

    #[test]
    fn scaling_and_sums() {
        let m = NoiseModel::sum(vec![NoiseModel::white(), NoiseModel::exponential(2.0).unwrap().scaled(3.0)]).scaled(2.0);
        assert_eq!(m.white_weight(), 2.0);
        let expect = 2.0 * (1.0 + 3.0 / (1.0 + 4.0));
        assert!((m.spectral_density(1.0).unwrap() - expect).abs() < 1e-15);
        let comps = m.smooth_components();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].scale, 6.0);
        assert!((m.smooth_correlation(0.0) - 6.0 / 4.0).abs() < 1e-15);
    }
}
