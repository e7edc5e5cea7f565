// SPDX-License-Identifier: Apache-2.0

//! Reference computations that share no code with the library: their own
//! Gauss-Legendre rules, Ridders differentiation and brute-force time
//! integrals written directly from the amplitude definitions.

#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::PI;

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gl_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite rule: `panels` equal panels of `order`-point Gauss-Legendre.
pub struct Composite {
    x: Vec<f64>,
    w: Vec<f64>,
}

impl Composite {
    pub fn new(order: usize) -> Self {
        let (x, w) = gl_rule(order);
        Self { x, w }
    }

    /// Nodes and weights covering `[a, b]` with panels no wider than `h`.
    pub fn nodes(&self, a: f64, b: f64, h: f64) -> Vec<(f64, f64)> {
        if b <= a {
            return Vec::new();
        }
        let panels = ((b - a) / h).ceil().max(1.0) as usize;
        let len = (b - a) / panels as f64;
        let mut out = Vec::with_capacity(panels * self.x.len());
        for p in 0..panels {
            let lo = a + p as f64 * len;
            for (xi, wi) in self.x.iter().zip(&self.w) {
                out.push((lo + 0.5 * len * (xi + 1.0), 0.5 * len * wi));
            }
        }
        out
    }

    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, mut f: F, a: f64, b: f64, h: f64) -> Complex64 {
        let mut s = KahanC::default();
        for (x, w) in self.nodes(a, b, h) {
            s.add(f(x) * w);
        }
        s.sum()
    }

    pub fn integrate_real<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64, h: f64) -> f64 {
        self.integrate(|x| cx(f(x), 0.0), a, b, h).re
    }
}

#[derive(Default, Clone, Copy)]
pub struct KahanC {
    s: Complex64,
    c: Complex64,
}

impl KahanC {
    pub fn add(&mut self, v: Complex64) {
        let y = v - self.c;
        let t = self.s + y;
        self.c = (t - self.s) - y;
        self.s = t;
    }

    pub fn sum(&self) -> Complex64 {
        self.s
    }
}

/// Ridders' polynomial extrapolation of central differences. Returns the
/// derivative and its error estimate.
pub fn ridders<F: Fn(f64) -> Complex64>(f: F, x: f64, h0: f64) -> (Complex64, f64) {
    const CON: f64 = 1.4;
    const CON2: f64 = CON * CON;
    const NTAB: usize = 12;
    let mut a = vec![vec![cx(0.0, 0.0); NTAB]; NTAB];
    let mut h = h0;
    a[0][0] = (f(x + h) - f(x - h)) / (2.0 * h);
    let mut err = f64::INFINITY;
    let mut ans = a[0][0];
    for i in 1..NTAB {
        h /= CON;
        a[0][i] = (f(x + h) - f(x - h)) / (2.0 * h);
        let mut fac = CON2;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON2;
            let e = (a[j][i] - a[j - 1][i]).norm().max((a[j][i] - a[j - 1][i - 1]).norm());
            if e <= err {
                err = e;
                ans = a[j][i];
            }
        }
        if (a[i][i] - a[i - 1][i - 1]).norm() >= 2.0 * err {
            break;
        }
    }
    (ans, err)
}

/// Six-point rule on the unit sphere (exact through degree 3).
pub fn sphere_six() -> Vec<([f64; 3], f64)> {
    let w = 4.0 * PI / 6.0;
    let mut out = Vec::new();
    for axis in 0..3 {
        for s in [1.0, -1.0] {
            let mut v = [0.0; 3];
            v[axis] = s;
            out.push((v, w));
        }
    }
    out
}

/// Noise statistics written out independently of the library.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RefNoise {
    White,
    /// `e^{−|s|/τ}/(2τ)`.
    Exponential(f64),
    /// `e^{−s²/2τ²}/(√(2π) τ)`.
    Gaussian(f64),
}

impl RefNoise {
    pub fn f(&self, s: f64) -> f64 {
        match *self {
            RefNoise::White => 0.0,
            RefNoise::Exponential(tau) => (-s.abs() / tau).exp() / (2.0 * tau),
            RefNoise::Gaussian(tau) => (-0.5 * (s / tau).powi(2)).exp() / ((2.0 * PI).sqrt() * tau),
        }
    }

    /// Lag beyond which `f` is below `1e-12 · f(0)`.
    pub fn reach(&self) -> f64 {
        match *self {
            RefNoise::White => 0.0,
            RefNoise::Exponential(tau) => 28.0 * tau,
            RefNoise::Gaussian(tau) => 7.5 * tau,
        }
    }

    pub fn spectrum(&self, w: f64) -> f64 {
        match *self {
            RefNoise::White => 1.0,
            RefNoise::Exponential(tau) => 1.0 / (1.0 + (w * tau).powi(2)),
            RefNoise::Gaussian(tau) => (-0.5 * (w * tau).powi(2)).exp(),
        }
    }

    pub fn model(&self) -> noise_radiance::noise::NoiseModel {
        use noise_radiance::noise::NoiseModel;
        match *self {
            RefNoise::White => NoiseModel::white(),
            RefNoise::Exponential(tau) => NoiseModel::exponential(tau).unwrap(),
            RefNoise::Gaussian(tau) => NoiseModel::gaussian(tau).unwrap(),
        }
    }
}

/// One second-order amplitude
/// `∫₀ᵗ dt₁ e^{c₁t₁} ∫₀^{t₁} dt₂ e^{c₂t₂} w(t_slot)`,
/// with the noise at `t₂` (`noise_inner`) or at `t₁`.
#[derive(Debug, Clone, Copy)]
pub struct RefTerm {
    pub c1: Complex64,
    pub c2: Complex64,
    pub noise_inner: bool,
}

/// `∫_a^b e^{zu} du` written out with a series near `z = 0`.
pub fn exp_span(z: Complex64, a: f64, b: f64) -> Complex64 {
    let l = b - a;
    let w = z * l;
    let core = if w.norm() < 1e-3 {
        l * (1.0 + w / 2.0 + w * w / 6.0 + w * w * w / 24.0 + w * w * w * w / 120.0)
    } else {
        ((w).exp() - 1.0) / z
    };
    (z * a).exp() * core
}

impl RefTerm {
    /// Weight `G(s, t)` of `w(s)` in the amplitude.
    pub fn weight(&self, s: f64, t: f64) -> Complex64 {
        if self.noise_inner {
            (self.c2 * s).exp() * exp_span(self.c1, s, t)
        } else {
            (self.c1 * s).exp() * exp_span(self.c2, 0.0, s)
        }
    }

    /// `∂_t G(s, t)` for the inner slot.
    pub fn weight_dt(&self, s: f64, t: f64) -> Complex64 {
        (self.c2 * s + self.c1 * t).exp()
    }

    /// Range of `s` outside which `∂_t G` is negligible.
    fn dt_support(&self, t: f64) -> f64 {
        let g = self.c2.re;
        if g > 0.0 {
            (t - 40.0 / g).max(0.0)
        } else {
            0.0
        }
    }
}

const PANEL: f64 = 0.25;
const ORDER: usize = 10;

/// `∫∫ h(s) f(s − s') conj(H(s')) ds ds'` over `[lo, t] × [0, t]` in the
/// lag variable `u = s − s'`, split at the kink `u = 0`.
fn smooth_cross<A, B>(h: A, hh: B, lo: f64, t: f64, noise: RefNoise) -> Complex64
where
    A: Fn(f64) -> Complex64,
    B: Fn(f64) -> Complex64,
{
    let q = Composite::new(ORDER);
    let reach = noise.reach().min(t);
    let mut acc = KahanC::default();
    for (u, wu) in q.nodes(-reach, 0.0, PANEL).into_iter().chain(q.nodes(0.0, reach, PANEL)) {
        let fu = noise.f(u);
        let a = lo.max(u);
        let b = t.min(t + u);
        let inner = q.integrate(|s| h(s) * hh(s - u).conj(), a, b, PANEL);
        acc.add(inner * (fu * wu));
    }
    acc.sum()
}

/// `∫₀ᵗ f(t − s') conj(H(s')) ds'`.
fn smooth_line<B: Fn(f64) -> Complex64>(hh: B, t: f64, noise: RefNoise) -> Complex64 {
    let q = Composite::new(ORDER);
    let lo = (t - noise.reach()).max(0.0);
    q.integrate(|s| noise.f(t - s) * hh(s).conj(), lo, t, PANEL)
}

/// Brute-force `d/dt E[X Y*]` at time `t` for unit-variance channels.
pub fn covariance_rate(x: &RefTerm, y: &RefTerm, t: f64, noise: RefNoise) -> Complex64 {
    let q = Composite::new(ORDER);
    let mut total = cx(0.0, 0.0);
    match noise {
        RefNoise::White => {
            // δ-correlated: E[X Y*] = ∫₀ᵗ G_X G_Y* ds
            if x.noise_inner {
                total += q.integrate(|s| x.weight_dt(s, t) * y.weight(s, t).conj(), x.dt_support(t), t, PANEL);
            }
            if y.noise_inner {
                total += q.integrate(|s| x.weight(s, t) * y.weight_dt(s, t).conj(), y.dt_support(t), t, PANEL);
            }
            total += x.weight(t, t) * y.weight(t, t).conj();
        }
        _ => {
            if x.noise_inner {
                total += smooth_cross(|s| x.weight_dt(s, t), |s| y.weight(s, t), x.dt_support(t), t, noise);
            } else {
                total += x.weight(t, t) * smooth_line(|s| y.weight(s, t), t, noise);
            }
            if y.noise_inner {
                total += smooth_cross(|s| y.weight_dt(s, t), |s| x.weight(s, t), y.dt_support(t), t, noise).conj();
            } else {
                total += y.weight(t, t).conj() * smooth_line(|s| x.weight(s, t), t, noise).conj();
            }
        }
    }
    total
}

/// `∫₀ᵗ∫₀^{t₁} e^{a t₁} e^{b t₂} dt₂ dt₁` by nested quadrature.
pub fn simplex_2d(a: Complex64, b: Complex64, t: f64) -> Complex64 {
    let q = Composite::new(20);
    let h = (t / 8.0).max(1e-3);
    q.integrate(|t1| (a * t1).exp() * q.integrate(|t2| (b * t2).exp(), 0.0, t1, h), 0.0, t, h)
}

/// `∫₀ᵗ e^{zx} f(x) dx` with the white δ counted with weight ½ at `x = 0`.
pub fn half_line_moment(z: Complex64, t: f64, noise: RefNoise) -> Complex64 {
    match noise {
        RefNoise::White => cx(0.5, 0.0),
        _ => Composite::new(20).integrate(|x| (z * x).exp() * noise.f(x), 0.0, t, 0.05),
    }
}

/// Deterministic pseudo-random numbers for parameter sweeps.
pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Self(seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407))
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let u = (self.0 >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }

    pub fn index(&mut self, n: usize) -> usize {
        (self.uniform(0.0, n as f64) as usize).min(n - 1)
    }
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}
