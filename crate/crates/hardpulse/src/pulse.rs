//! Hard and softened pulses, the ω ↔ μ ↔ γ maps, and two Bloch simulators.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Runge–Kutta substeps per hard-pulse step.
pub const DEFAULT_SUBSTEPS: usize = 64;

/// `Σ ωⱼ δ(t - jΔ)` for `j = start … start + len - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardPulse {
    delta: f64,
    start: i64,
    omegas: Vec<Complex64>,
}

impl HardPulse {
    /// Trims zero impulses from both ends.
    pub fn new(delta: f64, start: i64, omegas: Vec<Complex64>) -> Self {
        let first = omegas.iter().position(|w| *w != ZERO);
        let last = omegas.iter().rposition(|w| *w != ZERO);
        match (first, last) {
            (Some(a), Some(b)) => HardPulse {
                delta,
                start: start + a as i64,
                omegas: omegas[a..=b].to_vec(),
            },
            _ => HardPulse::zero(delta),
        }
    }

    pub fn zero(delta: f64) -> Self {
        HardPulse { delta, start: 0, omegas: Vec::new() }
    }

    /// Builds the pulse whose impulses have the given γⱼ.
    pub fn from_gammas(delta: f64, start: i64, gammas: &[Complex64]) -> Self {
        HardPulse::new(delta, start, gammas.iter().map(|&g| omega_of_gamma(g)).collect())
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    /// One past the last stored impulse.
    pub fn end(&self) -> i64 {
        self.start + self.omegas.len() as i64
    }

    pub fn omegas(&self) -> &[Complex64] {
        &self.omegas
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn omega(&self, j: i64) -> Complex64 {
        let i = j - self.start;
        if i < 0 || i >= self.omegas.len() as i64 {
            ZERO
        } else {
            self.omegas[i as usize]
        }
    }

    /// Smallest `ρ` with `ωⱼ = 0` for all `j ≥ ρ`; `None` for the zero pulse.
    pub fn rephasing_steps(&self) -> Option<i64> {
        if self.is_empty() {
            None
        } else {
            Some(self.end())
        }
    }

    /// Steps between the first and last nonzero impulse.
    pub fn duration(&self) -> usize {
        self.omegas.len().saturating_sub(1)
    }

    pub fn gammas(&self) -> Result<Vec<Complex64>> {
        self.omegas.iter().map(|&w| gamma_of_mu(mu_of_omega(w))).collect()
    }

    pub fn max_amplitude(&self) -> f64 {
        self.omegas.iter().map(|w| w.norm()).fold(0.0, f64::max) / self.delta
    }

    /// Energy of the softened pulse, `Δ⁻¹ Σ |ωⱼ|²`.
    pub fn energy(&self) -> f64 {
        self.omegas.iter().map(|w| w.norm_sqr()).sum::<f64>() / self.delta
    }
}

/// `μⱼ = -(i/2) ωⱼ*`
pub fn to_potential(p: &HardPulse) -> Vec<Complex64> {
    p.omegas().iter().map(|&w| mu_of_omega(w)).collect()
}

pub fn mu_of_omega(w: Complex64) -> Complex64 {
    Complex64::new(0.0, -0.5) * w.conj()
}

pub fn omega_of_mu(mu: Complex64) -> Complex64 {
    Complex64::new(0.0, -2.0) * mu.conj()
}

/// `γ = (μ/|μ|) tan|μ|`
pub fn gamma_of_mu(mu: Complex64) -> Result<Complex64> {
    let m = mu.norm();
    if m >= FRAC_PI_2 {
        return Err(Error::FlipAngleOverflow(m));
    }
    if m == 0.0 {
        return Ok(ZERO);
    }
    Ok(mu / m * m.tan())
}

/// `μ = (γ/|γ|) arctan|γ|`
pub fn mu_of_gamma(g: Complex64) -> Complex64 {
    let m = g.norm();
    if m == 0.0 {
        ZERO
    } else {
        g / m * m.atan()
    }
}

pub fn omega_of_gamma(g: Complex64) -> Complex64 {
    omega_of_mu(mu_of_gamma(g))
}

/// Piecewise-constant amplitude `ωⱼ/Δ` on `[jΔ, (j+1)Δ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftPulse {
    delta: f64,
    start: i64,
    amplitudes: Vec<Complex64>,
}

impl SoftPulse {
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

pub fn soften(p: &HardPulse) -> SoftPulse {
    SoftPulse {
        delta: p.delta,
        start: p.start,
        amplitudes: p.omegas.iter().map(|w| w / p.delta).collect(),
    }
}

/// `∫|ω(t)|² dt`
pub fn soft_energy(s: &SoftPulse) -> f64 {
    s.delta * s.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>()
}

/// Unit magnetization vectors on sorted frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MagnetizationProfile {
    pub freqs: Vec<f64>,
    pub vecs: Vec<[f64; 3]>,
}

impl MagnetizationProfile {
    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn transverse(&self) -> Vec<Complex64> {
        self.vecs.iter().map(|v| Complex64::new(v[0], v[1])).collect()
    }

    pub fn mz(&self) -> Vec<f64> {
        self.vecs.iter().map(|v| v[2]).collect()
    }

    /// Largest geodesic distance to another profile on the same frequencies.
    pub fn max_distance(&self, other: &MagnetizationProfile) -> f64 {
        self.vecs
            .iter()
            .zip(&other.vecs)
            .map(|(a, b)| geodesic(*a, *b))
            .fold(0.0, f64::max)
    }
}

/// Great-circle distance between unit vectors.
pub fn geodesic(u: [f64; 3], v: [f64; 3]) -> f64 {
    let c = cross(u, v);
    let s = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    s.atan2(dot(u, v))
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(a: f64, x: [f64; 3], y: [f64; 3]) -> [f64; 3] {
    [y[0] + a * x[0], y[1] + a * x[1], y[2] + a * x[2]]
}

/// Right-handed rotation of `v` about the unit axis `n` by `angle`.
fn rotate(v: [f64; 3], n: [f64; 3], angle: f64) -> [f64; 3] {
    let (s, c) = angle.sin_cos();
    let nxv = cross(n, v);
    let ndv = dot(n, v);
    [
        v[0] * c + nxv[0] * s + n[0] * ndv * (1.0 - c),
        v[1] * c + nxv[1] * s + n[1] * ndv * (1.0 - c),
        v[2] * c + nxv[2] * s + n[2] * ndv * (1.0 - c),
    ]
}

fn rotate_z(v: [f64; 3], angle: f64) -> [f64; 3] {
    let (s, c) = angle.sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]]
}

/// Integrates `dM/dt = Ω × M`, `Ω = [Re ω, Im ω, z]`, and derotates to the pulse end.
pub fn bloch_simulate(s: &SoftPulse, zs: &[f64]) -> MagnetizationProfile {
    bloch_simulate_with(s, zs, DEFAULT_SUBSTEPS).0
}

/// As [`bloch_simulate`] with a chosen substep count; also returns the largest norm drift.
pub fn bloch_simulate_with(s: &SoftPulse, zs: &[f64], substeps: usize) -> (MagnetizationProfile, f64) {
    let h = s.delta / substeps as f64;
    let t_end = (s.start + s.amplitudes.len() as i64) as f64 * s.delta;
    let mut drift = 0.0f64;
    let vecs = zs
        .iter()
        .map(|&z| {
            let mut m = [0.0, 0.0, 1.0];
            for a in &s.amplitudes {
                let om = [a.re, a.im, z];
                let f = |m: [f64; 3]| cross(om, m);
                for _ in 0..substeps {
                    let k1 = f(m);
                    let k2 = f(axpy(0.5 * h, k1, m));
                    let k3 = f(axpy(0.5 * h, k2, m));
                    let k4 = f(axpy(h, k3, m));
                    for i in 0..3 {
                        m[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                    }
                }
            }
            let n = norm(m);
            drift = drift.max((n - 1.0).abs());
            let m = rotate_z([m[0] / n, m[1] / n, m[2] / n], -z * t_end);
            m
        })
        .collect();
    (MagnetizationProfile { freqs: zs.to_vec(), vecs }, drift)
}

/// Exact hard-pulse recursion: rotate about `[Re ωⱼ, Im ωⱼ, 0]` by `|ωⱼ|`, precess by `Δz`.
pub fn hard_simulate(p: &HardPulse, zs: &[f64]) -> MagnetizationProfile {
    let vecs = zs
        .iter()
        .map(|&z| {
            let mut m = [0.0, 0.0, 1.0];
            for w in &p.omegas {
                let a = w.norm();
                if a > 0.0 {
                    m = rotate(m, [w.re / a, w.im / a, 0.0], a);
                }
                m = rotate_z(m, z * p.delta);
            }
            rotate_z(m, -z * p.delta * p.end() as f64)
        })
        .collect();
    MagnetizationProfile { freqs: zs.to_vec(), vecs }
}

/// Frequencies `z = θ/Δ` for `θ = 2πk/N`, `k = -N/2 … N/2-1`.
pub fn grid_frequencies(n: usize, delta: f64) -> Vec<f64> {
    let half = (n / 2) as i64;
    (-half..n as i64 - half)
        .map(|k| 2.0 * PI * k as f64 / n as f64 / delta)
        .collect()
}

/// [`hard_simulate`] on the `n`-point circle grid.
pub fn hard_simulate_grid(p: &HardPulse, n: usize) -> MagnetizationProfile {
    hard_simulate(p, &grid_frequencies(n, p.delta))
}

/// `(Δ|z|/2) Σ |ωⱼ|`
pub fn softening_error_bound(p: &HardPulse, z: f64) -> f64 {
    0.5 * p.delta * z.abs() * p.omegas.iter().map(|w| w.norm()).sum::<f64>()
}
