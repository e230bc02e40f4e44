//! Continuum reduced scattering data to discrete reduced scattering data.
//!
//! With `r(ξ) = (1/2π)∫ r̂(t) e^{iξt} dt` and `w = e^{2iξΔ}`, the Riemann sum of the
//! Fourier integral becomes the Laurent series `r̃(w) = (Δ/π) Σ r̂(2nΔ) w^{n+1}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{ReducedBoundState, ReducedScatteringData};
use crate::spectral::LaurentSeries;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuumScatteringData {
    pub delta: f64,
    /// `r̂(2nΔ)` for `n = r_hat_start_index, …`.
    pub r_hat: Vec<Complex64>,
    pub r_hat_start_index: i64,
    /// Bound-state energies `ξₖ` in the upper half plane.
    pub energies: Vec<Complex64>,
    /// Right norming constants `Cₖ`.
    pub constants: Vec<Complex64>,
}

impl ContinuumScatteringData {
    /// Samples `r̂` at `2nΔ` for `n ∈ [lo, hi]` from a closure.
    pub fn from_r_hat(
        delta: f64,
        lo: i64,
        hi: i64,
        r_hat: impl Fn(f64) -> Complex64,
        energies: Vec<Complex64>,
        constants: Vec<Complex64>,
    ) -> Self {
        let r_hat = (lo..=hi).map(|n| r_hat(2.0 * n as f64 * delta)).collect();
        ContinuumScatteringData { delta, r_hat, r_hat_start_index: lo, energies, constants }
    }
}

/// `w = e^{2iξΔ}`.
pub fn energy_to_disk(xi: Complex64, delta: f64) -> Complex64 {
    (Complex64::new(0.0, 2.0 * delta) * xi).exp()
}

/// Discrete data: `r̃ₙ = (Δ/π) r̂(2(n-1)Δ)`, `wₖ = e^{2iξₖΔ}`, `cₖ = 2Δi wₖ² Cₖ`.
pub fn discretize(data: &ContinuumScatteringData) -> Result<ReducedScatteringData> {
    if !(data.delta > 0.0) {
        return Err(Error::Invalid(format!("step must be positive, got {}", data.delta)));
    }
    if data.energies.len() != data.constants.len() {
        return Err(Error::Invalid("energies and constants differ in length".into()));
    }
    let scale = data.delta / PI;
    let r = LaurentSeries::new(data.r_hat_start_index + 1, data.r_hat.iter().map(|v| v * scale).collect());
    let bound_states = data
        .energies
        .iter()
        .zip(&data.constants)
        .map(|(&xi, &cc)| {
            if !(xi.im > 0.0) {
                return Err(Error::EnergyNotInUpperHalfPlane(xi));
            }
            let w = energy_to_disk(xi, data.delta);
            Ok(ReducedBoundState { w, c: Complex64::new(0.0, 2.0 * data.delta) * w * w * cc })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ReducedScatteringData::new(r, bound_states))
}

/// `E = (4/π)∫log(1+|r|²)dξ + 16 Σ Im ξₖ`, trapezoid on the given samples.
pub fn continuum_energy(xi: &[f64], r: &[Complex64], energies: &[Complex64]) -> f64 {
    let f: Vec<f64> = r.iter().map(|v| v.norm_sqr().ln_1p()).collect();
    let integral: f64 = xi
        .windows(2)
        .zip(f.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum();
    4.0 / PI * integral + 16.0 * energies.iter().map(|e| e.im).sum::<f64>()
}

/// `r̂(t) = ∫ r(ξ) e^{-iξt} dξ` at `t = 2nΔ`, `n ∈ [lo, hi]`, from uniform samples on `[-L, L]`
/// tapered by a Hann window.
pub fn r_hat_from_samples(xi: &[f64], r: &[Complex64], delta: f64, lo: i64, hi: i64) -> Vec<Complex64> {
    let len = xi.len();
    if len < 2 {
        return vec![Complex64::new(0.0, 0.0); (hi - lo + 1).max(0) as usize];
    }
    let (a, b) = (xi[0], xi[len - 1]);
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let h = (b - a) / (len - 1) as f64;
    let windowed: Vec<Complex64> = xi
        .iter()
        .zip(r)
        .map(|(&x, &v)| v * (0.5 * PI * (x - centre) / half).cos().powi(2))
        .collect();
    (lo..=hi)
        .map(|n| {
            let t = 2.0 * n as f64 * delta;
            xi.iter()
                .zip(&windowed)
                .enumerate()
                .map(|(i, (&x, &v))| {
                    let wt = if i == 0 || i == len - 1 { 0.5 } else { 1.0 };
                    v * Complex64::from_polar(wt * h, -x * t)
                })
                .sum()
        })
        .collect()
}
