//! Reflection coefficients and `(a, b)` pairs from design goals.

pub mod remez;
pub mod ripple;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{BoundState, DiscreteScatteringData, ReducedBoundState, ReducedScatteringData};
use crate::pulse::MagnetizationProfile;
use crate::spectral::{analytic_completion, fft, outer_from_log_modulus, sample, Blaschke, CircleGrid, LaurentSeries, OuterFunction};

pub use remez::{minimax, Band, MinimaxFit};
pub use ripple::*;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn one() -> f64 {
    1.0
}

/// Single-slice equiripple target. Angles are in `θ = Δz`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquirippleSpec {
    pub rho: i64,
    pub tau: f64,
    #[serde(default)]
    pub delta1: Option<f64>,
    #[serde(default)]
    pub delta2: Option<f64>,
    pub band: [f64; 2],
    /// In-band value of the real target.
    #[serde(default = "one")]
    pub height: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdealProfileSpec {
    pub theta0: f64,
    pub z0: f64,
    pub c0: f64,
}

impl IdealProfileSpec {
    pub fn magnetization(&self, z: f64) -> [f64; 3] {
        if (z - self.z0).abs() < self.c0 {
            [0.0, self.theta0.sin(), self.theta0.cos()]
        } else {
            [0.0, 0.0, 1.0]
        }
    }

    pub fn profile(&self, freqs: &[f64]) -> MagnetizationProfile {
        MagnetizationProfile { freqs: freqs.to_vec(), vecs: freqs.iter().map(|&z| self.magnetization(z)).collect() }
    }
}

/// `r = (Mx + iMy)/(1 + Mz)` at each sample.
pub fn r_from_profile(m: &MagnetizationProfile) -> Result<Vec<Complex64>> {
    m.vecs
        .iter()
        .map(|v| {
            if v[2] <= -1.0 + 1e-9 {
                return Err(Error::FullInversionUnrepresentable(v[2]));
            }
            Ok(Complex64::new(v[0], v[1]) / (1.0 + v[2]))
        })
        .collect()
}

/// Analytic extension of `a` into the disk: Blaschke product times outer function.
#[derive(Debug, Clone)]
pub struct DiskA {
    pub blaschke: Blaschke,
    pub outer: OuterFunction,
}

impl DiskA {
    pub fn eval(&self, w: Complex64) -> Complex64 {
        self.blaschke.eval(w) * self.outer.eval(w)
    }

    pub fn derivative(&self, w: Complex64) -> Complex64 {
        self.blaschke.derivative(w) * self.outer.eval(w) + self.blaschke.eval(w) * self.outer.derivative(w)
    }
}

#[derive(Debug, Clone)]
pub struct AbPair {
    pub data: DiscreteScatteringData,
    pub a_samples: CircleGrid,
    pub b_samples: CircleGrid,
    pub disk: DiskA,
}

/// `a = ∏ Blaschke · exp(completion of -½log(1+|r|²))`, `b = r·a`, on an `n`-point grid.
pub fn ab_from_r(data: &ReducedScatteringData, n: usize) -> Result<AbPair> {
    let r = sample(&data.r, n)?;
    ab_from_r_samples(&r, &data.bound_states)
}

pub fn ab_from_r_samples(r: &CircleGrid, states: &[ReducedBoundState]) -> Result<AbPair> {
    if let Some(v) = r.values().iter().find(|v| !v.is_finite()) {
        return Err(Error::Invalid(format!("reflection coefficient not finite: {v}")));
    }
    let energies: Vec<Complex64> = states.iter().map(|s| s.w).collect();
    let blaschke = Blaschke::new(&energies)?;
    let log_mod: Vec<f64> = r.values().iter().map(|v| -0.5 * v.norm_sqr().ln_1p()).collect();
    let outer = outer_from_log_modulus(&log_mod)?;
    let disk = DiskA { blaschke, outer };
    let a_samples = disk.blaschke.sample(r.size())?.zip_map(disk.outer.samples(), |b, o| b * o);
    let b_samples = r.zip_map(&a_samples, |r, a| r * a);
    let bound_states = states
        .iter()
        .map(|s| BoundState { w: s.w, c_prime: s.c * disk.derivative(s.w) })
        .collect();
    let data = DiscreteScatteringData {
        a: a_samples.to_series(0),
        b: b_samples.to_series_centered(),
        bound_states,
    };
    Ok(AbPair { data, a_samples, b_samples, disk })
}

/// Left reduced data: `s = -b*/a` and `c̃ₖ = -1/(cₖ a′(wₖ)²)`.
pub fn left_data(data: &ReducedScatteringData, ab: &AbPair) -> Result<ReducedScatteringData> {
    let s = ab.b_samples.zip_map(&ab.a_samples, |b, a| -b.conj() / a);
    let bound_states = data
        .bound_states
        .iter()
        .map(|st| {
            let ap = ab.disk.derivative(st.w);
            if ap.norm() < 1e-12 {
                return Err(Error::IllConditionedBoundState(st.w));
            }
            Ok(ReducedBoundState { w: st.w, c: -1.0 / (st.c * ap * ap) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ReducedScatteringData { r: s.to_series_centered(), bound_states })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RippleReport {
    pub achieved_delta1: f64,
    pub achieved_delta2: f64,
    pub alternations: usize,
}

#[derive(Debug, Clone)]
pub struct EquirippleDesign {
    /// Real on the circle, coefficients supported in `[1-ρ, ρ-1]`.
    pub r: LaurentSeries,
    pub report: RippleReport,
    pub weight: f64,
}

/// Minimax fit of `height·χ_band` with weight ratio `δ₁/δ₂`, solved for whichever ripple is absent.
pub fn equiripple_fit(
    half_width: f64,
    tau: f64,
    height: f64,
    degree: usize,
    delta1: Option<f64>,
    delta2: Option<f64>,
) -> Result<(MinimaxFit, f64)> {
    if !(tau > 0.0) || half_width + tau >= PI {
        return Err(Error::Invalid(format!("transition {tau} does not fit beside half-width {half_width}")));
    }
    let fit_at = |k: f64| {
        minimax(
            &[
                Band { lo: 0.0, hi: half_width, target: height, weight: 1.0 },
                Band { lo: half_width + tau, hi: PI, target: 0.0, weight: k },
            ],
            degree,
        )
    };
    let (idx, target) = match (delta1, delta2) {
        (Some(d1), Some(d2)) => {
            if !(d1 > 0.0 && d2 > 0.0) {
                return Err(Error::Invalid("ripples must be positive".into()));
            }
            let k = d1 / d2;
            return Ok((fit_at(k)?, k));
        }
        (None, Some(d2)) => (1, d2),
        (Some(d1), None) => (0, d1),
        (None, None) => return Err(Error::Invalid("one of delta1, delta2 is required".into())),
    };
    if !(target > 0.0) {
        return Err(Error::Invalid("ripples must be positive".into()));
    }
    // the band error falls as u grows: u = ln K for the stopband, -ln K for the passband
    let dir = if idx == 1 { 1.0 } else { -1.0 };
    let fit_u = |u: f64| fit_at((dir * u).exp()).map(|f| (f.band_errors[idx] > target, f));
    let (mut u_bad, mut u_good);
    let mut good_fit;
    let (bad0, f0) = fit_u(0.0)?;
    if bad0 {
        u_bad = 0.0;
        u_good = 0.0;
        loop {
            u_good += 4f64.ln();
            let (bad, f) = fit_u(u_good)?;
            if !bad {
                good_fit = f;
                break;
            }
            u_bad = u_good;
            if u_good > 60.0 {
                return Err(Error::Invalid(format!("ripple target {target} unreachable")));
            }
        }
    } else {
        good_fit = f0;
        u_good = 0.0;
        u_bad = 0.0;
        loop {
            u_bad -= 4f64.ln();
            let (bad, f) = fit_u(u_bad)?;
            if bad || u_bad < -60.0 {
                break;
            }
            u_good = u_bad;
            good_fit = f;
        }
    }
    while u_good - u_bad > 1e-9 {
        let mid = 0.5 * (u_good + u_bad);
        let (bad, f) = fit_u(mid)?;
        if bad {
            u_bad = mid;
        } else {
            let done = target - f.band_errors[idx] <= 1e-7 * target;
            u_good = mid;
            good_fit = f;
            if done {
                break;
            }
        }
    }
    Ok((good_fit, (dir * u_good).exp()))
}

pub fn equiripple_r(spec: &EquirippleSpec) -> Result<EquirippleDesign> {
    if spec.rho < 1 {
        return Err(Error::Invalid(format!("rephasing steps must be positive, got {}", spec.rho)));
    }
    let [lo, hi] = spec.band;
    if lo <= -PI || hi >= PI {
        return Err(Error::Invalid("band must lie inside (-π, π)".into()));
    }
    if hi <= lo || spec.height == 0.0 {
        return Ok(EquirippleDesign {
            r: LaurentSeries::zero(),
            report: RippleReport { achieved_delta1: 0.0, achieved_delta2: 0.0, alternations: 0 },
            weight: 1.0,
        });
    }
    let centre = 0.5 * (lo + hi);
    let degree = (spec.rho - 1) as usize;
    let (fit, weight) = equiripple_fit(0.5 * (hi - lo), spec.tau, spec.height, degree, spec.delta1, spec.delta2)?;
    let r = if centre == 0.0 {
        fit.series.clone()
    } else {
        let s = &fit.series;
        LaurentSeries::from_fn(s.offset(), s.end(), |n| s.coeff(n) * Complex64::from_polar(1.0, -(n as f64) * centre))
    };
    Ok(EquirippleDesign {
        r,
        report: RippleReport {
            achieved_delta1: fit.band_errors[0],
            achieved_delta2: fit.band_errors[1],
            alternations: fit.alternations,
        },
        weight,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfRefocusedSpec {
    pub k1: f64,
    pub k2: f64,
    pub tau: f64,
    pub band: [f64; 2],
}

/// Zero count of `1 + e^L` inside a circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Winding {
    pub radius: f64,
    pub count: i64,
}

#[derive(Debug, Clone)]
pub struct SelfRefocused {
    pub data: ReducedScatteringData,
    pub samples: CircleGrid,
    /// `e^R/(1+e^R)` before the constant is removed.
    pub unshifted: CircleGrid,
    pub constant: Complex64,
    /// Taylor coefficients of `R`.
    pub log_coeffs: Vec<Complex64>,
    pub windings: Vec<Winding>,
}

pub const POLE_RADII: [f64; 11] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99];

fn taylor_eval(h: &[Complex64], w: Complex64) -> Complex64 {
    h.iter().rev().fold(ZERO, |acc, c| acc * w + c)
}

fn taylor_derivative(h: &[Complex64], w: Complex64) -> Complex64 {
    h.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(ZERO, |acc, (n, c)| acc * w + c * n as f64)
}

fn circle_values(h: &[Complex64], radius: f64, m: usize) -> Vec<Complex64> {
    let mut buf = vec![ZERO; m];
    let mut p = 1.0;
    for (k, c) in h.iter().enumerate() {
        buf[k % m] += c * p;
        p *= radius;
    }
    fft(&mut buf, true);
    buf
}

fn winding_of_one_plus_exp(h: &[Complex64], radius: f64, n: usize) -> i64 {
    let mut m = n.max(256);
    loop {
        let vals = circle_values(h, radius, m);
        let f: Vec<Complex64> = vals.iter().map(|l| ONE + l.exp()).collect();
        let mut total = 0.0;
        let mut worst = 0.0f64;
        for k in 0..m {
            let d = (f[(k + 1) % m] / f[k]).arg();
            worst = worst.max(d.abs());
            total += d;
        }
        if worst < 0.5 || m >= 16 * n {
            return (total / (2.0 * PI)).round() as i64;
        }
        m *= 2;
    }
}

fn newton_one_plus_exp(h: &[Complex64], mut w: Complex64) -> Option<Complex64> {
    for _ in 0..60 {
        let l = taylor_eval(h, w);
        let e = l.exp();
        let d = e * taylor_derivative(h, w);
        if d.norm() == 0.0 || !d.is_finite() {
            return None;
        }
        let step = (ONE + e) / d;
        w -= step;
        if !w.is_finite() || w.norm() >= 1.0 {
            return None;
        }
        if step.norm() < 1e-14 {
            return Some(w);
        }
    }
    let l = taylor_eval(h, w);
    ((ONE + l.exp()).norm() < 1e-10).then_some(w)
}

/// Zeros of `1 + e^{L(w)}` in the disk, from winding numbers on [`POLE_RADII`] and Newton refinement.
pub fn zeros_of_one_plus_exp(h: &[Complex64], n: usize) -> (Vec<Complex64>, Vec<Winding>) {
    let windings: Vec<Winding> = POLE_RADII
        .iter()
        .map(|&radius| Winding { radius, count: winding_of_one_plus_exp(h, radius, n) })
        .collect();
    let mut found: Vec<Complex64> = Vec::new();
    let mut inner = 0.0;
    let mut prev = 0;
    for wd in &windings {
        let want = (wd.count - prev).max(0) as usize;
        let mut here: Vec<Complex64> = Vec::new();
        let mut angles = 256;
        while here.len() < want && angles <= 4096 {
            let radial = 12;
            let mut seeds: Vec<(f64, Complex64)> = Vec::new();
            for i in 0..radial {
                let rad = inner + (wd.radius - inner) * (i as f64 + 0.5) / radial as f64;
                for k in 0..angles {
                    let w = Complex64::from_polar(rad, 2.0 * PI * k as f64 / angles as f64);
                    seeds.push(((ONE + taylor_eval(h, w).exp()).norm(), w));
                }
            }
            seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
            for &(_, s) in seeds.iter().take(64 * want.max(1)) {
                if here.len() >= want {
                    break;
                }
                if let Some(z) = newton_one_plus_exp(h, s) {
                    let r = z.norm();
                    let fresh = here.iter().chain(found.iter()).all(|y| (y - z).norm() > 1e-8);
                    if r >= inner && r < wd.radius && fresh {
                        here.push(z);
                    }
                }
            }
            angles *= 4;
        }
        found.extend(here);
        prev = wd.count;
        inner = wd.radius;
    }
    (found, windings)
}

fn band_distance(theta: f64, lo: f64, hi: f64) -> f64 {
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut d = (theta - centre).rem_euclid(2.0 * PI);
    if d > PI {
        d = 2.0 * PI - d;
    }
    (d - half).max(0.0)
}

/// `r = e^R/(1+e^R) - e^{R(0)}/(1+e^{R(0)})` with `Re R = k₁` in band, `-k₂` beyond a raised-cosine ramp.
pub fn self_refocused_r(spec: &SelfRefocusedSpec, n: usize) -> Result<SelfRefocused> {
    let [lo, hi] = spec.band;
    if !(spec.tau > 0.0) || hi < lo {
        return Err(Error::Invalid("self-refocused band needs lo ≤ hi and a positive transition".into()));
    }
    let (k1, k2, tau) = (spec.k1, spec.k2, spec.tau);
    let re: Vec<f64> = (0..n)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n as f64;
            let d = band_distance(theta, lo, hi);
            if d == 0.0 {
                k1
            } else if d >= tau {
                -k2
            } else {
                k1 - (k1 + k2) * 0.5 * (1.0 - (PI * d / tau).cos())
            }
        })
        .collect();
    let h = analytic_completion(&re)?;
    let rvals = circle_values(&h, 1.0, n);
    let logistic = |l: Complex64| {
        let e = l.exp();
        if e.norm() > 1e300 {
            ONE
        } else {
            e / (ONE + e)
        }
    };
    let unshifted = CircleGrid::new(rvals.iter().map(|&l| logistic(l)).collect())?;
    let constant = logistic(h[0]);
    let samples = unshifted.map(|v| v - constant);
    let (poles, windings) = zeros_of_one_plus_exp(&h, n);
    let bound_states = poles
        .iter()
        .map(|&w| ReducedBoundState { w, c: 1.0 / taylor_derivative(&h, w) })
        .collect();
    Ok(SelfRefocused {
        data: ReducedScatteringData::new(samples.to_series_centered(), bound_states),
        samples,
        unshifted,
        constant,
        log_coeffs: h,
        windings,
    })
}

#[derive(Debug, Clone)]
pub struct HalfPulse {
    pub data: ReducedScatteringData,
    pub samples: CircleGrid,
    /// `R` with `|R| = √((1-Mx)/(1+Mx))`.
    pub outer: OuterFunction,
    pub windings: Vec<Winding>,
}

/// `r = (1-R)/(1+R)` so that `2Re r/(1+|r|²) = Mx` on the grid.
pub fn half_pulse_r(mx: &[f64]) -> Result<HalfPulse> {
    if let Some(&x) = mx.iter().find(|x| !(x.abs() < 1.0)) {
        return Err(Error::InfeasibleHalfPulse(x));
    }
    let log_mod: Vec<f64> = mx.iter().map(|&x| 0.5 * ((1.0 - x) / (1.0 + x)).ln()).collect();
    let outer = outer_from_log_modulus(&log_mod)?;
    let samples = outer.samples().map(|r| (ONE - r) / (ONE + r));
    let (poles, windings) = zeros_of_one_plus_exp(outer.log_coeffs(), mx.len());
    let bound_states = poles
        .iter()
        .map(|&w| ReducedBoundState { w, c: -2.0 / taylor_derivative(outer.log_coeffs(), w) })
        .collect();
    Ok(HalfPulse {
        data: ReducedScatteringData::new(samples.to_series_centered(), bound_states),
        samples,
        outer,
        windings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::profile_from_r;
    use crate::spectral::grid_points;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit(v: [f64; 3]) -> [f64; 3] {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        [v[0] / n, v[1] / n, v[2] / n]
    }

    #[test]
    fn equilibrium_and_half_angle() {
        let th: f64 = 0.7;
        let m = MagnetizationProfile { freqs: vec![0.0, 1.0], vecs: vec![[0.0, 0.0, 1.0], [0.0, th.sin(), th.cos()]] };
        let r = r_from_profile(&m).unwrap();
        assert_eq!(r[0], ZERO);
        assert!((r[1] - c(0.0, (th / 2.0).tan())).norm() < 1e-15);
    }

    #[test]
    fn full_inversion_rejected() {
        let m = MagnetizationProfile { freqs: vec![0.0], vecs: vec![[0.0, 0.0, -1.0]] };
        assert!(matches!(r_from_profile(&m), Err(Error::FullInversionUnrepresentable(_))));
    }

    #[test]
    fn ideal_profile_inside_and_outside() {
        let s = IdealProfileSpec { theta0: PI / 2.0, z0: 1.0, c0: 0.5 };
        assert_eq!(s.magnetization(3.0), [0.0, 0.0, 1.0]);
        let m = s.magnetization(1.2);
        assert!((m[1] - 1.0).abs() < 1e-15 && m[2].abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn profile_round_trip(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -0.9f64..1.0) {
            let v = unit([x, y, z]);
            prop_assume!(v[2] > -0.9);
            let m = MagnetizationProfile { freqs: vec![0.0], vecs: vec![v] };
            let r = r_from_profile(&m).unwrap();
            let back = profile_from_r(&r, &[0.0]);
            for i in 0..3 {
                prop_assert!((back.vecs[0][i] - v[i]).abs() < 1e-12);
            }
            let again = r_from_profile(&back).unwrap();
            prop_assert!((again[0] - r[0]).norm() < 1e-12 * (1.0 + r[0].norm()));
        }
    }

    #[test]
    fn zero_reflection_gives_identity_pair() {
        let ab = ab_from_r(&ReducedScatteringData::new(LaurentSeries::zero(), vec![]), 64).unwrap();
        assert!(ab.data.a.max_abs_diff(&LaurentSeries::constant(ONE)) < 1e-14);
        assert!(ab.data.b.max_abs_coeff() < 1e-15);
    }

    #[test]
    fn zero_reflection_with_bound_state_is_blaschke() {
        let w1 = c(0.5, 0.0);
        let d = ReducedScatteringData::new(LaurentSeries::zero(), vec![ReducedBoundState { w: w1, c: ONE }]);
        let ab = ab_from_r(&d, 64).unwrap();
        let bl = Blaschke::new(&[w1]).unwrap();
        for w in [c(0.3, 0.2), c(-0.6, 0.1), ZERO] {
            assert!((ab.disk.eval(w) - bl.eval(w)).norm() < 1e-14);
        }
        assert!(ab.data.b.max_abs_coeff() < 1e-15);
        assert!(ab.disk.eval(w1).norm() < 1e-15);
    }

    #[test]
    fn unit_reflection_has_constant_modulus() {
        let d = ReducedScatteringData::new(LaurentSeries::constant(ONE), vec![]);
        let ab = ab_from_r(&d, 64).unwrap();
        for a in ab.a_samples.values() {
            assert!((a - c(0.5f64.sqrt(), 0.0)).norm() < 1e-14);
        }
    }

    fn bumpy_data() -> ReducedScatteringData {
        let r = LaurentSeries::new(-3, vec![c(0.1, 0.05), c(-0.2, 0.1), c(0.3, 0.0), c(0.4, -0.2), c(0.0, 0.25), c(0.1, 0.0)]);
        ReducedScatteringData::new(
            r,
            vec![
                ReducedBoundState { w: c(0.4, 0.3), c: c(0.2, -0.1) },
                ReducedBoundState { w: c(-0.5, -0.1), c: c(-0.3, 0.4) },
            ],
        )
    }

    #[test]
    fn ab_pair_is_unitary_and_reproduces_r() {
        let d = bumpy_data();
        let ab = ab_from_r(&d, 1024).unwrap();
        let r = sample(&d.r, 1024).unwrap();
        for ((a, b), r) in ab.a_samples.values().iter().zip(ab.b_samples.values()).zip(r.values()) {
            assert!((a.norm_sqr() + b.norm_sqr() - 1.0).abs() < 1e-9);
            assert!((b / a - r).norm() < 1e-9);
        }
        for s in &d.bound_states {
            assert!(ab.disk.eval(s.w).norm() < 1e-8);
            assert!(ab.data.a.eval(s.w).norm() < 1e-8);
        }
        assert!(ab.disk.eval(ZERO).im.abs() < 1e-14 && ab.disk.eval(ZERO).re > 0.0);
        let roots = crate::poly::roots(ab.data.a.trimmed(1e-14).coeffs());
        let inside: Vec<_> = roots.into_iter().filter(|z| z.norm() < 0.95).collect();
        assert_eq!(inside.len(), 2);
    }

    #[test]
    fn left_constants_invert_right() {
        let d = bumpy_data();
        let ab = ab_from_r(&d, 1024).unwrap();
        let left = left_data(&d, &ab).unwrap();
        for (l, r) in left.bound_states.iter().zip(&d.bound_states) {
            let ap = ab.disk.derivative(r.w);
            assert!((l.c * r.c * ap * ap + 1.0).norm() < 1e-12);
        }
        let s = sample(&left.r, 1024).unwrap();
        let r = sample(&d.r, 1024).unwrap();
        for (s, r) in s.values().iter().zip(r.values()) {
            assert!((s.norm() - r.norm()).abs() < 1e-9);
        }
    }

    #[test]
    fn left_data_of_zero_is_zero() {
        let d = ReducedScatteringData::new(LaurentSeries::zero(), vec![]);
        let ab = ab_from_r(&d, 32).unwrap();
        assert!(left_data(&d, &ab).unwrap().r.max_abs_coeff() < 1e-15);
    }

    #[test]
    fn symmetric_real_r_keeps_modulus() {
        let d = ReducedScatteringData::new(LaurentSeries::new(-1, vec![c(0.2, 0.0), c(0.5, 0.0), c(0.2, 0.0)]), vec![]);
        let ab = ab_from_r(&d, 256).unwrap();
        let s = sample(&left_data(&d, &ab).unwrap().r, 256).unwrap();
        let r = sample(&d.r, 256).unwrap();
        for (s, r) in s.values().iter().zip(r.values()) {
            assert!((s.norm() - r.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn equiripple_meets_targets() {
        let spec = EquirippleSpec { rho: 30, tau: 0.4, delta1: None, delta2: Some(0.01), band: [-0.3, 0.3], height: 1.0 };
        let d = equiripple_r(&spec).unwrap();
        assert!((d.report.achieved_delta2 - 0.01).abs() < 1e-6);
        assert!(d.report.alternations >= 31, "{}", d.report.alternations);
        let (lo, hi) = d.r.support().unwrap();
        assert!(lo >= -29 && hi <= 29);
        for k in 0..=d.r.end() {
            assert!((d.r.coeff(k) - d.r.coeff(-k).conj()).norm() < 1e-15);
        }
        for w in grid_points(512) {
            assert!(d.r.eval(w).im.abs() < 1e-12);
        }
    }

    #[test]
    fn equiripple_loose_targets_met() {
        let spec = EquirippleSpec { rho: 60, tau: 0.6, delta1: Some(0.05), delta2: Some(0.05), band: [-0.4, 0.4], height: 1.0 };
        let d = equiripple_r(&spec).unwrap();
        assert!(d.report.achieved_delta1 <= 0.05 && d.report.achieved_delta2 <= 0.05);
    }

    #[test]
    fn equiripple_solves_for_stopband() {
        let spec = EquirippleSpec { rho: 20, tau: 0.5, delta1: Some(0.02), delta2: None, band: [-0.3, 0.3], height: 1.0 };
        let d = equiripple_r(&spec).unwrap();
        assert!((d.report.achieved_delta1 - 0.02).abs() < 1e-6);
    }

    #[test]
    fn empty_band_is_zero() {
        let spec = EquirippleSpec { rho: 5, tau: 0.2, delta1: Some(0.1), delta2: None, band: [0.0, 0.0], height: 1.0 };
        assert!(equiripple_r(&spec).unwrap().r.is_zero());
    }

    #[test]
    fn offset_band_shifts_passband() {
        let spec = EquirippleSpec { rho: 25, tau: 0.4, delta1: Some(0.05), delta2: Some(0.05), band: [0.5, 1.1], height: 1.0 };
        let d = equiripple_r(&spec).unwrap();
        let inband = d.r.eval(Complex64::from_polar(1.0, 0.8));
        assert!((inband.norm() - 1.0).abs() <= d.report.achieved_delta1 + 1e-9);
        assert!(d.r.eval(Complex64::from_polar(1.0, -0.8)).norm() <= d.report.achieved_delta2 + 1e-9);
    }

    #[test]
    fn self_refocused_trivial_limit() {
        let s = self_refocused_r(&SelfRefocusedSpec { k1: 0.0, k2: 0.0, tau: 0.2, band: [-0.1, 0.1] }, 256).unwrap();
        for v in s.unshifted.values() {
            assert!((v - c(0.5, 0.0)).norm() < 1e-15);
        }
        assert!((s.constant - c(0.5, 0.0)).norm() < 1e-15);
        assert!(s.data.bound_states.is_empty());
    }

    #[test]
    fn self_refocused_ripple_bounds() {
        let spec = SelfRefocusedSpec { k1: 5.0, k2: 5.0, tau: 0.02, band: [-0.01, 0.01] };
        let n = 1 << 14;
        let s = self_refocused_r(&spec, n).unwrap();
        let mut worst_in = 0.0f64;
        let mut worst_out = 0.0f64;
        for (k, v) in s.samples.values().iter().enumerate() {
            let th = 2.0 * PI * k as f64 / n as f64;
            let d = band_distance(th, -0.01, 0.01);
            if d == 0.0 {
                worst_in = worst_in.max((v - ONE).norm());
            } else if d >= 0.02 {
                worst_out = worst_out.max(v.norm());
            }
        }
        assert!(worst_in < 0.014, "in band {worst_in}");
        assert!(worst_out < 0.014, "out of band {worst_out}");
    }

    #[test]
    fn self_refocused_poles_are_residues() {
        let spec = SelfRefocusedSpec { k1: 4.0, k2: 4.0, tau: 0.3, band: [-0.4, 0.4] };
        let s = self_refocused_r(&spec, 4096).unwrap();
        let total = s.windings.last().unwrap().count as usize;
        assert_eq!(s.data.bound_states.len(), total);
        for b in &s.data.bound_states {
            let l = taylor_eval(&s.log_coeffs, b.w);
            assert!((ONE + l.exp()).norm() < 1e-10);
            let eps = 1e-6;
            let w = b.w + eps;
            let le = taylor_eval(&s.log_coeffs, w).exp();
            let res = le / (ONE + le) * eps;
            assert!((res - b.c).norm() < 1e-4 * b.c.norm().max(1.0));
        }
    }

    #[test]
    fn half_pulse_identity() {
        let n = 1024;
        let mx: Vec<f64> = (0..n)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / n as f64;
                let d = if th > PI { 2.0 * PI - th } else { th };
                0.9 * (-(d / 0.3).powi(2)).exp()
            })
            .collect();
        let h = half_pulse_r(&mx).unwrap();
        for (r, m) in h.samples.values().iter().zip(&mx) {
            assert!((2.0 * r.re / (1.0 + r.norm_sqr()) - m).abs() < 1e-8);
        }
        assert!(h.data.bound_states.is_empty());
        assert_eq!(h.windings.last().unwrap().count, 0);
    }

    #[test]
    fn half_pulse_zero_and_limits() {
        let h = half_pulse_r(&vec![0.0; 64]).unwrap();
        for r in h.samples.values() {
            assert!(r.re.abs() < 1e-15);
        }
        let h = half_pulse_r(&vec![1.0 - 1e-12; 64]).unwrap();
        for r in h.samples.values() {
            assert!((r - ONE).norm() < 1e-5);
        }
        assert!(matches!(half_pulse_r(&[0.2, 1.0]), Err(Error::InfeasibleHalfPulse(_))));
    }
}
