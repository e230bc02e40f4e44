//! Forward discrete scattering: pulse to Jost solutions, `(a, b)`, reflection coefficient and bound states.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;
use crate::pulse::{HardPulse, MagnetizationProfile};
use crate::spectral::{grid_for, sample, CircleGrid, LaurentSeries, TOL_BOUNDARY};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Distance below which two disk zeros count as a repeated root.
pub const SIMPLE_ZERO_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
}

/// Jost solution `(A±,ⱼ, B±,ⱼ)` at step `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct JostPair {
    pub side: Side,
    pub j: i64,
    pub a: LaurentSeries,
    pub b: LaurentSeries,
}

/// Energy `w` with the right norming constant `c′`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub w: Complex64,
    pub c_prime: Complex64,
}

/// Energy `w` with the reduced norming constant `c = c′/a′(w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedBoundState {
    pub w: Complex64,
    pub c: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteScatteringData {
    pub a: LaurentSeries,
    pub b: LaurentSeries,
    pub bound_states: Vec<BoundState>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedScatteringData {
    pub r: LaurentSeries,
    pub bound_states: Vec<ReducedBoundState>,
}

impl ReducedScatteringData {
    pub fn new(r: LaurentSeries, bound_states: Vec<ReducedBoundState>) -> Self {
        ReducedScatteringData { r, bound_states }
    }

    pub fn energies(&self) -> Vec<Complex64> {
        self.bound_states.iter().map(|s| s.w).collect()
    }
}

fn step_constant(g: Complex64) -> f64 {
    (1.0 + g.norm_sqr()).sqrt().recip()
}

/// One minus-side step on polynomial coefficient vectors, `B` holding `w·(…)`.
fn minus_step(a: &mut Vec<Complex64>, b: &mut Vec<Complex64>, g: Complex64) {
    let c = step_constant(g);
    let n = a.len().max(b.len());
    a.resize(n, ZERO);
    b.resize(n, ZERO);
    let mut nb = vec![ZERO; n + 1];
    for i in 0..n {
        let (ai, bi) = (a[i], b[i]);
        a[i] = c * (ai + g * bi);
        nb[i + 1] = c * (bi - g.conj() * ai);
    }
    *b = nb;
}

fn trimmed_poly(mut p: Vec<Complex64>) -> Vec<Complex64> {
    while p.len() > 1 && p.last() == Some(&ZERO) {
        p.pop();
    }
    p
}

/// `(a, b)` of a finite pulse by the exact polynomial recursion.
pub fn forward_scatter(p: &HardPulse) -> Result<DiscreteScatteringData> {
    let gammas = p.gammas()?;
    let mut a = vec![ONE];
    let mut b = vec![ZERO];
    for &g in &gammas {
        minus_step(&mut a, &mut b, g);
    }
    let end = if p.is_empty() { 0 } else { p.end() };
    let b = if p.is_empty() {
        LaurentSeries::zero()
    } else {
        LaurentSeries::new(-end, b)
    };
    Ok(DiscreteScatteringData {
        a: LaurentSeries::polynomial(&trimmed_poly(a)),
        b: b.trimmed(0.0),
        bound_states: Vec::new(),
    })
}

/// Minus-side Jost solution at step `j`.
pub fn jost_minus(p: &HardPulse, j: i64) -> Result<JostPair> {
    let gammas = p.gammas()?;
    let mut a = vec![ONE];
    let mut b = vec![ZERO];
    let first = p.start();
    let stop = j.min(p.end());
    for k in first..stop {
        minus_step(&mut a, &mut b, gammas[(k - first) as usize]);
    }
    let reached = stop.max(first);
    let b = LaurentSeries::polynomial(&b).shift(j - reached);
    Ok(JostPair {
        side: Side::Minus,
        j,
        a: LaurentSeries::polynomial(&trimmed_poly(a)),
        b: b.trimmed(0.0),
    })
}

/// Plus-side Jost solution at step `j`, built backwards from `(1, 0)` past the pulse.
pub fn jost_plus(p: &HardPulse, j: i64) -> Result<JostPair> {
    let gammas = p.gammas()?;
    // A₊* and B₊* are polynomials in w; iterate on their coefficients.
    let mut ac = vec![ONE];
    let mut bc = vec![ZERO];
    let last = p.end();
    let stop = j.max(p.start());
    let mut k = last - 1;
    while k >= stop {
        let g = gammas[(k - p.start()) as usize];
        let c = step_constant(g);
        let n = ac.len().max(bc.len()) + 1;
        ac.resize(n, ZERO);
        bc.resize(n, ZERO);
        let mut na = vec![ZERO; n];
        let mut nb = vec![ZERO; n];
        for i in 0..n {
            let shifted = if i == 0 { ZERO } else { bc[i - 1] };
            na[i] = c * (ac[i] - g.conj() * shifted);
            nb[i] = c * (g * ac[i] + shifted);
        }
        ac = na;
        bc = nb;
        k -= 1;
    }
    let reached = stop.min(last);
    let a_star = LaurentSeries::polynomial(&trimmed_poly(ac));
    let b_star = LaurentSeries::polynomial(&trimmed_poly(bc)).shift(reached - j);
    Ok(JostPair {
        side: Side::Plus,
        j,
        a: a_star.conj_circle().trimmed(0.0),
        b: b_star.conj_circle().trimmed(0.0),
    })
}

/// `M = [2Re r, 2Im r, 1 - |r|²]/(1 + |r|²)` at each sample.
pub fn profile_from_r(r: &[Complex64], freqs: &[f64]) -> MagnetizationProfile {
    let vecs = r
        .iter()
        .map(|r| {
            let d = 1.0 + r.norm_sqr();
            [2.0 * r.re / d, 2.0 * r.im / d, (1.0 - r.norm_sqr()) / d]
        })
        .collect();
    MagnetizationProfile { freqs: freqs.to_vec(), vecs }
}

/// Profile from `(a, b)` at `w = e^{iΔz}`, stable where `|r|` is large.
pub fn scattering_profile(data: &DiscreteScatteringData, delta: f64, freqs: &[f64]) -> MagnetizationProfile {
    let vecs = freqs
        .iter()
        .map(|&z| {
            let w = Complex64::from_polar(1.0, z * delta);
            let a = data.a.eval(w);
            let b = data.b.eval(w);
            let s = a.norm_sqr() + b.norm_sqr();
            let m = 2.0 * b * a.conj() / s;
            [m.re, m.im, (a.norm_sqr() - b.norm_sqr()) / s]
        })
        .collect();
    MagnetizationProfile { freqs: freqs.to_vec(), vecs }
}

/// `r = b/a` on the `n`-point grid.
pub fn reflection_samples(data: &DiscreteScatteringData, n: usize) -> Result<CircleGrid> {
    let a = sample(&data.a, n)?;
    let b = sample(&data.b, n)?;
    Ok(b.zip_map(&a, |b, a| b / a))
}

/// Largest `||a|² + |b|² - 1|` on the grid.
pub fn unitarity_defect(data: &DiscreteScatteringData, n: usize) -> Result<f64> {
    let a = sample(&data.a, n)?;
    let b = sample(&data.b, n)?;
    Ok(a.values()
        .iter()
        .zip(b.values())
        .map(|(a, b)| (a.norm_sqr() + b.norm_sqr() - 1.0).abs())
        .fold(0.0, f64::max))
}

/// Disk zeros of `a` split into accepted energies and near-boundary roots.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundStateScan {
    pub states: Vec<BoundState>,
    pub near_boundary: Vec<Complex64>,
}

/// `c′` from the Jost solutions at step `j`, using whichever of the two equivalent quotients is better conditioned.
pub fn norming_constant(p: &HardPulse, w: Complex64, j: i64) -> Result<Complex64> {
    let m = jost_minus(p, j)?;
    let pl = jost_plus(p, j)?;
    let wj = w.powi(j as i32);
    let d1 = -pl.b.conj_circle().eval(w) * wj;
    let d2 = pl.a.conj_circle().eval(w) * wj;
    Ok(if d1.norm() >= d2.norm() {
        m.a.eval(w) / d1
    } else {
        m.b.eval(w) / d2
    })
}

pub fn scan_bound_states(p: &HardPulse) -> Result<BoundStateScan> {
    let data = forward_scatter(p)?;
    let roots = poly::disk_roots(data.a.coeffs());
    let mut inside = Vec::new();
    let mut near_boundary = Vec::new();
    for z in roots {
        let r = z.norm();
        if r < 1.0 - TOL_BOUNDARY {
            inside.push(z);
        } else if r <= 1.0 {
            near_boundary.push(z);
        }
    }
    for (i, &x) in inside.iter().enumerate() {
        for &y in &inside[i + 1..] {
            if (x - y).norm() < SIMPLE_ZERO_TOL {
                return Err(Error::NonSimpleZero(x, y));
            }
        }
    }
    let states = inside
        .into_iter()
        .map(|w| Ok(BoundState { w, c_prime: norming_constant(p, w, 0)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundStateScan { states, near_boundary })
}

/// Energies and right norming constants of a finite pulse.
pub fn find_bound_states(p: &HardPulse) -> Result<Vec<BoundState>> {
    Ok(scan_bound_states(p)?.states)
}

/// `(a, b)` together with the bound states.
pub fn scattering_data(p: &HardPulse) -> Result<DiscreteScatteringData> {
    let mut data = forward_scatter(p)?;
    data.bound_states = find_bound_states(p)?;
    Ok(data)
}

/// Reduced data `(r; wₖ, cₖ)` with `r` expanded from an `n`-point grid.
pub fn reduced_data(data: &DiscreteScatteringData, n: usize) -> Result<ReducedScatteringData> {
    let r = reflection_samples(data, n)?.to_series_centered();
    let bound_states = data
        .bound_states
        .iter()
        .map(|s| ReducedBoundState { w: s.w, c: s.c_prime / data.a.eval_derivative(s.w) })
        .collect();
    Ok(ReducedScatteringData { r, bound_states })
}

/// `Σ log(1+|γⱼ|²)` and `(1/2π)∫log(1+|r|²) - 2Σ log|wₖ|` by the trapezoid rule on `n` points.
pub fn energy_terms(p: &HardPulse, data: &DiscreteScatteringData, n: usize) -> Result<(f64, f64)> {
    let lhs: f64 = p.gammas()?.iter().map(|g| g.norm_sqr().ln_1p()).sum();
    let soliton: f64 = data.bound_states.iter().map(|s| -2.0 * s.w.norm().ln()).sum();
    Ok((lhs, log_ratio_mean(data, n)? + soliton))
}

fn log_ratio_mean(data: &DiscreteScatteringData, n: usize) -> Result<f64> {
    let a = sample(&data.a, n)?;
    let b = sample(&data.b, n)?;
    Ok(a.values()
        .iter()
        .zip(b.values())
        .map(|(a, b)| (a.norm_sqr() + b.norm_sqr()).ln() - a.norm_sqr().ln())
        .sum::<f64>()
        / n as f64)
}

/// Trapezoid grid fine enough for `log|a|²`: at least 4096 points and `≥ 32/dist` where `dist` is
/// the gap between the circle and the nearest zero of `a`. Past 512 coefficients the zeros are not
/// computed; the grid doubles from four times the width until the mean settles to `1e-13`.
pub fn energy_grid(data: &DiscreteScatteringData) -> usize {
    let width = data.a.width().max(data.b.width());
    if width <= 512 {
        let gap = poly::roots(data.a.coeffs())
            .iter()
            .map(|z| (1.0 - z.norm()).abs())
            .fold(1.0, f64::min)
            .max(1e-6);
        return ((32.0 / gap).ceil() as usize).next_power_of_two().clamp(4096, 1 << 24);
    }
    let mut n = grid_for(4 * width).max(4096);
    let Ok(mut prev) = log_ratio_mean(data, n) else { return n };
    while n < 1 << 24 {
        let Ok(next) = log_ratio_mean(data, 2 * n) else { break };
        n *= 2;
        if (next - prev).abs() <= 1e-13 * prev.abs().max(1.0) {
            break;
        }
        prev = next;
    }
    n
}

/// `|LHS - RHS|` of the discrete energy identity on [`energy_grid`].
pub fn energy_residual(p: &HardPulse, data: &DiscreteScatteringData) -> Result<f64> {
    let (l, r) = energy_terms(p, data, energy_grid(data))?;
    Ok((l - r).abs())
}

/// `μⱼ → -μ*₋ⱼ`, equivalently `ω'ᵢ = conj(ω₋ᵢ)`.
pub fn time_reverse(p: &HardPulse) -> HardPulse {
    if p.is_empty() {
        return p.clone();
    }
    let omegas = p.omegas().iter().rev().map(|w| w.conj()).collect();
    HardPulse::new(p.delta(), -(p.end() - 1), omegas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::{grid_frequencies, hard_simulate};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pulse_strategy(max_len: usize, amp: f64) -> impl Strategy<Value = HardPulse> {
        (-10i64..10, prop::collection::vec((0.0f64..amp, 0.0f64..6.3), 1..max_len)).prop_map(|(s, v)| {
            HardPulse::new(0.1, s, v.into_iter().map(|(r, t)| Complex64::from_polar(r, t)).collect())
        })
    }

    #[test]
    fn zero_pulse_scatters_trivially() {
        let d = forward_scatter(&HardPulse::zero(0.1)).unwrap();
        assert_eq!(d.a, LaurentSeries::constant(ONE));
        assert!(d.b.is_zero());
        assert!(find_bound_states(&HardPulse::zero(0.1)).unwrap().is_empty());
    }

    #[test]
    fn single_impulse_moduli() {
        let theta = 1.3;
        let p = HardPulse::new(0.1, 0, vec![Complex64::from_polar(theta, 0.7)]);
        let d = forward_scatter(&p).unwrap();
        for w in crate::spectral::grid_points(16) {
            assert!((d.a.eval(w).norm() - (theta / 2.0).cos()).abs() < 1e-14);
            assert!((d.b.eval(w).norm() - (theta / 2.0).sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn single_impulse_reflection_is_constant() {
        let theta = 0.9;
        let p = HardPulse::new(0.1, 0, vec![c(theta, 0.0)]);
        let d = forward_scatter(&p).unwrap();
        let r = reflection_samples(&d, 8).unwrap();
        for v in r.values() {
            assert!((v - c(0.0, -(theta / 2.0).tan())).norm() < 1e-14);
        }
    }

    #[test]
    fn profile_from_r_examples() {
        let prof = profile_from_r(&[ZERO, ONE, c((0.6f64 / 2.0).tan(), 0.0)], &[0.0, 1.0, 2.0]);
        assert_eq!(prof.vecs[0], [0.0, 0.0, 1.0]);
        assert!((prof.vecs[1][0] - 1.0).abs() < 1e-15 && prof.vecs[1][2].abs() < 1e-15);
        assert!((prof.vecs[2][2] - 0.6f64.cos()).abs() < 1e-14);
    }

    #[test]
    fn hard_simulation_matches_scattering_profile() {
        let p = HardPulse::new(
            0.2,
            -3,
            vec![c(0.3, 0.4), c(-1.2, 0.1), c(0.8, -0.9), c(0.05, 0.6), c(1.4, 0.2)],
        );
        let zs = grid_frequencies(64, p.delta());
        let h = hard_simulate(&p, &zs);
        let s = scattering_profile(&forward_scatter(&p).unwrap(), p.delta(), &zs);
        assert!(h.max_distance(&s) < 1e-10);
    }

    #[test]
    fn product_formula_for_a0() {
        let p = HardPulse::new(0.1, 2, vec![c(0.5, 0.2), c(-0.7, 0.9), c(1.1, 0.0)]);
        let d = forward_scatter(&p).unwrap();
        let prod: f64 = p.gammas().unwrap().iter().map(|g| step_constant(*g)).product();
        assert!((d.a.coeff(0) - c(prod, 0.0)).norm() < 1e-12);
        assert!(d.a.offset() == 0 && d.a.coeff(0).re > 0.0);
    }

    #[test]
    fn jost_limits() {
        let p = HardPulse::new(0.1, -2, vec![c(0.5, 0.2), c(-0.7, 0.9), c(1.1, 0.0), c(0.3, -0.3)]);
        let d = forward_scatter(&p).unwrap();
        for j in [p.end(), p.end() + 3] {
            let m = jost_minus(&p, j).unwrap();
            assert!(m.a.max_abs_diff(&d.a) < 1e-15);
            assert!(m.b.shift(-j).max_abs_diff(&d.b) < 1e-15);
            let pl = jost_plus(&p, j).unwrap();
            assert_eq!(pl.a, LaurentSeries::constant(ONE));
            assert!(pl.b.is_zero());
        }
        let m = jost_minus(&p, p.start() - 2).unwrap();
        assert_eq!(m.a, LaurentSeries::constant(ONE));
        assert!(m.b.is_zero());
    }

    #[test]
    fn jost_pairs_are_unitary() {
        let p = HardPulse::new(0.1, -2, vec![c(0.5, 0.2), c(-0.7, 0.9), c(1.1, 0.0), c(0.3, -0.3)]);
        for j in -4..5 {
            for pair in [jost_minus(&p, j).unwrap(), jost_plus(&p, j).unwrap()] {
                for w in crate::spectral::grid_points(32) {
                    let s = pair.a.eval(w).norm_sqr() + pair.b.eval(w).norm_sqr();
                    assert!((s - 1.0).abs() < 1e-12, "side {:?} j {j}", pair.side);
                }
            }
        }
    }

    #[test]
    fn strong_pulse_has_bound_state_with_constant_norming() {
        let p = HardPulse::new(0.1, -3, vec![c(2.5, 0.0), c(2.6, 0.3), c(2.4, -0.2), c(2.0, 0.0), c(1.0, 0.4)]);
        let states = find_bound_states(&p).unwrap();
        assert!(!states.is_empty());
        let a = forward_scatter(&p).unwrap().a;
        for s in &states {
            assert!(a.eval(s.w).norm() < 1e-12);
            for j in [-5, -1, 1, 2, 4] {
                let cj = norming_constant(&p, s.w, j).unwrap();
                assert!((cj - s.c_prime).norm() < 1e-9 * s.c_prime.norm().max(1.0), "j {j}");
            }
        }
    }

    #[test]
    fn weak_pulse_has_no_bound_states() {
        let p = HardPulse::new(0.1, 0, vec![c(0.2, 0.1), c(-0.3, 0.2), c(0.25, 0.0)]);
        assert!(find_bound_states(&p).unwrap().is_empty());
    }

    #[test]
    fn energy_single_impulse() {
        let theta = 1.7;
        let p = HardPulse::new(0.1, 0, vec![c(theta, 0.0)]);
        let d = scattering_data(&p).unwrap();
        let (l, r) = energy_terms(&p, &d, 64).unwrap();
        assert!((l - (1.0 + (theta / 2.0).tan().powi(2)).ln()).abs() < 1e-14);
        assert!((l - r).abs() < 1e-13);
        assert_eq!(energy_residual(&HardPulse::zero(0.1), &d_zero()).unwrap(), 0.0);
    }

    fn d_zero() -> DiscreteScatteringData {
        forward_scatter(&HardPulse::zero(0.1)).unwrap()
    }

    #[test]
    fn time_reversal_structure() {
        let p = HardPulse::new(0.1, -1, vec![c(0.4, 0.2), c(-0.9, 0.5), c(0.3, 0.0), c(0.1, -0.8)]);
        let d = forward_scatter(&p).unwrap();
        let q = forward_scatter(&time_reverse(&p)).unwrap();
        assert!(q.a.max_abs_diff(&d.a) < 1e-14);
        assert!(q.b.max_abs_diff(&(-&d.b.conj_circle())) < 1e-14);
    }

    #[test]
    fn flip_overflow_is_reported() {
        let p = HardPulse::new(0.1, 0, vec![c(PI, 0.0)]);
        assert!(matches!(forward_scatter(&p), Err(Error::FlipAngleOverflow(_))));
    }

    proptest! {
        #[test]
        fn unitarity(p in pulse_strategy(40, 1.5)) {
            let d = forward_scatter(&p).unwrap();
            prop_assert!(unitarity_defect(&d, 256).unwrap() < 1e-10);
        }

        #[test]
        fn b_support(p in pulse_strategy(30, 1.5)) {
            let d = forward_scatter(&p).unwrap();
            if let Some((lo, hi)) = d.b.support() {
                prop_assert!(lo >= -(p.end() - 1) && hi <= -p.start());
            }
            prop_assert!(d.a.offset() == 0 && d.a.width() <= p.len() + 1);
        }

        #[test]
        fn energy_identity(p in pulse_strategy(24, 2.5)) {
            let d = scattering_data(&p).unwrap();
            let l: f64 = p.gammas().unwrap().iter().map(|g| g.norm_sqr().ln_1p()).sum();
            prop_assert!(energy_residual(&p, &d).unwrap() < 1e-8 * (1.0 + l.abs()));
        }
    }
}
