//! Direct recursions for reflection coefficients with finite rephasing time.
//!
//! With `r = w^{-ρ} P/Q` and `P(0) = 0` every step peels one impulse off the
//! rational function, so the pulse vanishes for `j ≥ ρ` by construction. The SLR
//! variant peels a unitary polynomial pair and terminates after `T + 1` steps.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::design::{equiripple_fit, minimax, Band, RippleReport};
use crate::error::{Error, Result};
use crate::forward::{forward_scatter, ReducedBoundState, ReducedScatteringData};
use crate::poly;
use crate::pulse::HardPulse;
use crate::spectral::{fft, grid_for, outer_from_log_modulus, CircleGrid, LaurentSeries, TOL_BOUNDARY};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative size below which trailing coefficients are dropped.
pub const TRIM_TOL: f64 = 1e-13;
pub const STOP_GAMMA: f64 = 1e-12;
pub const STOP_RUN: usize = 16;

/// `r = w^{-ρ} P/Q` with `P(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalR {
    pub p: Vec<Complex64>,
    pub q: Vec<Complex64>,
    pub rho: i64,
}

impl RationalR {
    pub fn new(p: Vec<Complex64>, q: Vec<Complex64>, rho: i64) -> Result<Self> {
        let scale = p.iter().chain(&q).map(|c| c.norm()).fold(0.0, f64::max);
        if p.first().map_or(false, |c| c.norm() > 1e-14 * scale) {
            return Err(Error::Invalid("numerator must vanish at the origin".into()));
        }
        if q.first().map_or(true, |c| *c == ZERO) {
            return Err(Error::FrtBreakdown(rho - 1));
        }
        let mut p = p;
        if let Some(c) = p.first_mut() {
            *c = ZERO;
        }
        let pn = p.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if pn > 0.0 {
            for z in poly::roots(&q) {
                if poly::eval(&p, z).norm() < 1e-10 * pn * (1.0 + z.norm()).powi(p.len() as i32) {
                    return Err(Error::Invalid(format!("numerator and denominator share a zero near {z}")));
                }
            }
        }
        Ok(RationalR { p, q, rho })
    }

    /// Finite Laurent series `r` with lowest index `1 - ρ` or above.
    pub fn from_series(r: &LaurentSeries) -> Result<Self> {
        let Some((lo, hi)) = r.support() else {
            return RationalR::new(vec![ZERO], vec![ONE], 0);
        };
        let rho = 1 - lo;
        let p = (0..=(hi + rho)).map(|k| r.coeff(k - rho)).collect();
        RationalR::new(p, vec![ONE], rho)
    }

    /// `r = b/a` of a finite pulse: `P = B`, `Q = A`, `ρ` one past the last impulse.
    pub fn from_pulse(p: &HardPulse) -> Result<Self> {
        if p.is_empty() {
            return RationalR::new(vec![ZERO], vec![ONE], 0);
        }
        let d = forward_scatter(p)?;
        let rho = p.end();
        let num = (0..=(d.b.end() + rho).max(0)).map(|k| d.b.coeff(k - rho)).collect();
        RationalR::new(num, d.a.coeffs().to_vec(), rho)
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        w.powi(-(self.rho as i32)) * poly::eval(&self.p, w) / poly::eval(&self.q, w)
    }

    /// Disk poles with residues.
    pub fn poles(&self) -> Result<Vec<ReducedBoundState>> {
        let mut out = Vec::new();
        for z in poly::roots(&self.q) {
            let m = z.norm();
            if m < 1.0 - TOL_BOUNDARY {
                let c = z.powi(-(self.rho as i32)) * poly::eval(&self.p, z) / poly::eval_derivative(&self.q, z);
                out.push(ReducedBoundState { w: z, c });
            } else if m <= 1.0 + TOL_BOUNDARY {
                return Err(Error::BoundStateOnBoundary(z));
            }
        }
        Ok(out)
    }

    /// Reduced data with `r` expanded from an `n`-point grid.
    pub fn to_reduced(&self, n: usize) -> Result<ReducedScatteringData> {
        let samples = CircleGrid::from_fn(n, |w| self.eval(w))?;
        Ok(ReducedScatteringData::new(samples.to_series_centered(), self.poles()?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrtOptions {
    pub delta: f64,
    /// Last step computed; `None` runs until the stopping rule fires.
    pub j_min: Option<i64>,
    pub max_steps: usize,
}

impl Default for FrtOptions {
    fn default() -> Self {
        FrtOptions { delta: 1.0, j_min: None, max_steps: 200_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrtResult {
    pub pulse: HardPulse,
    /// Geometric estimate of `Σ |ωⱼ|` below the last computed step.
    pub tail_estimate: f64,
    pub steps: usize,
}

fn trim_pair(p: &mut Vec<Complex64>, q: &mut Vec<Complex64>) {
    let scale = p.iter().chain(q.iter()).map(|c| c.norm()).fold(0.0, f64::max);
    let cut = TRIM_TOL * scale;
    while p.len() > 1 && p.last().map_or(false, |c| c.norm() <= cut) {
        p.pop();
    }
    while q.len() > 1 && q.last().map_or(false, |c| c.norm() <= cut) {
        q.pop();
    }
}

/// One peel: `γ = -conj(P₁/Q₀)`, `P ← γ*Q + P/w`, `Q ← Q - γP/w`.
fn peel(p: &[Complex64], q: &[Complex64]) -> (Complex64, Vec<Complex64>, Vec<Complex64>) {
    let p1 = p.get(1).copied().unwrap_or(ZERO);
    let g = -(p1 / q[0]).conj();
    let n = q.len().max(p.len().saturating_sub(1));
    let mut np = vec![ZERO; n + 1];
    let mut nq = vec![ZERO; n];
    for (i, c) in q.iter().enumerate() {
        np[i] += g.conj() * c;
        nq[i] += c;
    }
    for (i, c) in p.iter().enumerate().skip(1) {
        np[i - 1] += c;
        nq[i - 1] -= g * c;
    }
    np[0] = ZERO;
    (g, np, nq)
}

/// Pulse for `r = w^{-ρ}P/Q`, computed from `j = ρ-1` downward.
pub fn frt_invert(data: &RationalR, opts: &FrtOptions) -> Result<FrtResult> {
    let mut p = data.p.clone();
    let mut q = data.q.clone();
    trim_pair(&mut p, &mut q);
    let top = data.rho - 1;
    let mut gammas: Vec<Complex64> = Vec::new();
    let mut run = 0usize;
    let mut j = top;
    loop {
        if opts.j_min.map_or(false, |m| j < m) || gammas.len() >= opts.max_steps {
            break;
        }
        if p.iter().all(|c| *c == ZERO) {
            break;
        }
        if q[0].norm() == 0.0 {
            return Err(Error::FrtBreakdown(j));
        }
        let (g, np, nq) = peel(&p, &q);
        if !g.is_finite() {
            return Err(Error::FrtBreakdown(j));
        }
        let s = nq[0];
        if s.norm() == 0.0 || !s.is_finite() {
            return Err(Error::FrtBreakdown(j));
        }
        p = np.iter().map(|c| c / s).collect();
        q = nq.iter().map(|c| c / s).collect();
        trim_pair(&mut p, &mut q);
        let pscale = p.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let qscale = q.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if pscale <= TRIM_TOL * qscale {
            p = vec![ZERO];
        }
        gammas.push(g);
        run = if g.norm() < STOP_GAMMA { run + 1 } else { 0 };
        j -= 1;
        if opts.j_min.is_none() && run >= STOP_RUN {
            break;
        }
    }
    let steps = gammas.len();
    let tail_estimate = if p.iter().all(|c| *c == ZERO) || steps < 2 {
        0.0
    } else {
        let a = gammas[steps - 1].norm();
        let b = gammas[steps - 2].norm();
        if b > 0.0 && a < b {
            2.0 * a.atan() * (a / b) / (1.0 - a / b)
        } else {
            f64::INFINITY
        }
    };
    gammas.reverse();
    let start = top - steps as i64 + 1;
    Ok(FrtResult { pulse: HardPulse::from_gammas(opts.delta, start, &gammas), tail_estimate, steps })
}

/// Unitary pair with `|A|² + |B|² = 1`; the pulse has `r = w^{1-ρ}B/A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlrPair {
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub rho: i64,
}

impl SlrPair {
    pub fn degree(&self) -> usize {
        self.a.len().max(self.b.len()).saturating_sub(1)
    }

    /// Largest `||A|² + |B|² - 1|` on a grid fine enough for the degree.
    pub fn unitarity_defect(&self) -> f64 {
        pair_defect(&self.a, &self.b, 0)
    }
}

fn pair_defect(a: &[Complex64], b: &[Complex64], shift: usize) -> f64 {
    let n = grid_for(4 * (a.len().max(b.len() + shift) + 1)).max(16);
    let sa = poly_samples(a, n);
    let sb = poly_samples(b, n);
    sa.iter()
        .zip(&sb)
        .map(|(x, y)| (x.norm_sqr() + y.norm_sqr() - 1.0).abs())
        .fold(0.0, f64::max)
}

fn poly_samples(p: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut buf = vec![ZERO; n];
    for (k, c) in p.iter().enumerate() {
        buf[k % n] += c;
    }
    fft(&mut buf, true);
    buf
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlrInversion {
    pub pulse: HardPulse,
    /// Largest unitarity defect of the intermediate pairs.
    pub max_step_defect: f64,
}

/// Peels `(A, wB)` in exactly `T + 1` unitary steps.
pub fn slr_invert(pair: &SlrPair, delta: f64) -> Result<SlrInversion> {
    let defect = pair.unitarity_defect();
    if defect > 1e-6 {
        return Err(Error::NotUnitary(defect));
    }
    let t = pair.degree();
    let mut q = pair.a.clone();
    q.resize(t + 1, ZERO);
    let mut p = vec![ZERO; t + 2];
    for (k, c) in pair.b.iter().enumerate() {
        p[k + 1] = *c;
    }
    let mut gammas = Vec::with_capacity(t + 1);
    let mut worst = 0.0f64;
    for k in 0..=t {
        if q[0] == ZERO {
            return Err(Error::FrtBreakdown(pair.rho - 1 - k as i64));
        }
        let (g, mut np, mut nq) = peel(&p, &q);
        let c = (1.0 + g.norm_sqr()).sqrt().recip();
        np.truncate(t + 1 - k);
        nq.truncate((t - k).max(1));
        for v in np.iter_mut().chain(nq.iter_mut()) {
            *v *= c;
        }
        p = np;
        q = nq;
        gammas.push(g);
        if k % 8 == 0 || k == t {
            let bq: Vec<Complex64> = p.iter().skip(1).copied().collect();
            worst = worst.max(pair_defect(&q, &bq, 0));
        }
    }
    gammas.reverse();
    let start = pair.rho - 1 - t as i64;
    Ok(SlrInversion { pulse: HardPulse::from_gammas(delta, start, &gammas), max_step_defect: worst })
}

/// Degree at or below which the root-splitting factorization is tried first.
pub const ROOT_METHOD_MAX_DEGREE: usize = 64;

/// Minimum-phase `A` with `|A|² = 1 - |B|²` on the circle and `A(0) > 0`.
pub fn spectral_factor_a_from_b(b: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut b = b.to_vec();
    poly::trim_degree(&mut b, 0.0);
    let t = b.len() - 1;
    let n = grid_for(16 * (t + 1)).max(64);
    let peak = poly_samples(&b, n).iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak >= 1.0 - 1e-9 {
        return Err(Error::FactorizationSingular(peak));
    }
    if b.iter().all(|c| *c == ZERO) {
        return Ok(vec![ONE]);
    }
    if t == 0 {
        return Ok(vec![Complex64::new((1.0 - b[0].norm_sqr()).sqrt(), 0.0)]);
    }
    if t <= ROOT_METHOD_MAX_DEGREE {
        if let Some(a) = factor_by_roots(&b, t) {
            if pair_defect(&a, &b, 0) < 1e-11 {
                return Ok(a);
            }
        }
    }
    factor_by_cepstrum(&b, t)
}

fn factor_by_roots(b: &[Complex64], t: usize) -> Option<Vec<Complex64>> {
    // wᵀ(1 - B B★): coefficient of w^{t+k-l} collects bₖ conj(b_l)
    let mut d = vec![ZERO; 2 * t + 1];
    d[t] = ONE;
    for (k, bk) in b.iter().enumerate() {
        for (l, bl) in b.iter().enumerate() {
            d[t + k - l] -= bk * bl.conj();
        }
    }
    let mut outside: Vec<Complex64> = poly::roots(&d).into_iter().filter(|z| z.norm() > 1.0).collect();
    if outside.len() != t || outside.iter().any(|z| z.norm() < 1.0 + 1e-6) {
        return None;
    }
    outside.sort_by(|x, y| y.norm().total_cmp(&x.norm()));
    let mut a = vec![ONE];
    for z in &outside {
        let mut next = vec![ZERO; a.len() + 1];
        for (i, c) in a.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c / z;
        }
        a = next;
    }
    let n = grid_for(8 * (t + 1)).max(64);
    let sa = poly_samples(&a, n);
    let sb = poly_samples(b, n);
    let ratio: f64 = sa.iter().zip(&sb).map(|(x, y)| (1.0 - y.norm_sqr()) / x.norm_sqr()).sum::<f64>() / n as f64;
    let kappa = ratio.sqrt();
    Some(a.into_iter().map(|c| c * kappa).collect())
}

fn factor_by_cepstrum(b: &[Complex64], t: usize) -> Result<Vec<Complex64>> {
    let mut n = grid_for(64 * (t + 1)).max(1 << 12);
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    while n <= 1 << 20 {
        let sb = poly_samples(b, n);
        let log_mod: Vec<f64> = sb.iter().map(|v| 0.5 * (1.0 - v.norm_sqr()).ln()).collect();
        let outer = outer_from_log_modulus(&log_mod)?;
        let coeffs = outer.series();
        let a: Vec<Complex64> = (0..=t as i64).map(|k| coeffs.coeff(k)).collect();
        let defect = pair_defect(&a, b, 0);
        if defect < 1e-12 {
            return Ok(a);
        }
        if best.as_ref().map_or(true, |(d, _)| defect < *d) {
            best = Some((defect, a));
        }
        n *= 4;
    }
    Ok(best.map(|(_, a)| a).unwrap_or_else(|| vec![ONE]))
}

/// SLR slice: `Mz = cos θ₀` in band, `1` outside, `B` of even degree `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlrSpec {
    pub theta0: f64,
    pub band: [f64; 2],
    pub tau: f64,
    pub degree: usize,
    #[serde(default)]
    pub delta1: Option<f64>,
    #[serde(default)]
    pub delta2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlrDesign {
    pub b: Vec<Complex64>,
    pub report: RippleReport,
}

/// Minimax `|B| ≈ sin(θ₀/2)·χ_band` by the same exchange as the IST design.
pub fn slr_design_b(spec: &SlrSpec) -> Result<SlrDesign> {
    if spec.degree % 2 != 0 {
        return Err(Error::Invalid(format!("SLR degree must be even, got {}", spec.degree)));
    }
    let d = spec.degree / 2;
    let height = (spec.theta0 / 2.0).sin();
    let [lo, hi] = spec.band;
    let zero_report = RippleReport { achieved_delta1: 0.0, achieved_delta2: 0.0, alternations: 0 };
    if height == 0.0 || hi <= lo {
        return Ok(SlrDesign { b: vec![ZERO; spec.degree + 1], report: zero_report });
    }
    let half = 0.5 * (hi - lo);
    let centre = 0.5 * (lo + hi);
    let (series, report) = if half >= PI {
        let fit = minimax(&[Band { lo: 0.0, hi: PI, target: height, weight: 1.0 }], d)?;
        let rep = RippleReport { achieved_delta1: fit.band_errors[0], achieved_delta2: 0.0, alternations: fit.alternations };
        (fit.series, rep)
    } else {
        let (fit, _) = equiripple_fit(half, spec.tau, height, d, spec.delta1, spec.delta2)?;
        let rep = RippleReport {
            achieved_delta1: fit.band_errors[0],
            achieved_delta2: fit.band_errors[1],
            alternations: fit.alternations,
        };
        (fit.series, rep)
    };
    let b = (0..=spec.degree as i64)
        .map(|k| {
            let n = k - d as i64;
            series.coeff(n) * Complex64::from_polar(1.0, -(n as f64) * centre)
        })
        .collect();
    Ok(SlrDesign { b, report })
}
