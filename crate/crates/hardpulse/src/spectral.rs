//! Functions on the unit circle held as finite Laurent coefficient sequences.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance from the circle below which an energy is not considered inside the disk.
pub const TOL_BOUNDARY: f64 = 1e-6;

/// Default grid for design work.
pub const DEFAULT_GRID: usize = 4096;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Two-sided finite coefficient sequence, `f(w) = Σ f̂(n) wⁿ`.
#[derive(Clone, Default, Serialize, Deserialize)]
pub struct LaurentSeries {
    offset: i64,
    coeffs: Vec<Complex64>,
}

impl LaurentSeries {
    pub fn new(offset: i64, coeffs: Vec<Complex64>) -> Self {
        LaurentSeries { offset, coeffs }
    }

    pub fn zero() -> Self {
        LaurentSeries::default()
    }

    pub fn constant(c: Complex64) -> Self {
        LaurentSeries::new(0, vec![c])
    }

    /// `c·wⁿ`
    pub fn monomial(n: i64, c: Complex64) -> Self {
        LaurentSeries::new(n, vec![c])
    }

    /// Coefficients `f(n)` for `n` in `lo..=hi`.
    pub fn from_fn(lo: i64, hi: i64, f: impl Fn(i64) -> Complex64) -> Self {
        if hi < lo {
            return LaurentSeries::zero();
        }
        LaurentSeries::new(lo, (lo..=hi).map(f).collect())
    }

    /// Polynomial in `w` with ascending coefficients.
    pub fn polynomial(coeffs: &[Complex64]) -> Self {
        LaurentSeries::new(0, coeffs.to_vec())
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Number of stored coefficients.
    pub fn width(&self) -> usize {
        self.coeffs.len()
    }

    /// Index one past the last stored coefficient.
    pub fn end(&self) -> i64 {
        self.offset + self.coeffs.len() as i64
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        let i = n - self.offset;
        if i < 0 || i >= self.coeffs.len() as i64 {
            ZERO
        } else {
            self.coeffs[i as usize]
        }
    }

    /// Lowest and highest index with a nonzero coefficient.
    pub fn support(&self) -> Option<(i64, i64)> {
        let first = self.coeffs.iter().position(|c| *c != ZERO)?;
        let last = self.coeffs.iter().rposition(|c| *c != ZERO)?;
        Some((self.offset + first as i64, self.offset + last as i64))
    }

    pub fn is_zero(&self) -> bool {
        self.support().is_none()
    }

    /// Drops leading and trailing coefficients of modulus at most `tol`.
    pub fn trimmed(&self, tol: f64) -> Self {
        let first = self.coeffs.iter().position(|c| c.norm() > tol);
        let last = self.coeffs.iter().rposition(|c| c.norm() > tol);
        match (first, last) {
            (Some(a), Some(b)) => {
                LaurentSeries::new(self.offset + a as i64, self.coeffs[a..=b].to_vec())
            }
            _ => LaurentSeries::zero(),
        }
    }

    /// Multiplication by `wᵏ`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentSeries::new(self.offset + k, self.coeffs.clone())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        LaurentSeries::new(self.offset, self.coeffs.iter().map(|x| x * c).collect())
    }

    /// `f*(w) = conj(f(1/w̄))`, so coefficient `n` becomes `conj(f̂(-n))`.
    pub fn conj_circle(&self) -> Self {
        let coeffs = self.coeffs.iter().rev().map(|c| c.conj()).collect();
        LaurentSeries::new(-(self.end() - 1), coeffs)
    }

    /// Coefficients restricted to `lo..=hi`.
    pub fn window(&self, lo: i64, hi: i64) -> Self {
        let lo = lo.max(self.offset);
        let hi = hi.min(self.end() - 1);
        LaurentSeries::from_fn(lo, hi, |n| self.coeff(n))
    }

    /// Π₊: indices `n ≥ 1`.
    pub fn project_plus(&self) -> Self {
        self.window(1, i64::MAX)
    }

    /// Π₋: indices `n ≤ -1`.
    pub fn project_minus(&self) -> Self {
        self.window(i64::MIN, -1)
    }

    /// Π̃₊f = Π₊f + ½f̂(0)
    pub fn project_plus_tilde(&self) -> Self {
        &self.project_plus() + &LaurentSeries::constant(0.5 * self.coeff(0))
    }

    /// Π̃₋f = Π₋f + ½f̂(0)
    pub fn project_minus_tilde(&self) -> Self {
        &self.project_minus() + &LaurentSeries::constant(0.5 * self.coeff(0))
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(Σ (1+n²)|f̂(n)|²)^½`
    pub fn h1_norm(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let n = (self.offset + i as i64) as f64;
                (1.0 + n * n) * c.norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Evaluates at any nonzero `w` (or any `w` when no negative powers are stored).
    pub fn eval(&self, w: Complex64) -> Complex64 {
        let mut acc = ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * w + c;
        }
        acc * w.powi(self.offset as i32)
    }

    pub fn eval_derivative(&self, w: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(|(i, c)| {
                let n = self.offset + i as i64;
                if n == 0 {
                    ZERO
                } else {
                    c * n as f64 * w.powi((n - 1) as i32)
                }
            })
            .sum()
    }

    pub fn max_abs_diff(&self, other: &LaurentSeries) -> f64 {
        let lo = self.offset.min(other.offset);
        let hi = self.end().max(other.end());
        (lo..hi)
            .map(|n| (self.coeff(n) - other.coeff(n)).norm())
            .fold(0.0, f64::max)
    }
}

impl PartialEq for LaurentSeries {
    fn eq(&self, other: &Self) -> bool {
        let a = self.trimmed(0.0);
        let b = other.trimmed(0.0);
        a.coeffs == b.coeffs && (a.coeffs.is_empty() || a.offset == b.offset)
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentSeries(offset {}, {:?})", self.offset, self.coeffs)
    }
}

impl Add for &LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, rhs: &LaurentSeries) -> LaurentSeries {
        if self.coeffs.is_empty() {
            return rhs.clone();
        }
        if rhs.coeffs.is_empty() {
            return self.clone();
        }
        let lo = self.offset.min(rhs.offset);
        let hi = self.end().max(rhs.end());
        LaurentSeries::from_fn(lo, hi - 1, |n| self.coeff(n) + rhs.coeff(n))
    }
}

impl Sub for &LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, rhs: &LaurentSeries) -> LaurentSeries {
        self + &(-rhs)
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, rhs: &LaurentSeries) -> LaurentSeries {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return LaurentSeries::zero();
        }
        let mut out = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        LaurentSeries::new(self.offset + rhs.offset, out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for LaurentSeries {
            type Output = LaurentSeries;
            fn $m(self, rhs: LaurentSeries) -> LaurentSeries {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Samples at `w = e^{2πik/N}`, `N` a power of two.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleGrid {
    values: Vec<Complex64>,
}

impl CircleGrid {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        check_grid(values.len())?;
        Ok(CircleGrid { values })
    }

    pub fn from_fn(n: usize, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        check_grid(n)?;
        Ok(CircleGrid { values: grid_points(n).into_iter().map(f).collect() })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        CircleGrid::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn points(&self) -> Vec<Complex64> {
        grid_points(self.size())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> CircleGrid {
        CircleGrid { values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &CircleGrid, f: impl Fn(Complex64, Complex64) -> Complex64) -> CircleGrid {
        assert_eq!(self.size(), other.size(), "grid sizes differ");
        CircleGrid {
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// Coefficients for indices `offset..offset+N`.
    pub fn to_series(&self, offset: i64) -> LaurentSeries {
        let n = self.size() as i64;
        let mut buf = self.values.clone();
        fft(&mut buf, false);
        let scale = 1.0 / n as f64;
        LaurentSeries::from_fn(offset, offset + n - 1, |m| buf[m.rem_euclid(n) as usize] * scale)
    }

    /// Coefficients for indices `-N/2..N/2`.
    pub fn to_series_centered(&self) -> LaurentSeries {
        self.to_series(-(self.size() as i64) / 2)
    }

    /// Trapezoid mean over the circle.
    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.size() as f64
    }
}

fn check_grid(n: usize) -> Result<()> {
    if n == 0 || !n.is_power_of_two() {
        Err(Error::GridSize(n))
    } else {
        Ok(())
    }
}

pub fn grid_points(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect()
}

/// Smallest power of two that is at least `n`.
pub fn grid_for(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

/// In-place DFT; `inverse` uses the `e^{+i}` kernel, both unnormalized.
pub fn fft(buf: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let plan = if inverse {
        planner.plan_fft_inverse(buf.len())
    } else {
        planner.plan_fft_forward(buf.len())
    };
    plan.process(buf);
}

/// Values of `f` on the `n`-point circle grid.
pub fn sample(f: &LaurentSeries, n: usize) -> Result<CircleGrid> {
    check_grid(n)?;
    if f.width() > n {
        let width = match f.support() {
            Some((lo, hi)) => (hi - lo + 1) as usize,
            None => 0,
        };
        if width > n {
            return Err(Error::Aliasing { grid: n, width });
        }
        return sample(&f.trimmed(0.0), n);
    }
    let mut buf = vec![ZERO; n];
    for (i, c) in f.coeffs().iter().enumerate() {
        let m = (f.offset() + i as i64).rem_euclid(n as i64) as usize;
        buf[m] += c;
    }
    fft(&mut buf, true);
    Ok(CircleGrid { values: buf })
}

/// Finite Blaschke product `∏ (w̄ₖ/|wₖ|)(wₖ - w)/(1 - w̄ₖ w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Blaschke {
    zeros: Vec<Complex64>,
}

impl Blaschke {
    pub fn new(zeros: &[Complex64]) -> Result<Self> {
        for &z in zeros {
            if z == ZERO {
                return Err(Error::DegenerateBoundState);
            }
            if z.norm() >= 1.0 - TOL_BOUNDARY {
                return Err(Error::BoundStateOnBoundary(z));
            }
        }
        Ok(Blaschke { zeros: zeros.to_vec() })
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    fn factor(z: Complex64, w: Complex64) -> Complex64 {
        z.conj() / z.norm() * (z - w) / (1.0 - z.conj() * w)
    }

    fn factor_derivative(z: Complex64, w: Complex64) -> Complex64 {
        let d = 1.0 - z.conj() * w;
        z.conj() / z.norm() * (z.norm_sqr() - 1.0) / (d * d)
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        self.zeros.iter().map(|&z| Blaschke::factor(z, w)).product()
    }

    pub fn derivative(&self, w: Complex64) -> Complex64 {
        (0..self.zeros.len())
            .map(|k| {
                self.zeros
                    .iter()
                    .enumerate()
                    .map(|(i, &z)| {
                        if i == k {
                            Blaschke::factor_derivative(z, w)
                        } else {
                            Blaschke::factor(z, w)
                        }
                    })
                    .product::<Complex64>()
            })
            .sum()
    }

    pub fn sample(&self, n: usize) -> Result<CircleGrid> {
        CircleGrid::from_fn(n, |w| self.eval(w))
    }
}

/// Samples and evaluator of the Blaschke product with the given zeros.
pub fn blaschke(energies: &[Complex64], n: usize) -> Result<(CircleGrid, Blaschke)> {
    let b = Blaschke::new(energies)?;
    Ok((b.sample(n)?, b))
}

/// Coefficients `h₀ … h_{N/2}` of the analytic function whose real part on the grid is `values`.
pub fn analytic_completion(values: &[f64]) -> Result<Vec<Complex64>> {
    let n = values.len();
    check_grid(n)?;
    let mut buf: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft(&mut buf, false);
    let scale = 1.0 / n as f64;
    let half = n / 2;
    Ok((0..=half.min(n - 1))
        .map(|k| {
            let c = buf[k] * scale;
            if k == 0 || k == half {
                Complex64::new(c.re, 0.0)
            } else {
                2.0 * c
            }
        })
        .collect())
}

/// Zero-free analytic function with prescribed boundary modulus, positive at the origin.
#[derive(Debug, Clone)]
pub struct OuterFunction {
    log_coeffs: Vec<Complex64>,
    samples: CircleGrid,
}

impl OuterFunction {
    pub fn samples(&self) -> &CircleGrid {
        &self.samples
    }

    /// Taylor coefficients of `log g`.
    pub fn log_coeffs(&self) -> &[Complex64] {
        &self.log_coeffs
    }

    fn log_eval(&self, w: Complex64) -> Complex64 {
        let mut acc = ZERO;
        for c in self.log_coeffs.iter().rev() {
            acc = acc * w + c;
        }
        acc
    }

    /// Value at `|w| ≤ 1`.
    pub fn eval(&self, w: Complex64) -> Complex64 {
        self.log_eval(w).exp()
    }

    pub fn derivative(&self, w: Complex64) -> Complex64 {
        let mut d = ZERO;
        for (n, c) in self.log_coeffs.iter().enumerate().skip(1).rev() {
            d = d * w + c * n as f64;
        }
        self.eval(w) * d
    }

    pub fn value_at_origin(&self) -> f64 {
        self.log_coeffs[0].re.exp()
    }

    /// Taylor coefficients of `g` itself, indices `0..N`.
    pub fn series(&self) -> LaurentSeries {
        self.samples.to_series(0)
    }
}

/// `exp` of the analytic completion of `log_mod`.
pub fn outer_from_log_modulus(log_mod: &[f64]) -> Result<OuterFunction> {
    if let Some(x) = log_mod.iter().find(|x| !x.is_finite()) {
        return Err(Error::Invalid(format!("log modulus not finite: {x}")));
    }
    let log_coeffs = analytic_completion(log_mod)?;
    let n = log_mod.len();
    let mut buf = vec![ZERO; n];
    buf[..log_coeffs.len()].copy_from_slice(&log_coeffs);
    fft(&mut buf, true);
    let samples = CircleGrid { values: buf.into_iter().map(|g| g.exp()).collect() };
    Ok(OuterFunction { log_coeffs, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn series_strategy(max_len: usize) -> impl Strategy<Value = LaurentSeries> {
        (-20i64..20, prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..max_len))
            .prop_map(|(off, v)| LaurentSeries::new(off, v.into_iter().map(|(a, b)| c(a, b)).collect()))
    }

    #[test]
    fn sample_constant_and_monomial() {
        let g = sample(&LaurentSeries::constant(c(1.0, 0.0)), 8).unwrap();
        assert!(g.values().iter().all(|v| (v - c(1.0, 0.0)).norm() < 1e-15));
        let g = sample(&LaurentSeries::monomial(1, c(1.0, 0.0)), 4).unwrap();
        let want = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for (v, w) in g.values().iter().zip(want) {
            assert!((v - w).norm() < 1e-15);
        }
    }

    #[test]
    fn sample_rejects_aliasing() {
        let f = LaurentSeries::new(0, vec![c(1.0, 0.0); 9]);
        assert!(matches!(sample(&f, 8), Err(Error::Aliasing { .. })));
        assert!(matches!(sample(&f, 12), Err(Error::GridSize(12))));
    }

    #[test]
    fn projections_of_three_term() {
        let f = LaurentSeries::new(-1, vec![c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(f.project_plus(), LaurentSeries::monomial(1, c(1.0, 0.0)));
        assert_eq!(f.project_minus(), LaurentSeries::monomial(-1, c(1.0, 0.0)));
        assert_eq!(f.project_plus_tilde(), LaurentSeries::new(0, vec![c(1.0, 0.0), c(1.0, 0.0)]));
        let z = LaurentSeries::zero();
        assert!(z.project_plus().is_zero() && z.project_minus_tilde().is_zero());
    }

    #[test]
    fn h1_norm_examples() {
        assert!((LaurentSeries::constant(c(3.0, 4.0)).h1_norm() - 5.0).abs() < 1e-15);
        assert!((LaurentSeries::monomial(1, c(1.0, 0.0)).h1_norm() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn conj_circle_matches_pointwise() {
        let f = LaurentSeries::new(-2, vec![c(1.0, 2.0), c(0.5, -1.0), c(0.0, 3.0), c(-2.0, 0.1)]);
        let w = Complex64::from_polar(0.7, 0.3);
        let lhs = f.conj_circle().eval(w);
        let rhs = f.eval(1.0 / w.conj()).conj();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn blaschke_single_factor() {
        let (g, b) = blaschke(&[c(0.5, 0.0)], 64).unwrap();
        assert!((b.eval(ZERO) - c(0.5, 0.0)).norm() < 1e-15);
        assert!(g.values().iter().all(|v| (v.norm() - 1.0).abs() < 1e-12));
        let (g, _) = blaschke(&[], 8).unwrap();
        assert!(g.values().iter().all(|v| (v - c(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn blaschke_conjugate_pair() {
        let z = c(0.3, 0.6);
        let (g, b) = blaschke(&[z, z.conj()], 256).unwrap();
        for (v, w) in g.values().iter().zip(grid_points(256)) {
            let direct = Blaschke::factor(z, w) * Blaschke::factor(z.conj(), w);
            assert!((v - direct).norm() < 1e-12);
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
        assert!(b.eval(ZERO).im.abs() < 1e-15 && b.eval(ZERO).re > 0.0);
    }

    #[test]
    fn blaschke_rejects_bad_energies() {
        assert_eq!(Blaschke::new(&[ZERO]), Err(Error::DegenerateBoundState));
        assert!(matches!(Blaschke::new(&[c(1.0, 0.0)]), Err(Error::BoundStateOnBoundary(_))));
        assert!(matches!(Blaschke::new(&[c(0.0, 0.9999999)]), Err(Error::BoundStateOnBoundary(_))));
    }

    #[test]
    fn blaschke_derivative_matches_difference() {
        let b = Blaschke::new(&[c(0.2, 0.5), c(-0.4, 0.1), c(0.6, -0.3)]).unwrap();
        let w = c(0.1, -0.2);
        let h = 1e-6;
        let fd = (b.eval(w + h) - b.eval(w - h)) / (2.0 * h);
        assert!((fd - b.derivative(w)).norm() < 1e-8);
    }

    #[test]
    fn outer_of_constant() {
        let o = outer_from_log_modulus(&vec![2f64.ln(); 32]).unwrap();
        assert!(o.samples().values().iter().all(|v| (v - c(2.0, 0.0)).norm() < 1e-14));
        assert!((o.value_at_origin() - 2.0).abs() < 1e-14);
        let o = outer_from_log_modulus(&vec![0.0; 16]).unwrap();
        assert!((o.eval(c(0.3, 0.2)) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn outer_of_cosine_pattern() {
        let n = 64;
        let log_mod: Vec<f64> = grid_points(n).iter().map(|w| w.powi(3).re).collect();
        let o = outer_from_log_modulus(&log_mod).unwrap();
        for (v, w) in o.samples().values().iter().zip(grid_points(n)) {
            assert!((v - w.powi(3).exp()).norm() < 1e-10);
        }
        let z = c(0.4, -0.3);
        assert!((o.eval(z) - z.powi(3).exp()).norm() < 1e-12);
        assert!((o.derivative(z) - 3.0 * z.powi(2) * z.powi(3).exp()).norm() < 1e-12);
    }

    #[test]
    fn outer_rejects_non_finite() {
        assert!(outer_from_log_modulus(&[0.0, f64::NEG_INFINITY]).is_err());
    }

    proptest! {
        #[test]
        fn sample_round_trip(f in series_strategy(16)) {
            let g = sample(&f, 32).unwrap();
            let back = g.to_series(f.offset());
            prop_assert!(back.max_abs_diff(&f) < 1e-12);
        }

        #[test]
        fn projection_algebra(f in series_strategy(24)) {
            let p = f.project_plus();
            let m = f.project_minus();
            prop_assert_eq!(p.project_plus(), p.clone());
            prop_assert_eq!(m.project_minus(), m.clone());
            prop_assert!(p.project_minus().is_zero());
            let sum = &(&p + &m) + &LaurentSeries::constant(f.coeff(0));
            prop_assert_eq!(sum, f.clone());
        }

        #[test]
        fn shift_commutator(f in series_strategy(24)) {
            let w = LaurentSeries::monomial(1, c(1.0, 0.0));
            let lhs = &(&w * &f).project_plus() - &(&w * &f.project_plus());
            prop_assert!(lhs.max_abs_diff(&LaurentSeries::monomial(1, f.coeff(0))) == 0.0);
        }

        #[test]
        fn h1_product_bound(f in series_strategy(12), g in series_strategy(12)) {
            prop_assert!((&f * &g).h1_norm() <= 2.0 * f.h1_norm() * g.h1_norm() + 1e-12);
        }

        #[test]
        fn blaschke_unimodular(zs in prop::collection::vec((0.05f64..0.95, 0.0f64..6.3), 0..8)) {
            let zs: Vec<Complex64> = zs.into_iter().map(|(r, t)| Complex64::from_polar(r, t)).collect();
            let (g, _) = blaschke(&zs, 512).unwrap();
            for v in g.values() {
                prop_assert!((v.norm() - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn outer_modulus(coeffs in prop::collection::vec((-0.5f64..0.5, -0.5f64..0.5), 1..16)) {
            let n = 256;
            let f = LaurentSeries::new(0, coeffs.into_iter().map(|(a, b)| c(a, b)).collect());
            let log_mod: Vec<f64> = sample(&f, n).unwrap().values().iter().map(|v| v.re).collect();
            let o = outer_from_log_modulus(&log_mod).unwrap();
            for (v, l) in o.samples().values().iter().zip(&log_mod) {
                prop_assert!((v.norm() - l.exp()).abs() < 1e-9);
            }
            let mean = log_mod.iter().sum::<f64>() / n as f64;
            prop_assert!((o.value_at_origin() - mean.exp()).abs() < 1e-12);
        }
    }
}
