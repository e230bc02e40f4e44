//! Discrete inverse scattering: reduced scattering data to hard pulse.
//!
//! The right sweep recovers `γⱼ` for `j ≥ 0` from `f(n) = r̂(n) - Σ cₖ wₖ^{-n-1}`, the
//! left sweep recovers `j < 0` from the same recursion applied to time-reversed data.
//! [`marchenko_solve`] is an independent dense solver used as an oracle.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::design::{ab_from_r, left_data};
use crate::error::{Error, Result};
use crate::forward::ReducedScatteringData;
use crate::pulse::HardPulse;
use crate::spectral::{LaurentSeries, DEFAULT_GRID};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub const DEFAULT_TAIL_TOL: f64 = 1e-10;
/// Left/right disagreement in `γ₀` tolerated before enlarging the truncation.
pub const GAMMA0_TOL: f64 = 1e-6;
const BREAKDOWN_TOL: f64 = 1e-14;
const RANGE_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistOptions {
    pub delta: f64,
    /// Circle grid used for `(a, b)` and the left reflection coefficient.
    pub grid: usize,
    pub tail_tol: f64,
    pub m_plus: Option<usize>,
    pub m_minus: Option<usize>,
    pub max_doublings: usize,
}

impl Default for DistOptions {
    fn default() -> Self {
        DistOptions { delta: 1.0, grid: DEFAULT_GRID, tail_tol: DEFAULT_TAIL_TOL, m_plus: None, m_minus: None, max_doublings: 2 }
    }
}

/// Kernel sequence stored by negated index: `values[m] = f(-m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSequence {
    pub values: Vec<Complex64>,
    /// Smallest `M` with `Σ_{m ≥ M} |f(-m)| < tail_tol`.
    pub truncation: usize,
}

impl KernelSequence {
    /// `f(n)` for `n ≤ 0`; zero past the stored range.
    pub fn at(&self, n: i64) -> Complex64 {
        if n > 0 {
            return ZERO;
        }
        self.values.get((-n) as usize).copied().unwrap_or(ZERO)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistWorkspace {
    pub f: KernelSequence,
    pub g: KernelSequence,
    pub m_plus: usize,
    pub m_minus: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistDiagnostics {
    pub m_plus: usize,
    pub m_minus: usize,
    pub gamma0_right: Complex64,
    pub gamma0_left: Complex64,
    pub gamma0_gap: f64,
    pub doublings: usize,
    pub grid: usize,
}

/// `f(-m) = r̂(-m) - Σ cₖ wₖ^{m-1}` for `m ≥ 0`, stored until the tail drops below `tail_tol`.
pub fn kernel_sequence(data: &ReducedScatteringData, tail_tol: f64) -> Result<KernelSequence> {
    let r = &data.r;
    let lo = r.support().map_or(0, |(lo, _)| (-lo).max(0) as usize);
    let mut bound_len = 0usize;
    for s in &data.bound_states {
        let rho = s.w.norm();
        if rho == 0.0 {
            return Err(Error::DegenerateBoundState);
        }
        let first = s.c.norm() / rho;
        if first > RANGE_LIMIT || !first.is_finite() {
            return Err(Error::BoundStateRangeOverflow(0));
        }
        if rho >= 1.0 {
            return Err(Error::BoundStateOnBoundary(s.w));
        }
        // |c| ρ^{m-1}/(1-ρ) < tol/16
        let need = ((tail_tol * (1.0 - rho) / (16.0 * first)).ln() / rho.ln()).ceil().max(0.0) as usize;
        bound_len = bound_len.max(need + 1);
    }
    let len = lo.max(bound_len) + 2;
    let values: Vec<Complex64> = (0..len)
        .map(|m| {
            let pole: Complex64 = data
                .bound_states
                .iter()
                .map(|s| s.c * s.w.powi(m as i32 - 1))
                .sum();
            r.coeff(-(m as i64)) - pole
        })
        .collect();
    let mut tail = 0.0;
    let mut truncation = len;
    for m in (0..len).rev() {
        tail += values[m].norm();
        if tail >= tail_tol {
            break;
        }
        truncation = m;
    }
    Ok(KernelSequence { values, truncation: truncation.max(1) })
}

/// `(f, g)` from right and left reduced data.
pub fn build_fg(right: &ReducedScatteringData, left: &ReducedScatteringData, tail_tol: f64) -> Result<DistWorkspace> {
    let f = kernel_sequence(right, tail_tol)?;
    let g = kernel_sequence(left, tail_tol)?;
    let (m_plus, m_minus) = (f.truncation, g.truncation);
    Ok(DistWorkspace { f, g, m_plus, m_minus })
}

/// Shared sweep: `γⱼ` for `j = M-1 … 0`, returned indexed by `j`.
pub fn sweep(f: &KernelSequence, m: usize) -> Result<Vec<Complex64>> {
    let mut gammas = vec![ZERO; m];
    let mut k: Vec<Complex64> = vec![ONE];
    let mut l: Vec<Complex64> = vec![ZERO];
    for j in (0..m).rev() {
        let j = j as i64;
        let x: Complex64 = k.iter().enumerate().map(|(i, c)| f.at(-j - i as i64) * c).sum();
        let y: Complex64 = l.iter().enumerate().map(|(i, c)| f.at(-j - 1 - i as i64) * c).sum();
        let den = ONE - y;
        if den.norm() < BREAKDOWN_TOL {
            return Err(Error::DistBreakdown(j));
        }
        let g = -(x / den).conj();
        if !g.is_finite() {
            return Err(Error::DistBreakdown(j));
        }
        gammas[j as usize] = g;
        let n = k.len().max(l.len() + 1);
        let mut k2 = vec![ZERO; n];
        let mut l2 = vec![ZERO; n];
        for (i, c) in k.iter().enumerate() {
            k2[i] += c;
            l2[i] += g * c;
        }
        for (i, c) in l.iter().enumerate() {
            k2[i + 1] -= g.conj() * c;
            l2[i + 1] += c;
        }
        k = k2;
        l = l2;
    }
    Ok(gammas)
}

/// `γⱼ` for `j = 0 … M₊-1`.
pub fn dist_right(ws: &DistWorkspace) -> Result<Vec<Complex64>> {
    sweep(&ws.f, ws.m_plus)
}

/// `γⱼ` for `j = 0, -1, …, -M₋`; entry `i` holds `γ₋ᵢ`. Entry 0 is the left estimate of `γ₀`.
pub fn dist_left(ws: &DistWorkspace) -> Result<Vec<Complex64>> {
    let g = sweep(&ws.g, ws.m_minus + 1)?;
    Ok(g.into_iter().map(|x| -x.conj()).collect())
}

fn invert_once(data: &ReducedScatteringData, opts: &DistOptions, grow: usize) -> Result<(HardPulse, DistDiagnostics)> {
    let grid = opts.grid << grow;
    let ab = ab_from_r(data, grid)?;
    let left = left_data(data, &ab)?;
    let mut ws = build_fg(data, &left, opts.tail_tol)?;
    if let Some(m) = opts.m_plus {
        ws.m_plus = m;
    }
    if let Some(m) = opts.m_minus {
        ws.m_minus = m;
    }
    ws.m_plus <<= grow;
    ws.m_minus <<= grow;
    let right = dist_right(&ws)?;
    let leftg = dist_left(&ws)?;
    let gap = (right[0] - leftg[0]).norm();
    let mut gammas: Vec<Complex64> = leftg[1..].iter().rev().copied().collect();
    gammas.extend_from_slice(&right);
    let start = -((leftg.len() - 1) as i64);
    let pulse = HardPulse::from_gammas(opts.delta, start, &gammas);
    let diag = DistDiagnostics {
        m_plus: ws.m_plus,
        m_minus: ws.m_minus,
        gamma0_right: right[0],
        gamma0_left: leftg[0],
        gamma0_gap: gap,
        doublings: grow,
        grid,
    };
    Ok((pulse, diag))
}

/// Pulse from reduced data, enlarging `M±` up to `max_doublings` times until left and right `γ₀` agree.
pub fn dist_invert(data: &ReducedScatteringData, opts: &DistOptions) -> Result<(HardPulse, DistDiagnostics)> {
    let mut last = 0.0;
    for grow in 0..=opts.max_doublings {
        let (p, d) = invert_once(data, opts, grow)?;
        if d.gamma0_gap <= GAMMA0_TOL {
            return Ok((p, d));
        }
        last = d.gamma0_gap;
    }
    Err(Error::TruncationInsufficient { gap: last })
}

/// `r_j` on indices `-n … -1`: coefficient `k` is `f(k - j + 1)`.
pub fn kernel_from_f(f: &KernelSequence, j: i64, n: usize) -> LaurentSeries {
    LaurentSeries::from_fn(-(n as i64), -1, |k| f.at(k - j + 1))
}

/// `r_j = Π₋(r w^{j-1}) - Σ cₖ wₖ^{j-1}/(w - wₖ)` expanded on indices `-n … -1`.
pub fn kernel_from_data(data: &ReducedScatteringData, j: i64, n: usize) -> LaurentSeries {
    LaurentSeries::from_fn(-(n as i64), -1, |k| {
        let pole: Complex64 = data
            .bound_states
            .iter()
            .map(|s| s.c * s.w.powi((j - 1) as i32) * s.w.powi((-k - 1) as i32))
            .sum();
        data.r.coeff(k - j + 1) - pole
    })
}

#[derive(Debug, Clone)]
pub struct MarchenkoSolution {
    /// `h₁ … h_N`.
    pub h: Vec<Complex64>,
    pub residual: f64,
}

/// `1 + Π₊r_j*Π₋r_j` restricted to coefficients `1 … n`.
pub fn marchenko_operator(kernel: &LaurentSeries, n: usize) -> DMatrix<Complex64> {
    let lo = kernel.support().map_or(-1, |(lo, _)| lo.min(-1));
    let ps: Vec<i64> = (lo..=-1).collect();
    let h_mat = DMatrix::from_fn(ps.len(), n, |i, m| kernel_coeff(kernel, ps[i] - (m as i64 + 1)));
    DMatrix::<Complex64>::identity(n, n) + h_mat.adjoint() * &h_mat
}

fn kernel_coeff(kernel: &LaurentSeries, k: i64) -> Complex64 {
    if k <= -1 {
        kernel.coeff(k)
    } else {
        ZERO
    }
}

/// Smallest eigenvalue of [`marchenko_operator`]; at least 1 in exact arithmetic.
pub fn marchenko_min_eigenvalue(kernel: &LaurentSeries, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    marchenko_operator(kernel, n).symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Solves `(1 + Π₊r_j*Π₋r_j)h = -Π₊r_j*` on coefficients `1 … n`.
pub fn marchenko_solve(kernel: &LaurentSeries, n: usize) -> MarchenkoSolution {
    let sys = marchenko_operator(kernel, n);
    let rhs = DVector::from_fn(n, |i, _| -kernel_coeff(kernel, -(i as i64 + 1)).conj());
    let sol = sys
        .clone()
        .cholesky()
        .map(|c| c.solve(&rhs))
        .unwrap_or_else(|| sys.clone().lu().solve(&rhs).unwrap_or_else(|| DVector::zeros(n)));
    let residual = (&sys * &sol - &rhs).norm();
    MarchenkoSolution { h: sol.iter().copied().collect(), residual }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarchenkoGamma {
    pub gamma: Complex64,
    /// `Â₊,ⱼ(0)` from the normalization `|A|² + |B|² = 1`.
    pub a_hat0: f64,
}

/// `γⱼ` and `Â₊,ⱼ(0)` from the Marchenko solution.
pub fn gamma_from_marchenko(h: &[Complex64], kernel: &LaurentSeries) -> MarchenkoGamma {
    let gamma = h.first().copied().unwrap_or(ZERO);
    let hs = LaurentSeries::new(1, h.to_vec());
    let a = &LaurentSeries::constant(ONE) + &(kernel * &hs).project_minus();
    let norm2 = a.l2_norm().powi(2) + hs.l2_norm().powi(2);
    MarchenkoGamma { gamma, a_hat0: norm2.sqrt().recip() }
}

/// `γⱼ` from the Marchenko oracle at every `j = 0 … M₊-1`.
pub fn marchenko_gammas(f: &KernelSequence, m_plus: usize) -> Vec<Complex64> {
    (0..m_plus as i64)
        .map(|j| {
            let n = (m_plus as i64 - j + 1).max(1) as usize;
            let k = kernel_from_f(f, j, n);
            gamma_from_marchenko(&marchenko_solve(&k, n).h, &k).gamma
        })
        .collect()
}
