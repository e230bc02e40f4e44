//! Weighted minimax approximation by even trigonometric polynomials.
//!
//! Parks–McClellan exchange on `x = cos θ`, `θ ∈ [0, π]`, with barycentric
//! interpolation evaluated in the log domain so that degrees in the hundreds
//! stay well scaled.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{grid_for, CircleGrid, LaurentSeries};

pub const MAX_ITERATIONS: usize = 100;

/// Piecewise-constant target on `[lo, hi] ⊂ [0, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
    pub target: f64,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct MinimaxFit {
    /// `a₀ + Σ 2aₙ cos nθ` stored as Laurent coefficients `aₙ = a₋ₙ`.
    pub series: LaurentSeries,
    /// Weighted deviation `|δ|` of the last exchange.
    pub delta: f64,
    /// Largest unweighted error in each band.
    pub band_errors: Vec<f64>,
    /// Alternating extrema at the equiripple level.
    pub alternations: usize,
    pub iterations: usize,
}

struct Grid {
    theta: Vec<f64>,
    x: Vec<f64>,
    target: Vec<f64>,
    weight: Vec<f64>,
    band: Vec<usize>,
}

fn build_grid(bands: &[Band], degree: usize, density: usize) -> Grid {
    let total: f64 = bands.iter().map(|b| b.hi - b.lo).sum();
    let points = density * (degree + 2) * 4;
    let mut g = Grid { theta: vec![], x: vec![], target: vec![], weight: vec![], band: vec![] };
    for (k, b) in bands.iter().enumerate() {
        let n = (((b.hi - b.lo) / total * points as f64).ceil() as usize).max(density).max(3);
        for i in 0..n {
            let t = if n == 1 { b.lo } else { b.lo + (b.hi - b.lo) * i as f64 / (n - 1) as f64 };
            g.theta.push(t);
            g.x.push(t.cos());
            g.target.push(b.target);
            g.weight.push(b.weight);
            g.band.push(k);
        }
    }
    g
}

/// Barycentric weights in log form: `(log|βₖ|, sign βₖ)`, normalized to max 0.
fn bary_weights(xs: &[f64]) -> Vec<(f64, f64)> {
    let mut w: Vec<(f64, f64)> = xs
        .iter()
        .enumerate()
        .map(|(k, &xk)| {
            let mut lg = 0.0;
            let mut sg = 1.0;
            for (j, &xj) in xs.iter().enumerate() {
                if j != k {
                    let d = xk - xj;
                    lg -= d.abs().ln();
                    if d < 0.0 {
                        sg = -sg;
                    }
                }
            }
            (lg, sg)
        })
        .collect();
    let m = w.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    for p in w.iter_mut() {
        p.0 -= m;
    }
    w
}

fn bary_eval(x: f64, nodes: &[f64], bw: &[f64], values: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for ((&xk, &b), &v) in nodes.iter().zip(bw).zip(values) {
        let d = x - xk;
        if d == 0.0 {
            return v;
        }
        let t = b / d;
        num += t * v;
        den += t;
    }
    num / den
}

/// Local extrema of the weighted error, alternation-filtered to `want` points.
fn extremals(err: &[f64], band: &[usize], want: usize) -> Vec<usize> {
    let n = err.len();
    let mut cand = Vec::new();
    for j in 0..n {
        let e = err[j];
        let left = (j > 0 && band[j - 1] == band[j]).then(|| err[j - 1]);
        let right = (j + 1 < n && band[j + 1] == band[j]).then(|| err[j + 1]);
        let is_ext = if e >= 0.0 {
            left.map_or(true, |l| e >= l) && right.map_or(true, |r| e > r)
        } else {
            left.map_or(true, |l| e <= l) && right.map_or(true, |r| e < r)
        };
        if is_ext && e != 0.0 {
            cand.push(j);
        }
    }
    let mut out: Vec<usize> = Vec::with_capacity(cand.len());
    for j in cand {
        match out.last() {
            Some(&k) if err[k].signum() == err[j].signum() => {
                if err[j].abs() > err[k].abs() {
                    *out.last_mut().unwrap() = j;
                }
            }
            _ => out.push(j),
        }
    }
    while out.len() > want {
        if err[out[0]].abs() < err[out[out.len() - 1]].abs() {
            out.remove(0);
        } else {
            out.pop();
        }
    }
    out
}

/// Best weighted approximation of the band targets by a cosine polynomial of `degree`.
pub fn minimax(bands: &[Band], degree: usize) -> Result<MinimaxFit> {
    let g = build_grid(bands, degree, 16);
    let r = degree + 2;
    let ng = g.x.len();
    if ng < r {
        return Err(Error::Invalid("grid too coarse for the requested degree".into()));
    }
    let scale = bands.iter().map(|b| b.target.abs()).fold(1e-300, f64::max);
    let mut ext: Vec<usize> = (0..r).map(|k| k * (ng - 1) / (r - 1)).collect();
    let mut delta = 0.0;
    let mut err = vec![0.0; ng];
    let mut nodes = Vec::new();
    let mut bw = Vec::new();
    let mut vals = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..MAX_ITERATIONS {
        iterations = it + 1;
        let xs: Vec<f64> = ext.iter().map(|&i| g.x[i]).collect();
        let full = bary_weights(&xs);
        let mut num = 0.0;
        let mut den = 0.0;
        for (k, &i) in ext.iter().enumerate() {
            let b = full[k].1 * full[k].0.exp();
            let s = if k % 2 == 0 { 1.0 } else { -1.0 };
            num += b * g.target[i];
            den += b * s / g.weight[i];
        }
        delta = num / den;
        nodes = xs[..r - 1].to_vec();
        let sub = bary_weights(&nodes);
        bw = sub.iter().map(|(l, s)| s * l.exp()).collect();
        vals = ext[..r - 1]
            .iter()
            .enumerate()
            .map(|(k, &i)| {
                let s = if k % 2 == 0 { 1.0 } else { -1.0 };
                g.target[i] - s * delta / g.weight[i]
            })
            .collect();
        for j in 0..ng {
            let a = bary_eval(g.x[j], &nodes, &bw, &vals);
            err[j] = g.weight[j] * (g.target[j] - a);
        }
        let emax = err.iter().map(|e| e.abs()).fold(0.0, f64::max);
        if emax - delta.abs() <= 1e-9 * emax + 1e-14 * scale {
            converged = true;
            break;
        }
        let mut next = extremals(&err, &g.band, r);
        if next.len() < r {
            next = refill(next, &ext, &err, r);
        }
        if next == ext {
            converged = true;
            break;
        }
        ext = next;
    }
    let emax = err.iter().map(|e| e.abs()).fold(0.0, f64::max);
    if !converged && emax > delta.abs() * (1.0 + 1e-3) + 1e-14 * scale {
        return Err(Error::RemezDiverged { iterations, last_error: emax });
    }
    let n = grid_for(4 * (degree + 1)).max(8);
    let samples = CircleGrid::from_fn(n, |w| {
        let x = w.re.clamp(-1.0, 1.0);
        Complex64::new(bary_eval(x, &nodes, &bw, &vals), 0.0)
    })?;
    let series = samples.to_series_centered().window(-(degree as i64), degree as i64);
    let series = LaurentSeries::from_fn(-(degree as i64), degree as i64, |k| {
        let c = series.coeff(k);
        Complex64::new(c.re, 0.0)
    });
    let band_errors = (0..bands.len())
        .map(|k| {
            (0..ng)
                .filter(|&j| g.band[j] == k)
                .map(|j| (err[j] / g.weight[j]).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let alternations = count_alternations(&err, &g.band, emax);
    Ok(MinimaxFit { series, delta: delta.abs(), band_errors, alternations, iterations })
}

/// Tops up a short reference set from the previous one, dropping the smallest errors.
fn refill(next: Vec<usize>, old: &[usize], err: &[f64], r: usize) -> Vec<usize> {
    let mut all: Vec<usize> = next.iter().chain(old).copied().collect();
    all.sort_unstable();
    all.dedup();
    while all.len() > r {
        let (k, _) = all
            .iter()
            .enumerate()
            .filter(|(_, j)| !next.contains(j))
            .min_by(|a, b| err[*a.1].abs().total_cmp(&err[*b.1].abs()))
            .unwrap_or((0, &0));
        all.remove(k);
    }
    all
}

fn count_alternations(err: &[f64], band: &[usize], emax: f64) -> usize {
    let level = emax * (1.0 - 1e-3);
    let ext = extremals(err, band, usize::MAX);
    let mut count = 0;
    let mut last = 0.0f64;
    for &j in &ext {
        if err[j].abs() >= level && err[j].signum() != last {
            count += 1;
            last = err[j].signum();
        }
    }
    count
}

/// Value of the even trigonometric polynomial at angle `θ`.
pub fn eval_cos(series: &LaurentSeries, theta: f64) -> f64 {
    series.eval(Complex64::from_polar(1.0, theta)).re
}
