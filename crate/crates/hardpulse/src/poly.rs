//! Polynomial helpers on ascending coefficient slices.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::spectral::{fft, grid_for};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub fn eval(p: &[Complex64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(ZERO, |acc, c| acc * z + c)
}

pub fn eval_derivative(p: &[Complex64], z: Complex64) -> Complex64 {
    p.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(ZERO, |acc, (n, c)| acc * z + c * n as f64)
}

/// Drops trailing coefficients at or below `tol` relative to the largest.
pub fn trim_degree(p: &mut Vec<Complex64>, rel_tol: f64) {
    let scale = p.iter().map(|c| c.norm()).fold(0.0, f64::max);
    while p.len() > 1 && p.last().map_or(false, |c| c.norm() <= rel_tol * scale) {
        p.pop();
    }
}

/// Roots of `Σ pₙ zⁿ` from the complex Schur form of the companion matrix, Newton-polished.
///
/// When the leading coefficient is smaller than the constant one the reversed polynomial is
/// solved instead and its roots inverted, which keeps the companion entries bounded.
pub fn roots(p: &[Complex64]) -> Vec<Complex64> {
    let mut q = p.to_vec();
    trim_degree(&mut q, 0.0);
    let lead_zeros = q.iter().take_while(|c| **c == ZERO).count();
    let mut out = vec![ZERO; lead_zeros.min(q.len().saturating_sub(1))];
    let q = &q[lead_zeros.min(q.len() - 1)..];
    if q.len() < 2 {
        return out;
    }
    if q[q.len() - 1].norm() < q[0].norm() {
        let rev: Vec<Complex64> = q.iter().rev().copied().collect();
        out.extend(companion_roots(&rev).into_iter().map(|z| z.inv()));
    } else {
        out.extend(companion_roots(q));
    }
    out
}

fn companion_roots(q: &[Complex64]) -> Vec<Complex64> {
    let n = q.len() - 1;
    let lead = q[n];
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -q[i] / lead;
    }
    let eig = Schur::try_new(m, 1e-15, 10_000).and_then(|s| s.eigenvalues());
    let zs: Vec<Complex64> = match eig {
        Some(v) => v.iter().copied().collect(),
        None => aberth(q),
    };
    zs.into_iter().map(|z| polish(q, z)).collect()
}

fn polish(p: &[Complex64], z: Complex64) -> Complex64 {
    polish_steps(p, z, 4)
}

fn polish_steps(p: &[Complex64], mut z: Complex64, steps: usize) -> Complex64 {
    let mut best = eval(p, z).norm();
    for _ in 0..steps {
        let d = eval_derivative(p, z);
        if d == ZERO {
            break;
        }
        let cand = z - eval(p, z) / d;
        let v = eval(p, cand).norm();
        if !(v < best) {
            break;
        }
        best = v;
        z = cand;
    }
    z
}

fn circle_values(p: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut buf = vec![ZERO; n];
    for (i, c) in p.iter().enumerate() {
        buf[i % n] += c;
    }
    fft(&mut buf, true);
    buf
}

/// Number of zeros of `p` in the open unit disk by the argument principle, with the grid that
/// resolved the phase; `None` when the circle passes too close to a zero.
fn winding(p: &[Complex64]) -> Option<(usize, usize)> {
    let mut n = grid_for(4 * p.len()).max(64);
    for _ in 0..4 {
        let buf = circle_values(p, n);
        let peak = buf.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if !(peak > 0.0) || buf.iter().any(|v| v.norm() < 1e-8 * peak) {
            return None;
        }
        let steps: Vec<f64> = (0..n).map(|k| (buf[(k + 1) % n] / buf[k]).arg()).collect();
        if steps.iter().all(|d| d.abs() < std::f64::consts::FRAC_PI_4) {
            let turns = steps.iter().sum::<f64>() / std::f64::consts::TAU;
            let count = turns.round();
            return ((turns - count).abs() < 1e-6 && count >= 0.0).then_some((count as usize, n));
        }
        n *= 2;
    }
    None
}

/// Power sums `Σ zᵢʲ`, `j = 1..=k`, over the zeros inside the circle, by the trapezoid rule on `n` points.
fn power_sums(p: &[Complex64], k: usize, n: usize) -> Vec<Complex64> {
    let dp: Vec<Complex64> = p.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect();
    let vals = circle_values(p, n);
    let mut dvals = circle_values(&dp, n);
    let pts = crate::spectral::grid_points(n);
    for ((d, v), z) in dvals.iter_mut().zip(&vals).zip(&pts) {
        *d = *d / v * z;
    }
    (1..=k)
        .map(|j| {
            dvals.iter().zip(&pts).map(|(d, z)| d * z.powu(j as u32)).sum::<Complex64>() / n as f64
        })
        .collect()
}

/// Zeros of `Σ pₙ zⁿ` with modulus at most about one.
///
/// Long polynomials with few zeros in the disk get them from contour power sums and Newton's
/// identities, then Newton polishing on `p`; everything else goes through [`roots`].
pub fn disk_roots(p: &[Complex64]) -> Vec<Complex64> {
    let inside = |zs: Vec<Complex64>| zs.into_iter().filter(|z| z.norm() <= 1.0).collect();
    let Some((k, mut n)) = winding(p).filter(|&(k, _)| p.len() > 65 && k <= 32) else {
        return inside(roots(p));
    };
    if k == 0 {
        return Vec::new();
    }
    let mut sums = power_sums(p, k, n);
    for _ in 0..8 {
        let finer = power_sums(p, k, 2 * n);
        n *= 2;
        let change = finer.iter().zip(&sums).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        sums = finer;
        if change < 1e-13 * k as f64 {
            break;
        }
    }
    let mut e = vec![Complex64::new(1.0, 0.0)];
    for m in 1..=k {
        let mut acc = ZERO;
        for i in 1..=m {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += e[m - i] * sums[i - 1] * sign;
        }
        e.push(acc / m as f64);
    }
    let small: Vec<Complex64> = (0..=k)
        .map(|i| if (k - i) % 2 == 0 { e[k - i] } else { -e[k - i] })
        .collect();
    roots(&small).into_iter().map(|z| polish_steps(p, z, 20)).collect()
}


/// Aberth–Ehrlich simultaneous iteration.
fn aberth(p: &[Complex64]) -> Vec<Complex64> {
    let n = p.len() - 1;
    let radius = p[..n]
        .iter()
        .map(|c| (c / p[n]).norm())
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let ratio = eval(p, z[k]) / eval_derivative(p, z[k]);
            let s: Complex64 = (0..n).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let step = ratio / (1.0 - ratio * s);
            z[k] -= step;
            moved = moved.max(step.norm() / z[k].norm().max(1.0));
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn from_roots(rs: &[Complex64]) -> Vec<Complex64> {
        let mut p = vec![c(1.0, 0.0)];
        for r in rs {
            let mut next = vec![ZERO; p.len() + 1];
            for (i, a) in p.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            p = next;
        }
        p
    }

    fn matched(found: &[Complex64], want: &[Complex64], tol: f64) -> bool {
        found.len() == want.len()
            && want.iter().all(|w| found.iter().any(|z| (z - w).norm() < tol))
    }

    #[test]
    fn recovers_known_roots() {
        let want = [c(0.5, 0.1), c(-0.3, 0.7), c(2.0, -1.0), c(0.0, -0.9), c(1.5, 0.0)];
        let p = from_roots(&want);
        assert!(matched(&roots(&p), &want, 1e-12));
    }

    #[test]
    fn tiny_leading_coefficient_keeps_small_roots() {
        let small = [c(0.4, 0.2), c(-0.6, 0.1)];
        let mut want = small.to_vec();
        want.extend((0..40).map(|k| Complex64::from_polar(1e3, 0.15 * k as f64)));
        let p = from_roots(&want);
        let p: Vec<Complex64> = p.iter().map(|x| x * 1e-100).collect();
        let found = roots(&p);
        assert_eq!(found.len(), 42);
        for s in small {
            assert!(found.iter().any(|z| (z - s).norm() < 1e-10));
        }
        assert_eq!(found.iter().filter(|z| z.norm() < 1.0).count(), 2);
    }

    #[test]
    fn zero_roots_and_constants() {
        assert!(roots(&[c(3.0, 0.0)]).is_empty());
        let p = [ZERO, ZERO, c(1.0, 0.0), c(1.0, 0.0)];
        assert!(matched(&roots(&p), &[ZERO, ZERO, c(-1.0, 0.0)], 1e-14));
    }

    #[test]
    fn aberth_agrees() {
        let want = [c(0.2, 0.3), c(-1.1, 0.4), c(0.7, -0.8)];
        let p = from_roots(&want);
        assert!(matched(&aberth(&p), &want, 1e-10));
    }

    #[test]
    fn winding_counts_disk_zeros() {
        let p = from_roots(&[c(0.5, 0.1), c(-0.2, 0.9), c(1.5, 0.0), c(0.0, -3.0)]);
        assert_eq!(winding(&p).map(|w| w.0), Some(2));
        let q = from_roots(&[c(1.1, 0.0), c(0.0, 2.0)]);
        assert_eq!(winding(&q).map(|w| w.0), Some(0));
        let edge = from_roots(&[c(1.0, 0.0)]);
        assert_eq!(winding(&edge), None);
    }

    #[test]
    fn disk_roots_of_long_polynomial() {
        let want = [c(0.3, -0.4), c(-0.7, 0.1), c(0.05, 0.95)];
        let mut all = want.to_vec();
        all.extend((0..120).map(|k| Complex64::from_polar(1.02 + 0.3 * (k % 7) as f64 / 7.0, 0.37 * k as f64)));
        let p = from_roots(&all);
        assert!(matched(&disk_roots(&p), &want, 1e-9));
        let q = from_roots(&all[3..]);
        assert!(disk_roots(&q).is_empty());
    }
}
