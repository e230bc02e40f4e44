//! Conversions between reflection-coefficient ripples and magnetization ripples.
//!
//! IST ripples are deviations of a real `r` (target 1 in band, 0 outside).
//! SLR ripples are deviations of `|B|` (target `√2/2` in band, 0 outside).

/// Out-of-slice transverse ripple from an IST stopband ripple.
pub fn delta2_trans(d: f64) -> f64 {
    2.0 * d / (1.0 + d * d)
}

/// Out-of-slice transverse ripple from an SLR stopband ripple.
pub fn delta2_trans_slr(d: f64) -> f64 {
    2.0 * d * (1.0 - d * d).sqrt()
}

/// In-slice longitudinal ripple from an IST passband ripple.
pub fn delta1_long(d: f64) -> f64 {
    let x = d - 0.5 * d * d;
    x / (1.0 - x)
}

/// In-slice longitudinal ripple from an SLR passband ripple.
pub fn delta1_long_slr(d: f64) -> f64 {
    2.0 * std::f64::consts::SQRT_2 * d + 2.0 * d * d
}

pub fn delta2_ist_from_trans(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        (1.0 - (1.0 - t * t).sqrt()) / t
    }
}

/// Inverse on the increasing branch `d ≤ 1/√2`.
pub fn delta2_slr_from_trans(t: f64) -> f64 {
    ((1.0 - (1.0 - t * t).sqrt()) / 2.0).sqrt()
}

pub fn delta1_ist_from_long(l: f64) -> f64 {
    let x = l / (1.0 + l);
    1.0 - (1.0 - 2.0 * x).sqrt()
}

pub fn delta1_slr_from_long(l: f64) -> f64 {
    let s = std::f64::consts::SQRT_2;
    (-s + (2.0 + 2.0 * l).sqrt()) / 2.0
}
