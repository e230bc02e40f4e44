//! One function per command.

use hardpulse::bridge::{discretize, ContinuumScatteringData};
use hardpulse::design::{
    delta1_ist_from_long, delta1_slr_from_long, delta2_ist_from_trans, delta2_slr_from_trans, equiripple_r,
    half_pulse_r, self_refocused_r, EquirippleSpec, RippleReport, SelfRefocusedSpec,
};
use hardpulse::dist::{dist_invert, DistDiagnostics, DistOptions};
use hardpulse::finite_rephasing::{
    frt_invert, slr_design_b, slr_invert, spectral_factor_a_from_b, FrtOptions, RationalR, SlrPair, SlrSpec,
};
use hardpulse::forward::{
    energy_terms, energy_grid, forward_scatter, reduced_data, reflection_samples, scattering_data,
    unitarity_defect, DiscreteScatteringData, ReducedScatteringData,
};
use hardpulse::pulse::{
    bloch_simulate, geodesic, grid_frequencies, hard_simulate, soften, softening_error_bound, HardPulse,
    MagnetizationProfile,
};
use hardpulse::spectral::{grid_for, sample, CircleGrid};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

use crate::config::{
    Command, EquirippleParams, HalfPulseParams, Inverter, JobConfig, Method, RhoParam, RoundtripParams,
    SelfRefocusedParams, SimulateParams, SlrParams,
};
use crate::output::{read_json, Polynomial};
use crate::CliError;

/// Largest `||a|²+|b|²-1|` tolerated before a pulse is written.
pub const UNITARITY_LIMIT: f64 = 1e-9;

#[derive(Debug, Clone, Default, Serialize)]
pub struct Diagnostics {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    pub delta: f64,
    pub grid: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub impulses: usize,
    pub start: i64,
    /// `Σ|ωⱼ|²/Δ`
    pub energy: f64,
    pub unitarity_defect: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub round_trip_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma0_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dist: Option<DistDiagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ripple: Option<RippleReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frt_tail_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slr_step_defect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rephasing_steps: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mx_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub softening_distance: Option<f64>,
    /// Largest `distance - (Δ|z|/2)Σ|ωⱼ|` over the grid; positive values violate the softening bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub softening_excess: Option<f64>,
    pub bound_states: Vec<Complex64>,
}

pub struct JobOutput {
    pub pulse: HardPulse,
    pub profile: MagnetizationProfile,
    pub diagnostics: Diagnostics,
    pub scattering: Option<DiscreteScatteringData>,
}

pub fn run(cfg: &JobConfig) -> Result<JobOutput, CliError> {
    cfg.validate()?;
    let mut diag = Diagnostics {
        command: format!("{:?}", cfg.command).to_lowercase(),
        method: cfg.method.map(|m| format!("{m:?}").to_lowercase()),
        grid: cfg.grid(),
        seed: cfg.seed,
        ..Default::default()
    };
    let (pulse, scattering) = match cfg.command {
        Command::Design => (design(cfg, &mut diag)?, None),
        Command::Invert => (invert(cfg, &mut diag)?, None),
        Command::Roundtrip => (roundtrip(cfg, &mut diag)?, None),
        Command::Simulate | Command::Analyze => {
            let path = cfg.io.pulse.as_ref().expect("validated");
            let p: HardPulse = read_json(path)?;
            if !(p.delta() > 0.0) {
                return Err(CliError::Config(format!("pulse step must be positive, got {}", p.delta())));
            }
            if cfg.command == Command::Analyze {
                let data = scattering_data(&p)?;
                diag.energy_residual = Some(relative_energy_residual(&p, &data)?);
                diag.rephasing_steps = p.rephasing_steps();
                (p, Some(data))
            } else {
                (p, None)
            }
        }
    };
    let freqs = grid_frequencies(cfg.grid(), pulse.delta());
    let mut profile = hard_simulate(&pulse, &freqs);
    if cfg.command == Command::Simulate {
        let params: SimulateParams = cfg.params()?;
        if params.soft {
            let soft = bloch_simulate(&soften(&pulse), &freqs);
            diag.softening_distance = Some(profile.max_distance(&soft));
            diag.softening_excess = Some(
                freqs
                    .iter()
                    .zip(profile.vecs.iter().zip(&soft.vecs))
                    .map(|(&z, (h, s))| geodesic(*h, *s) - softening_error_bound(&pulse, z))
                    .fold(f64::NEG_INFINITY, f64::max),
            );
            profile = soft;
        }
    }
    diag.delta = pulse.delta();
    diag.impulses = pulse.len();
    diag.start = pulse.start();
    diag.energy = pulse.energy();
    let fwd = forward_scatter(&pulse)?;
    diag.unitarity_defect = unitarity_defect(&fwd, cfg.grid().max(4096).max(span_grid(&fwd)))?;
    if diag.bound_states.is_empty() {
        if let Some(d) = &scattering {
            diag.bound_states = d.bound_states.iter().map(|s| s.w).collect();
        }
    }
    Ok(JobOutput { pulse, profile, diagnostics: diag, scattering })
}

/// Fail-closed gate applied before any pulse is written.
pub fn check_unitarity(diag: &Diagnostics) -> Result<(), CliError> {
    if diag.unitarity_defect > UNITARITY_LIMIT {
        return Err(CliError::Numerical {
            kind: "UnitarityCheckFailed".into(),
            message: format!("pulse deviates from unitarity by {:e}", diag.unitarity_defect),
        });
    }
    Ok(())
}

fn relative_energy_residual(p: &HardPulse, data: &DiscreteScatteringData) -> Result<f64, CliError> {
    let (l, r) = energy_terms(p, data, energy_grid(data))?;
    Ok(if l == 0.0 { r.abs() } else { (l - r).abs() / l })
}

/// Smallest grid holding the coefficients of `a` and `b` without aliasing.
fn span_grid(data: &DiscreteScatteringData) -> usize {
    grid_for(data.a.width().max(data.b.width()))
}

/// Max `|r_pulse - r_target|` on the target grid, plus the energy residual and bound states of the pulse.
/// Long pulses are sampled on a finer grid that contains the target one.
fn check_against(p: &HardPulse, target: &CircleGrid, diag: &mut Diagnostics) -> Result<(), CliError> {
    let data = scattering_data(p)?;
    let n = target.size();
    let m = n.max(span_grid(&data));
    let got = reflection_samples(&data, m)?;
    let stride = m / n;
    diag.round_trip_error = Some(
        target
            .values()
            .iter()
            .enumerate()
            .map(|(k, b)| (got.values()[k * stride] - b).norm())
            .fold(0.0, f64::max),
    );
    diag.energy_residual = Some(relative_energy_residual(p, &data)?);
    diag.bound_states = data.bound_states.iter().map(|s| s.w).collect();
    Ok(())
}

fn dist_with(data: &ReducedScatteringData, delta: f64, cfg: &JobConfig, diag: &mut Diagnostics) -> Result<HardPulse, CliError> {
    let (p, d) = dist_invert(data, &DistOptions { delta, grid: cfg.grid(), ..Default::default() })?;
    diag.gamma0_gap = Some(d.gamma0_gap);
    diag.dist = Some(d);
    Ok(p)
}

fn design(cfg: &JobConfig, diag: &mut Diagnostics) -> Result<HardPulse, CliError> {
    let delta = cfg.delta;
    let n = cfg.grid();
    match cfg.method.expect("validated") {
        Method::Equiripple => {
            let q: EquirippleParams = cfg.params()?;
            let spec = EquirippleSpec {
                rho: q.rho,
                tau: q.tau,
                delta1: q.delta1.or(q.delta1_long.map(delta1_ist_from_long)),
                delta2: q.delta2.or(q.delta2_trans.map(delta2_ist_from_trans)),
                band: q.band,
                height: q.height.unwrap_or(1.0),
            };
            let d = equiripple_r(&spec)?;
            diag.ripple = Some(d.report);
            let p = match q.inverter {
                Inverter::Frt => {
                    let out = frt_invert(&RationalR::from_series(&d.r)?, &FrtOptions { delta, ..Default::default() })?;
                    diag.frt_tail_estimate = Some(out.tail_estimate);
                    out.pulse
                }
                Inverter::Dist => dist_with(&ReducedScatteringData::new(d.r.clone(), vec![]), delta, cfg, diag)?,
            };
            check_against(&p, &sample(&d.r, n)?, diag)?;
            Ok(p)
        }
        Method::Selfrefocused => {
            let q: SelfRefocusedParams = cfg.params()?;
            let s = self_refocused_r(&SelfRefocusedSpec { k1: q.k1, k2: q.k2, tau: q.tau, band: q.band }, n)?;
            let p = dist_with(&s.data, delta, cfg, diag)?;
            check_against(&p, &s.samples, diag)?;
            Ok(p)
        }
        Method::Halfpulse => {
            let q: HalfPulseParams = cfg.params()?;
            let mx = match (&q.mx, q.peak, q.width) {
                (Some(mx), _, _) => mx.clone(),
                (None, Some(peak), Some(width)) if width > 0.0 => (0..n)
                    .map(|k| {
                        let th = 2.0 * PI * k as f64 / n as f64 - q.centre;
                        peak * (-(0.5 * th).sin().powi(2) / (width * width)).exp()
                    })
                    .collect(),
                _ => return Err(CliError::Config("halfpulse needs `mx` or positive `peak` and `width`".into())),
            };
            if !mx.len().is_power_of_two() {
                return Err(CliError::Config(format!("mx has {} samples, not a power of two", mx.len())));
            }
            let h = half_pulse_r(&mx)?;
            let p = dist_with(&h.data, delta, cfg, diag)?;
            check_against(&p, &h.samples, diag)?;
            let thetas: Vec<f64> = (0..mx.len()).map(|k| 2.0 * PI * k as f64 / mx.len() as f64 / delta).collect();
            let sim = hard_simulate(&p, &thetas);
            diag.mx_error = Some(sim.vecs.iter().zip(&mx).map(|(v, x)| (v[0] - x).abs()).fold(0.0, f64::max));
            Ok(p)
        }
        Method::Slr => {
            let q: SlrParams = cfg.params()?;
            if q.rho < 1 {
                return Err(CliError::Config("slr needs rho ≥ 1".into()));
            }
            let spec = SlrSpec {
                theta0: q.theta0,
                band: q.band,
                tau: q.tau,
                degree: q.degree.unwrap_or(2 * (q.rho as usize - 1)),
                delta1: q.delta1.or(q.delta1_long.map(delta1_slr_from_long)),
                delta2: q.delta2.or(q.delta2_trans.map(delta2_slr_from_trans)),
            };
            let d = slr_design_b(&spec)?;
            diag.ripple = Some(d.report);
            let a = spectral_factor_a_from_b(&d.b)?;
            slr_pulse(SlrPair { a, b: d.b, rho: q.rho }, delta, diag)
        }
        Method::Frt | Method::Dist => unreachable!("validated"),
    }
}

fn slr_pulse(pair: SlrPair, delta: f64, diag: &mut Diagnostics) -> Result<HardPulse, CliError> {
    let inv = slr_invert(&pair, delta)?;
    diag.slr_step_defect = Some(inv.max_step_defect);
    let d = forward_scatter(&inv.pulse)?;
    let err_a = pair.a.iter().enumerate().map(|(k, x)| (d.a.coeff(k as i64) - x).norm());
    let err_b = pair.b.iter().enumerate().map(|(k, x)| (d.b.coeff(k as i64 + 1 - pair.rho) - x).norm());
    diag.round_trip_error = Some(err_a.chain(err_b).fold(0.0, f64::max));
    let data = scattering_data(&inv.pulse)?;
    diag.energy_residual = Some(relative_energy_residual(&inv.pulse, &data)?);
    Ok(inv.pulse)
}

fn read_poly(path: Option<&std::path::PathBuf>, name: &str) -> Result<Vec<Complex64>, CliError> {
    let path = path.ok_or_else(|| CliError::Config(format!("io.{name} is required")))?;
    Ok(read_json::<Polynomial>(path)?.coeffs)
}

fn invert(cfg: &JobConfig, diag: &mut Diagnostics) -> Result<HardPulse, CliError> {
    let n = cfg.grid();
    match cfg.method.expect("validated") {
        Method::Dist => {
            let (data, delta) = match (&cfg.io.reduced, &cfg.io.continuum) {
                (Some(p), None) => (read_json::<ReducedScatteringData>(p)?, cfg.delta),
                (None, Some(p)) => {
                    let c: ContinuumScatteringData = read_json(p)?;
                    (discretize(&c)?, c.delta)
                }
                _ => return Err(CliError::Config("invert dist needs exactly one of io.reduced, io.continuum".into())),
            };
            let p = dist_with(&data, delta, cfg, diag)?;
            check_against(&p, &sample(&data.r, n)?, diag)?;
            Ok(p)
        }
        Method::Frt => {
            let rho = cfg.params::<RhoParam>()?.rho.ok_or_else(|| CliError::Config("parameters.rho is required".into()))?;
            let r = RationalR::new(read_poly(cfg.io.numerator.as_ref(), "numerator")?, read_poly(cfg.io.denominator.as_ref(), "denominator")?, rho)?;
            let out = frt_invert(&r, &FrtOptions { delta: cfg.delta, ..Default::default() })?;
            diag.frt_tail_estimate = Some(out.tail_estimate);
            check_against(&out.pulse, &CircleGrid::from_fn(n, |w| r.eval(w))?, diag)?;
            Ok(out.pulse)
        }
        Method::Slr => {
            let rho = cfg.params::<RhoParam>()?.rho.ok_or_else(|| CliError::Config("parameters.rho is required".into()))?;
            let pair = SlrPair { a: read_poly(cfg.io.a.as_ref(), "a")?, b: read_poly(cfg.io.b.as_ref(), "b")?, rho };
            slr_pulse(pair, cfg.delta, diag)
        }
        _ => unreachable!("validated"),
    }
}

fn roundtrip(cfg: &JobConfig, diag: &mut Diagnostics) -> Result<HardPulse, CliError> {
    let q: RoundtripParams = cfg.params()?;
    if q.length == 0 || !(q.max_amplitude > 0.0 && q.max_amplitude < PI) {
        return Err(CliError::Config("roundtrip needs length ≥ 1 and 0 < max_amplitude < π".into()));
    }
    let seed = cfg.seed.unwrap_or(0);
    diag.seed = Some(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omegas = (0..q.length)
        .map(|_| Complex64::from_polar(rng.gen_range(0.0..q.max_amplitude), rng.gen_range(0.0..2.0 * PI)))
        .collect();
    let original = HardPulse::new(cfg.delta, 0, omegas);
    let data = scattering_data(&original)?;
    let reduced = reduced_data(&data, cfg.grid())?;
    let p = dist_with(&reduced, cfg.delta, cfg, diag)?;
    let lo = p.start().min(original.start());
    let hi = p.end().max(original.end());
    diag.round_trip_error = Some((lo..hi).map(|j| (p.omega(j) - original.omega(j)).norm()).fold(0.0, f64::max));
    diag.energy_residual = Some(relative_energy_residual(&original, &data)?);
    diag.bound_states = data.bound_states.iter().map(|s| s.w).collect();
    Ok(p)
}
