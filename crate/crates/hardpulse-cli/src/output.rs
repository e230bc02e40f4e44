//! Plot data and JSON files.

use std::fmt::Write as _;
use std::path::Path;

use hardpulse::pulse::{HardPulse, MagnetizationProfile};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// `{"coeffs": [[re, im], …]}`, ascending powers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub coeffs: Vec<Complex64>,
}

pub fn pulse_csv(p: &HardPulse) -> String {
    let mut s = String::from("t,re_omega,im_omega\n");
    if p.is_empty() {
        s.push_str("0,0,0\n");
    }
    for (k, w) in p.omegas().iter().enumerate() {
        let t = (p.start() + k as i64) as f64 * p.delta();
        let _ = writeln!(s, "{t},{},{}", w.re, w.im);
    }
    s
}

pub fn profile_csv(m: &MagnetizationProfile) -> String {
    let mut s = String::from("z,mx,my,mz\n");
    for (z, v) in m.freqs.iter().zip(&m.vecs) {
        let _ = writeln!(s, "{z},{},{},{}", v[0], v[1], v[2]);
    }
    s
}

/// Writes `pulse.csv` and `profile.csv` into `dir`.
pub fn emit_plot_data(p: &HardPulse, m: &MagnetizationProfile, dir: &Path) -> Result<(), CliError> {
    write(&dir.join("pulse.csv"), &pulse_csv(p))?;
    write(&dir.join("profile.csv"), &profile_csv(m))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    write(path, &text)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}
