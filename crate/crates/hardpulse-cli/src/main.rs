//! `hardpulse`: batch front end for hard-pulse design, inversion and simulation.

mod config;
mod jobs;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;

use config::JobConfig;

#[derive(Debug, Parser)]
#[command(name = "hardpulse", version, about = "Design, invert and simulate hard RF pulses")]
struct Cli {
    /// Job file, TOML or JSON (chosen by extension).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Circle grid size; overrides the job file.
    #[arg(long)]
    grid: Option<usize>,
    /// Random seed; overrides the job file.
    #[arg(long)]
    seed: Option<u64>,
    /// Suppress the summary on stdout. Files are written regardless.
    #[arg(long)]
    quiet: bool,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical { kind: String, message: String },
    Io(String),
}

impl From<hardpulse::Error> for CliError {
    fn from(e: hardpulse::Error) -> Self {
        match e {
            hardpulse::Error::Invalid(msg) => CliError::Config(msg),
            e => CliError::Numerical { kind: e.kind().to_string(), message: e.to_string() },
        }
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    message: &'a str,
    exit_code: u8,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io(_) => 1,
        }
    }

    fn to_json(&self) -> String {
        let (error, message) = match self {
            CliError::Config(m) => ("ConfigError", m.as_str()),
            CliError::Numerical { kind, message } => (kind.as_str(), message.as_str()),
            CliError::Io(m) => ("IoError", m.as_str()),
        };
        serde_json::to_string(&ErrorBody { error, message, exit_code: self.exit_code() }).expect("plain strings")
    }
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let mut cfg = JobConfig::load(&cli.config)?;
    if cli.grid.is_some() {
        cfg.grid = cli.grid;
    }
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    let out = jobs::run(&cfg)?;
    std::fs::create_dir_all(&cli.out).map_err(|e| CliError::Io(format!("cannot create {}: {e}", cli.out.display())))?;
    output::write_json(&cli.out.join("diagnostics.json"), &out.diagnostics)?;
    jobs::check_unitarity(&out.diagnostics)?;
    output::write_json(&cli.out.join("pulse.json"), &out.pulse)?;
    output::emit_plot_data(&out.pulse, &out.profile, &cli.out)?;
    if let Some(s) = &out.scattering {
        output::write_json(&cli.out.join("scattering.json"), s)?;
    }
    let d = &out.diagnostics;
    let mut line = format!(
        "{} {}: {} impulses from step {}, unitarity defect {:.1e}",
        d.command,
        d.method.as_deref().unwrap_or("-"),
        d.impulses,
        d.start,
        d.unitarity_defect
    );
    if let Some(e) = d.round_trip_error {
        line += &format!(", round-trip error {e:.1e}");
    }
    Ok(line + &format!("; wrote {}", cli.out.display()))
}

fn write_error_file(dir: &Path, body: &str) {
    if dir.is_dir() {
        let _ = std::fs::write(dir.join("error.json"), format!("{body}\n"));
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(summary) => {
            if !cli.quiet {
                println!("{summary}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let body = e.to_json();
            eprintln!("{body}");
            write_error_file(&cli.out, &body);
            ExitCode::from(e.exit_code())
        }
    }
}
