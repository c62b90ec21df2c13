use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tempcert_core::ToleranceConfig;

use crate::error::CliError;

pub const DEFAULT_SEED: u64 = 0xC0FFEE;
/// Largest `d` accepted by subcommands that enumerate over outcomes.
pub const MAX_D: usize = 16;
/// The entropy sweep only builds `d × d` matrices, so it may go further.
pub const MAX_SWEEP_D: usize = tempcert_core::randomness::MAX_SWEEP_D;

#[derive(Debug, Parser)]
#[command(name = "tempcert", version, about = "Certify d-outcome measurements from temporal correlations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Evaluate the temporal expression for a quartet and state.
    Tau(CommonArgs),
    /// Closed-form classical bound against both brute-force searches.
    ClassicalBound(CommonArgs),
    /// Sum-of-squares residuals for a quartet.
    Sos(CommonArgs),
    /// Full certification pipeline for an observable file.
    Certify(CommonArgs),
    /// Robustness bounds under random unitary perturbations.
    Robustness(CommonArgs),
    /// Certified-randomness entropy sweep.
    Randomness(CommonArgs),
    /// Two inequivalent strategies reaching the qubit maximum.
    Lemma2(CommonArgs),
    /// Run every check and write CSV/SVG artifacts.
    Suite(CommonArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Tau(_) => "tau",
            Command::ClassicalBound(_) => "classical-bound",
            Command::Sos(_) => "sos",
            Command::Certify(_) => "certify",
            Command::Robustness(_) => "robustness",
            Command::Randomness(_) => "randomness",
            Command::Lemma2(_) => "lemma2",
            Command::Suite(_) => "suite",
        }
    }

    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Tau(a)
            | Command::ClassicalBound(a)
            | Command::Sos(a)
            | Command::Certify(a)
            | Command::Robustness(a)
            | Command::Randomness(a)
            | Command::Lemma2(a)
            | Command::Suite(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Number of outcomes.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub dmin: Option<usize>,
    #[arg(long)]
    pub dmax: Option<usize>,
    /// Observable file (JSON).
    #[arg(long)]
    pub observables: Option<PathBuf>,
    /// `mixed` or a state file (JSON).
    #[arg(long, default_value = "mixed")]
    pub state: String,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Overrides the structural and value tolerances.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output directory for reports and artifacts.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Also write the quartet that was used to this observable file.
    #[arg(long)]
    pub emit_observables: Option<PathBuf>,
}

/// Validated run configuration, echoed in every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub d: Option<usize>,
    pub dmin: Option<usize>,
    pub dmax: Option<usize>,
    pub observables: Option<String>,
    pub state: String,
    pub delta: Option<f64>,
    pub trials: Option<usize>,
    pub seed: u64,
    pub tol: ToleranceConfig,
    pub out: Option<String>,
    pub format: Format,
    #[serde(skip)]
    pub observables_path: Option<PathBuf>,
    #[serde(skip)]
    pub out_path: Option<PathBuf>,
    #[serde(skip)]
    pub emit_observables: Option<PathBuf>,
}

fn check_range(name: &str, v: Option<usize>, max: usize) -> Result<(), String> {
    match v {
        Some(x) if !(2..=max).contains(&x) => Err(format!("--{name} must lie in 2..={max}, got {x}")),
        _ => Ok(()),
    }
}

impl RunConfig {
    pub fn from_command(cmd: &Command) -> Result<Self, CliError> {
        let a = cmd.args();
        let name = cmd.name();
        let max = if name == "randomness" { MAX_SWEEP_D } else { MAX_D };
        let mut errors = Vec::new();
        for (flag, v) in [("d", a.d), ("dmin", a.dmin), ("dmax", a.dmax)] {
            if let Err(e) = check_range(flag, v, max) {
                errors.push(e);
            }
        }
        if let (Some(lo), Some(hi)) = (a.dmin, a.dmax) {
            if lo > hi {
                errors.push(format!("--dmin ({lo}) exceeds --dmax ({hi})"));
            }
        }
        if let Some(delta) = a.delta {
            if !(delta.is_finite() && delta > 0.0 && delta <= tempcert_core::certification::MAX_PERTURBATION) {
                errors.push(format!(
                    "--delta must lie in (0, {}], got {delta}",
                    tempcert_core::certification::MAX_PERTURBATION
                ));
            }
        }
        if a.trials == Some(0) {
            errors.push("--trials must be positive".to_string());
        }
        let tol = match a.tol {
            None => ToleranceConfig::default(),
            Some(t) => match ToleranceConfig::uniform(t) {
                Ok(t) => t,
                Err(e) => {
                    errors.push(format!("--tol: {e}"));
                    ToleranceConfig::default()
                }
            },
        };
        if !errors.is_empty() {
            return Err(CliError::Invalid(errors));
        }
        Ok(Self {
            subcommand: name.to_string(),
            d: a.d,
            dmin: a.dmin,
            dmax: a.dmax,
            observables: a.observables.as_ref().map(|p| p.display().to_string()),
            state: a.state.clone(),
            delta: a.delta,
            trials: a.trials,
            seed: a.seed,
            tol,
            out: a.out.as_ref().map(|p| p.display().to_string()),
            format: a.format,
            observables_path: a.observables.clone(),
            out_path: a.out.clone(),
            emit_observables: a.emit_observables.clone(),
        })
    }
}
