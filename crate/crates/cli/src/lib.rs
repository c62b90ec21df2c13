//! Command-line front end: argument handling, report envelopes, file I/O and artifacts.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod plot;
pub mod report;
pub mod suite;

use config::{Command, Format, RunConfig};
use error::CliError;
use report::{flatten_csv, Envelope, Outcome, Status};
use serde_json::json;

/// Everything a run produced; `main` prints `stdout` and exits with `exit_code`.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub envelope: Envelope,
    pub stdout: String,
    pub exit_code: i32,
}

fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cmd {
        Command::Tau(_) => commands::tau(cfg),
        Command::ClassicalBound(_) => commands::classical_bound(cfg),
        Command::Sos(_) => commands::sos(cfg),
        Command::Certify(_) => commands::certify_cmd(cfg),
        Command::Robustness(_) => commands::robustness(cfg),
        Command::Randomness(_) => commands::randomness(cfg),
        Command::Lemma2(_) => commands::lemma2(cfg),
        Command::Suite(_) => {
            let dmax = cfg.dmax.or(cfg.d).unwrap_or(suite::DEFAULT_DMAX);
            let trials = cfg.trials.unwrap_or(commands::DEFAULT_TRIALS);
            let res = suite::run(dmax, trials, cfg.seed, &cfg.tol);
            if let Some(dir) = &cfg.out_path {
                for (name, contents) in &res.files {
                    io::write_file(&dir.join(name), contents)?;
                }
            }
            Ok(res.outcome)
        }
    }
}

fn artifact_name(cmd: &Command) -> String {
    format!("{}.csv", cmd.name())
}

pub fn run(cmd: &Command) -> RunResult {
    let cfg = match RunConfig::from_command(cmd) {
        Ok(c) => c,
        Err(e) => return finish(None, Err(e), Format::Json, None),
    };
    let outcome = dispatch(cmd, &cfg);
    if let (Ok(o), Some(dir)) = (&outcome, &cfg.out_path) {
        if let (Some(csv), false) = (&o.csv, matches!(cmd, Command::Suite(_))) {
            if let Err(e) = io::write_file(&dir.join(artifact_name(cmd)), csv) {
                return finish(Some(cfg.clone()), Err(e), cfg.format, None);
            }
        }
    }
    let out = cfg.out_path.clone();
    let format = cfg.format;
    finish(Some(cfg), outcome, format, out)
}

fn finish(
    cfg: Option<RunConfig>,
    outcome: Result<Outcome, CliError>,
    format: Format,
    out: Option<std::path::PathBuf>,
) -> RunResult {
    let (envelope, csv) = match outcome {
        Ok(o) => {
            let status = if o.pass { Status::Pass } else { Status::Fail };
            let mut payload = o.payload;
            if let Some(f) = &o.failure {
                payload["failure"] = json!(f);
            }
            let csv = o.csv.unwrap_or_else(|| flatten_csv(&payload));
            (Envelope::new(cfg, payload, status), Some(csv))
        }
        Err(e) => {
            let status = if e.exit_code() == 1 { Status::Fail } else { Status::Invalid };
            let errors = match &e {
                CliError::Invalid(msgs) => msgs.clone(),
                other => vec![other.to_string()],
            };
            (Envelope::new(cfg, json!({ "errors": errors }), status), None)
        }
    };
    let mut envelope = envelope;
    if let Some(dir) = out {
        if let Err(e) = io::write_file(&dir.join("report.json"), &envelope.to_json()) {
            envelope = Envelope::new(envelope.config.clone(), json!({ "errors": [e.to_string()] }), Status::Fail);
        }
    }
    let stdout = match (format, csv) {
        (Format::Csv, Some(csv)) => csv,
        _ => envelope.to_json(),
    };
    RunResult {
        exit_code: envelope.exit_code,
        envelope,
        stdout,
    }
}
