use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Invalid,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Invalid => 2,
        }
    }
}

/// What a subcommand hands back before it is wrapped in an envelope.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub payload: Value,
    pub pass: bool,
    /// Set when `pass` is false; names the failed check.
    pub failure: Option<String>,
    /// Tabular view used by `--format csv`.
    pub csv: Option<String>,
}

impl Outcome {
    pub fn new(payload: Value, failures: Vec<String>) -> Self {
        Self {
            payload,
            pass: failures.is_empty(),
            failure: (!failures.is_empty()).then(|| failures.join("; ")),
            csv: None,
        }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Envelope {
    pub tool_version: String,
    pub config: Option<RunConfig>,
    pub timestamp_unix: u64,
    pub payload: Value,
    pub verdict: Status,
    pub exit_code: i32,
}

impl Envelope {
    pub fn new(config: Option<RunConfig>, payload: Value, verdict: Status) -> Self {
        let timestamp_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            timestamp_unix,
            payload,
            verdict,
            exit_code: verdict.exit_code(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("envelope serializes");
        s.push('\n');
        s
    }
}

/// Flattens a JSON payload to `field,value` rows (nested keys joined with `.`).
pub fn flatten_csv(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, x, out);
                }
            }
            Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), x, out);
                }
            }
            Value::String(s) => out.push_str(&format!("{prefix},{}\n", csv_field(s))),
            other => out.push_str(&format!("{prefix},{other}\n")),
        }
    }
    let mut out = String::from("field,value\n");
    walk("", v, &mut out);
    out
}

pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
