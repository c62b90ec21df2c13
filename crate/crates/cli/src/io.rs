//! Observable and state files.
//!
//! Observables: `{"d": 3, "D": 3, "observables": [[[re, im], ...] x4]}` with
//! row-major entries written at 17 significant digits. States:
//! `{"D": 3, "density": [[re, im], ...]}`.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::Value;
use tempcert_core::{Matrix, PreparedState, Quartet, ToleranceConfig, C64};

use crate::error::CliError;

fn fmt_f64(x: f64) -> String {
    // 17 significant digits; JSON accepts the `e` exponent form
    format!("{x:.16e}")
}

fn write_matrix(out: &mut String, m: &Matrix, indent: &str) {
    out.push('[');
    for (i, z) in m.to_row_major().iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        if i > 0 && i % m.cols() == 0 {
            let _ = write!(out, "\n{indent} ");
        }
        let _ = write!(out, "[{}, {}]", fmt_f64(z.re), fmt_f64(z.im));
    }
    out.push(']');
}

pub fn quartet_to_json(q: &Quartet) -> String {
    let mut out = format!("{{\n  \"d\": {},\n  \"D\": {},\n  \"observables\": [\n", q.d(), q.dim());
    for (i, a) in q.observables().iter().enumerate() {
        out.push_str("    ");
        write_matrix(&mut out, a.unitary(), "    ");
        out.push_str(if i < 3 { ",\n" } else { "\n" });
    }
    out.push_str("  ]\n}\n");
    out
}

pub fn state_to_json(rho: &PreparedState) -> String {
    let mut out = format!("{{\n  \"D\": {},\n  \"density\": ", rho.dim());
    write_matrix(&mut out, rho.density(), "             ");
    out.push_str("\n}\n");
    out
}

/// Parsed but not yet validated observable file.
#[derive(Debug, Clone)]
pub struct ObservableFile {
    pub d: usize,
    pub dim: usize,
    pub unitaries: [Matrix; 4],
}

fn field_usize(v: &Value, name: &str, errors: &mut Vec<String>) -> Option<usize> {
    match v.get(name) {
        None => {
            errors.push(format!("missing field `{name}`"));
            None
        }
        Some(x) => match x.as_u64() {
            Some(n) if n > 0 => Some(n as usize),
            _ => {
                errors.push(format!("field `{name}` must be a positive integer, got {x}"));
                None
            }
        },
    }
}

fn parse_entries(v: &Value, dim: usize, field: &str, errors: &mut Vec<String>) -> Option<Matrix> {
    let Some(items) = v.as_array() else {
        errors.push(format!("`{field}` must be an array of [re, im] pairs"));
        return None;
    };
    if items.len() != dim * dim {
        errors.push(format!("`{field}` has {} entries, expected {} (D x D)", items.len(), dim * dim));
        return None;
    }
    let mut entries = Vec::with_capacity(items.len());
    let before = errors.len();
    for (k, item) in items.iter().enumerate() {
        let pair = item.as_array().filter(|p| p.len() == 2);
        match pair.and_then(|p| Some(C64::new(p[0].as_f64()?, p[1].as_f64()?))) {
            Some(z) => entries.push(z),
            None => errors.push(format!("`{field}[{k}]` must be a [re, im] pair of numbers, got {item}")),
        }
    }
    if errors.len() > before {
        return None;
    }
    match Matrix::from_row_major(dim, dim, entries) {
        Ok(m) => Some(m),
        Err(e) => {
            errors.push(format!("`{field}`: {e}"));
            None
        }
    }
}

pub fn parse_observables(text: &str) -> Result<ObservableFile, CliError> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::Invalid(vec![format!("not valid JSON: {e}")]))?;
    let mut errors = Vec::new();
    let d = field_usize(&v, "d", &mut errors);
    let dim = field_usize(&v, "D", &mut errors);
    let list = match v.get("observables").and_then(Value::as_array) {
        Some(l) if l.len() == 4 => Some(l),
        Some(l) => {
            errors.push(format!("`observables` must hold 4 matrices, got {}", l.len()));
            None
        }
        None => {
            errors.push("missing or non-array field `observables`".to_string());
            None
        }
    };
    if let (Some(d), Some(dim), Some(list)) = (d, dim, list) {
        if d < 2 {
            errors.push(format!("`d` must be >= 2, got {d}"));
        }
        let mats: Vec<Option<Matrix>> = list
            .iter()
            .enumerate()
            .map(|(i, m)| parse_entries(m, dim, &format!("observables[{i}]"), &mut errors))
            .collect();
        if errors.is_empty() {
            let mats: Vec<Matrix> = mats.into_iter().map(|m| m.expect("checked")).collect();
            let unitaries: [Matrix; 4] = mats.try_into().expect("four matrices");
            return Ok(ObservableFile { d, dim, unitaries });
        }
    }
    Err(CliError::Invalid(errors))
}

/// Parses and validates spectra (non-unitary or off-root input is invalid).
pub fn quartet_from_json(text: &str, tol: &ToleranceConfig) -> Result<Quartet, CliError> {
    let f = parse_observables(text)?;
    let mut errors = Vec::new();
    let mut obs = Vec::new();
    for (i, u) in f.unitaries.into_iter().enumerate() {
        match tempcert_core::RootOfUnityObservable::from_unitary(u, f.d, tol) {
            Ok(o) => obs.push(o),
            Err(e) => errors.push(format!("observables[{i}]: {e}")),
        }
    }
    if !errors.is_empty() {
        return Err(CliError::Invalid(errors));
    }
    let [a1, a2, a3, a4]: [_; 4] = obs.try_into().expect("four observables");
    Quartet::new(a1, a2, a3, a4).map_err(|e| CliError::Invalid(vec![e.to_string()]))
}

pub fn state_from_json(text: &str, tol: &ToleranceConfig) -> Result<PreparedState, CliError> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::Invalid(vec![format!("not valid JSON: {e}")]))?;
    let mut errors = Vec::new();
    let dim = field_usize(&v, "D", &mut errors);
    let density = match (dim, v.get("density")) {
        (Some(dim), Some(m)) => parse_entries(m, dim, "density", &mut errors),
        (_, None) => {
            errors.push("missing field `density`".to_string());
            None
        }
        _ => None,
    };
    match density {
        Some(m) if errors.is_empty() => {
            PreparedState::new(m, tol).map_err(|e| CliError::Invalid(vec![format!("density: {e}")]))
        }
        _ => Err(CliError::Invalid(errors)),
    }
}

pub fn read_to_string(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Invalid(vec![format!("cannot read {}: {e}", path.display())]))
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
