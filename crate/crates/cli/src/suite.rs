//! `suite`: every check at once, plus CSV/SVG artifacts.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};
use tempcert_core::certification::{robustness_trials_on, TRIAL_DELTAS, TRIAL_DIMS};
use tempcert_core::inequality::{tau_of, tau_operator_value};
use tempcert_core::{
    build_z, canonical_quartet, classical_bound_closed, entropy_sweep, haar_rotated_quartet, haar_unitary,
    maximally_mixed, projectivity_check, repeatability_residuals, sos_residuals, Povm, ToleranceConfig,
};

use crate::commands::{self, classical_csv, classical_rows, entropy_checks, entropy_csv, robustness_csv};
use crate::error::CliError;
use crate::plot;
use crate::report::{csv_field, Outcome};

pub const DEFAULT_DMAX: usize = 6;
const RANDOM_SOS_QUARTETS: u64 = 100;
const RANDOM_POVMS: u64 = 200;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn criterion(id: u8, name: &'static str, failures: Vec<String>, ok_detail: String) -> Criterion {
    Criterion {
        id,
        name,
        pass: failures.is_empty(),
        detail: if failures.is_empty() { ok_detail } else { failures.join("; ") },
    }
}

/// Runs a check; a core error inside it fails the criterion instead of aborting the suite.
fn guarded(id: u8, name: &'static str, f: impl FnOnce() -> Result<(Vec<String>, String), CliError>) -> Criterion {
    match f() {
        Ok((failures, detail)) => criterion(id, name, failures, detail),
        Err(e) => criterion(id, name, vec![e.to_string()], String::new()),
    }
}

fn upto(hi: usize, dmax: usize) -> Vec<usize> {
    (2..=hi.min(dmax)).collect()
}

/// Criteria 1–8 and the artifact files they produce.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRun {
    pub criteria: Vec<Criterion>,
    pub files: BTreeMap<&'static str, String>,
}

pub fn run_checks(dmax: usize, trials: usize, seed: u64, tol: &ToleranceConfig) -> SuiteRun {
    let mut files = BTreeMap::new();
    let mut criteria = Vec::new();

    criteria.push(guarded(1, "quantum_maximum", || {
        let mut failures = Vec::new();
        let ds = upto(8, dmax);
        for &d in &ds {
            let q = canonical_quartet(d)?;
            let rho = maximally_mixed(d)?;
            let expect = 4.0 * (d as f64 - 1.0);
            let stats = tau_of(&q, &rho)?.re;
            let op = tau_operator_value(&q, &rho).re;
            if !((stats - expect).abs() < 1e-9 && (op - expect).abs() < 1e-9) {
                failures.push(format!("d = {d}: statistics {stats}, operator {op}, expected {expect}"));
            }
        }
        Ok((failures, format!("tau = 4(d-1) on both paths for d = 2..={}", ds.last().unwrap_or(&2))))
    }));

    criteria.push(guarded(2, "classical_bound", || {
        let rows = classical_rows(&upto(12, dmax))?;
        files.insert("classical_bound.csv", classical_csv(&rows));
        let mut failures = Vec::new();
        let exact = [(2, 2f64.sqrt() * 2.0), (3, 1.0 + 3.0 * 3f64.sqrt())];
        for (d, v) in exact {
            if d <= dmax && (classical_bound_closed(d)? - v).abs() > 1e-12 {
                failures.push(format!("C_{d} differs from {v}"));
            }
        }
        for r in &rows {
            let tol = 1e-12 * r.closed.abs().max(1.0);
            if (r.qtuple - r.closed).abs() > tol || (r.enumeration - r.closed).abs() > tol {
                failures.push(format!("d = {}: searches disagree with the closed form", r.d));
            }
        }
        Ok((failures, format!("closed form = q-tuple = enumeration for d = 2..={}", rows.len() + 1)))
    }));

    criteria.push(guarded(3, "quantum_classical_gap", || {
        let ds = upto(20, dmax);
        let failures = ds
            .iter()
            .filter_map(|&d| {
                let c = classical_bound_closed(d).ok()?;
                (4.0 * (d as f64 - 1.0) <= c).then(|| format!("d = {d}: C_d = {c}"))
            })
            .collect();
        Ok((failures, format!("4(d-1) > C_d for d = 2..={}", ds.last().unwrap_or(&2))))
    }));

    criteria.push(guarded(4, "sos_identities", || {
        let mut failures = Vec::new();
        let mut worst = 0.0f64;
        for d in upto(6, dmax) {
            let r = sos_residuals(&canonical_quartet(d)?)?;
            worst = worst.max(r.primary_residual).max(r.alt_residual);
            if !(r.primary_residual < 1e-9 && r.alt_residual < 1e-9) {
                failures.push(format!("canonical d = {d}: {:.3e} / {:.3e}", r.primary_residual, r.alt_residual));
            }
        }
        for d in upto(3, dmax) {
            for i in 0..RANDOM_SOS_QUARTETS {
                let s = seed.wrapping_add(i);
                let r = sos_residuals(&haar_rotated_quartet(d, s)?)?;
                worst = worst.max(r.primary_residual);
                if !(r.primary_residual < 1e-9) {
                    failures.push(format!("random d = {d} seed {s}: {:.3e}", r.primary_residual));
                }
            }
        }
        Ok((failures, format!("largest residual {worst:.3e}")))
    }));

    criteria.push(guarded(5, "repeatability", || {
        let mut failures = Vec::new();
        for d in upto(4, dmax) {
            let rho = maximally_mixed(d)?;
            for a in canonical_quartet(d)?.observables() {
                let m = Povm::from_observable(a);
                let r = repeatability_residuals(&m, &rho)?.into_iter().fold(0.0, f64::max);
                if !(r < 1e-12) {
                    failures.push(format!("canonical d = {d}: residual {r:.3e}"));
                }
                let s = repeatability_residuals(&m.smoothed(0.9), &rho)?.into_iter().fold(0.0, f64::max);
                if !(s > 0.01) {
                    failures.push(format!("smoothed d = {d}: residual only {s:.3e}"));
                }
            }
            let z = build_z(d)?;
            for i in 0..RANDOM_POVMS {
                let u = haar_unitary(d, seed.wrapping_mul(31).wrapping_add(i))?;
                let base = Povm::from_observable(&z.conjugated(&u));
                let m = if i % 2 == 0 { base } else { base.smoothed(0.5 + 0.49 * (i as f64 / RANDOM_POVMS as f64)) };
                let r = projectivity_check(&m, tol)?;
                if !r.criteria_agree || r.projective != (i % 2 == 0) {
                    failures.push(format!("d = {d} povm {i}: criterion and idempotency disagree"));
                }
            }
        }
        Ok((failures, format!("{RANDOM_POVMS} random POVMs per d agree")))
    }));

    criteria.push(guarded(6, "inequivalent_strategies", || {
        let o = commands::lemma2_outcome(seed)?;
        let detail = format!(
            "strategy 2 tau = {:.6}, overlap mismatch {:.4}",
            o.payload["strategy2_tau"].as_f64().unwrap_or(f64::NAN),
            o.payload["overlap_mismatch"].as_f64().unwrap_or(f64::NAN)
        );
        Ok((o.failure.into_iter().collect(), detail))
    }));

    criteria.push(guarded(7, "robustness", || {
        let dims: Vec<usize> = TRIAL_DIMS.iter().copied().filter(|&d| d <= dmax).collect();
        let run = robustness_trials_on(&dims, &TRIAL_DELTAS, seed, trials, tol)?;
        files.insert("robustness.csv", robustness_csv(&run));
        let mut points = Vec::new();
        for t in &run {
            let r = &t.report;
            points.push((r.rhs_small, r.lhs_i.max(r.lhs_ii), r.all_bounds_hold));
            points.push((r.rhs_large, r.lhs_iii.max(r.lhs_iv), r.all_bounds_hold));
        }
        files.insert("robustness.svg", plot::robustness_scatter(&points));
        let (summary, failures) = commands::robustness_summary(&run);
        Ok((failures, format!("{} trials, all bounds hold in {}", run.len(), summary["all_bounds_hold"])))
    }));

    criteria.push(guarded(8, "randomness", || {
        let ds = upto(8, dmax);
        let table = entropy_sweep(2, *ds.last().unwrap_or(&2))?;
        files.insert("entropy.csv", entropy_csv(&table.rows));
        files.insert("entropy_unreferenced.csv", entropy_csv(&table.unreferenced));
        let (summary, failures) = entropy_checks(&table, &ds, 1e-9)?;
        let points: Vec<(usize, f64)> = ds
            .iter()
            .zip(summary["entropy_bits"].as_array().into_iter().flatten())
            .map(|(&d, h)| (d, h.as_f64().unwrap_or(f64::NAN)))
            .collect();
        files.insert("entropy.svg", plot::entropy_chart(&points));
        Ok((failures, format!("H increasing over d = 2..={}", ds.last().unwrap_or(&2))))
    }));

    SuiteRun { criteria, files }
}

pub fn criteria_csv(criteria: &[Criterion]) -> String {
    let mut out = String::from("criterion,name,pass,detail\n");
    for c in criteria {
        out.push_str(&format!("{},{},{},{}\n", c.id, c.name, c.pass, csv_field(&c.detail)));
    }
    out
}

/// Full suite output: payload plus every artifact, keyed by file name.
pub struct SuiteResult {
    pub outcome: Outcome,
    pub files: BTreeMap<&'static str, String>,
}

pub fn run(dmax: usize, trials: usize, seed: u64, tol: &ToleranceConfig) -> SuiteResult {
    let first = run_checks(dmax, trials, seed, tol);
    // determinism: a second pass from the same seed must reproduce every byte
    let second = run_checks(dmax, trials, seed, tol);
    let mismatched: Vec<&str> = first
        .files
        .iter()
        .filter(|(k, v)| second.files.get(*k) != Some(v))
        .map(|(k, _)| *k)
        .collect();
    let mut failures = Vec::new();
    if first.criteria != second.criteria {
        failures.push("criteria differ between runs".to_string());
    }
    if !mismatched.is_empty() {
        failures.push(format!("artifacts differ between runs: {}", mismatched.join(", ")));
    }
    let mut criteria = first.criteria;
    criteria.push(criterion(9, "determinism", failures, "two passes are byte-identical".to_string()));

    let first_failure = criteria.iter().find(|c| !c.pass);
    let failures: Vec<String> = first_failure
        .map(|c| vec![format!("criterion {} ({}) failed: {}", c.id, c.name, c.detail)])
        .unwrap_or_default();
    let payload = json!({
        "dmax": dmax,
        "trials": trials,
        "seed": seed,
        "criteria": criteria,
        "passed": criteria.iter().filter(|c| c.pass).count(),
        "first_failure": first_failure.map(|c| Value::from(c.id)).unwrap_or(Value::Null),
    });
    let mut files = first.files;
    let csv = criteria_csv(&criteria);
    files.insert("criteria.csv", csv.clone());
    files.insert(
        "suite_payload.json",
        serde_json::to_string_pretty(&payload).expect("payload serializes") + "\n",
    );
    SuiteResult {
        outcome: Outcome::new(payload, failures).with_csv(csv),
        files,
    }
}
