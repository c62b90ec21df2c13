//! One function per subcommand; each returns an [`Outcome`] for the envelope.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tempcert_core::certification::{
    lemma2_demo, robustness_trials_on, strategy1_quartet, strategy1_state, RobustnessTrial, TRIAL_DELTAS,
    TRIAL_DIMS,
};
use tempcert_core::inequality::{
    classical_bound_search, inequality_report, sequential_tau_operator, tau_of, tau_operator_value,
};
use tempcert_core::randomness::EntropyTable;
use tempcert_core::{
    canonical_quartet, certify, classical_bound_closed, classical_bound_enumeration, entropy_closed_form,
    entropy_sweep, maximally_mixed, sos_residuals, EntropyMethod, PreparedState, Quartet, Verdict,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::io;
use crate::report::Outcome;

pub const DEFAULT_D: usize = 3;
pub const DEFAULT_TRIALS: usize = 1000;
pub const SOS_TOL: f64 = 1e-9;
pub const LEMMA2_TRIALS: usize = 10;
/// Tolerance for values computed from three-decimal input data.
pub const PRINTED_DATA_TOL: f64 = 5e-3;
pub const MIN_OVERLAP_MISMATCH: f64 = 0.2;

/// Quartet from `--observables` or the canonical one for `--d` (default 3).
pub fn load_quartet(cfg: &RunConfig) -> Result<(Quartet, &'static str), CliError> {
    match &cfg.observables_path {
        Some(path) => {
            let q = io::quartet_from_json(&io::read_to_string(path)?, &cfg.tol)?;
            if let Some(d) = cfg.d {
                if d != q.d() {
                    return Err(CliError::invalid(format!("--d {d} disagrees with d = {} in {}", q.d(), path.display())));
                }
            }
            Ok((q, "file"))
        }
        None => Ok((canonical_quartet(cfg.d.unwrap_or(DEFAULT_D))?, "canonical")),
    }
}

pub fn load_state(cfg: &RunConfig, dim: usize) -> Result<PreparedState, CliError> {
    if cfg.state == "mixed" {
        return Ok(maximally_mixed(dim)?);
    }
    let rho = io::state_from_json(&io::read_to_string(std::path::Path::new(&cfg.state))?, &cfg.tol)?;
    if rho.dim() != dim {
        return Err(CliError::invalid(format!("state has D = {}, observables have D = {dim}", rho.dim())));
    }
    Ok(rho)
}

fn emit_quartet(cfg: &RunConfig, q: &Quartet) -> Result<(), CliError> {
    if let Some(path) = &cfg.emit_observables {
        io::write_file(path, &io::quartet_to_json(q))?;
    }
    Ok(())
}

/// Dimension range from `--d` or `--dmin/--dmax`, falling back to `lo..=hi`.
pub fn d_range(cfg: &RunConfig, lo: usize, hi: usize) -> Vec<usize> {
    match cfg.d {
        Some(d) => vec![d],
        None => {
            let a = cfg.dmin.unwrap_or(lo);
            let b = cfg.dmax.unwrap_or(hi.max(a));
            (a..=b).collect()
        }
    }
}

pub fn tau(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (q, source) = load_quartet(cfg)?;
    let rho = load_state(cfg, q.dim())?;
    emit_quartet(cfg, &q)?;
    let d = q.d();
    let stats = tau_of(&q, &rho)?;
    // τ is linear in ρ: Tr[ρX] with X built from the Lüders maps
    let via_operator = (rho.density() * &sequential_tau_operator(&q)).trace();
    let rep = inequality_report(stats, d, &cfg.tol)?;
    let mut failures = Vec::new();
    if rep.tau.re > rep.quantum_max + cfg.tol.value_tol {
        failures.push(format!("tau = {} exceeds the quantum maximum {}", rep.tau.re, rep.quantum_max));
    }
    if (stats - via_operator).norm() > cfg.tol.value_tol {
        failures.push(format!("statistics and operator paths disagree by {:.3e}", (stats - via_operator).norm()));
    }
    let mut payload = json!({
        "d": d,
        "D": q.dim(),
        "observables": source,
        "state": cfg.state,
        "tau": rep.tau.re,
        "tau_imag": rep.tau.im,
        "tau_operator": via_operator.re,
        "classical_bound": rep.classical_bound,
        "quantum_max": rep.quantum_max,
        "violated": rep.violated,
        "gap": rep.gap,
    });
    if rho.is_maximally_mixed(&cfg.tol) {
        payload["tau_beta_trace"] = json!(tau_operator_value(&q, &rho).re);
    }
    Ok(Outcome::new(payload, failures))
}

pub struct ClassicalRow {
    pub d: usize,
    pub closed: f64,
    pub qtuple: f64,
    pub qtuple_argmax: Vec<usize>,
    pub enumeration: f64,
    pub enumeration_argmax: Vec<usize>,
}

pub fn classical_rows(ds: &[usize]) -> Result<Vec<ClassicalRow>, CliError> {
    ds.iter()
        .map(|&d| {
            let s = classical_bound_search(d)?;
            let e = classical_bound_enumeration(d)?;
            Ok(ClassicalRow {
                d,
                closed: classical_bound_closed(d)?,
                qtuple: s.value,
                qtuple_argmax: s.argmax,
                enumeration: e.value,
                enumeration_argmax: e.argmax,
            })
        })
        .collect()
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn classical_csv(rows: &[ClassicalRow]) -> String {
    let mut out = String::from("d,closed,qtuple,enumeration,quantum_max,qtuple_argmax,enumeration_argmax\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:e},{:e},{:e},{},{},{}\n",
            r.d,
            r.closed,
            r.qtuple,
            r.enumeration,
            4 * (r.d - 1),
            join(&r.qtuple_argmax),
            join(&r.enumeration_argmax)
        ));
    }
    out
}

pub fn classical_bound(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rows = classical_rows(&d_range(cfg, 2, 12))?;
    let mut failures = Vec::new();
    let items: Vec<Value> = rows
        .iter()
        .map(|r| {
            let qmax = 4.0 * (r.d as f64 - 1.0);
            if qmax <= r.closed {
                failures.push(format!("4(d-1) <= C_d at d = {}", r.d));
            }
            json!({
                "d": r.d,
                "closed": r.closed,
                "qtuple": r.qtuple,
                "qtuple_argmax": r.qtuple_argmax,
                "enumeration": r.enumeration,
                "enumeration_argmax": r.enumeration_argmax,
                "quantum_max": qmax,
            })
        })
        .collect();
    Ok(Outcome::new(json!({ "rows": items }), failures).with_csv(classical_csv(&rows)))
}

pub fn sos(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (q, source) = load_quartet(cfg)?;
    emit_quartet(cfg, &q)?;
    let r = sos_residuals(&q)?;
    let mut failures = Vec::new();
    if r.primary_residual >= SOS_TOL {
        failures.push(format!("primary residual {:.3e}", r.primary_residual));
    }
    if r.alt_residual >= SOS_TOL {
        failures.push(format!("alternative residual {:.3e}", r.alt_residual));
    }
    Ok(Outcome::new(
        json!({
            "d": r.d,
            "D": q.dim(),
            "observables": source,
            "primary_residual": r.primary_residual,
            "alt_residual": r.alt_residual,
            "per_term_norms": r.per_term_norms,
            "alt_per_term_norms": r.alt_per_term_norms,
            "max_term_norm": r.max_term_norm(),
        }),
        failures,
    ))
}

pub fn certify_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (q, source) = load_quartet(cfg)?;
    emit_quartet(cfg, &q)?;
    let r = certify(&q, &cfg.tol)?;
    let failures = match r.verdict {
        Verdict::Certified => vec![],
        v => vec![format!("verdict {}: {}", v.as_str(), r.reasons.join("; "))],
    };
    let c = r.condition_residuals;
    Ok(Outcome::new(
        json!({
            "d": r.d,
            "D": r.dim,
            "observables": source,
            "verdict": r.verdict.as_str(),
            "reasons": r.reasons,
            "tau": r.tau,
            "epsilon": r.epsilon,
            "repeatability_pass": r.lemma1_pass,
            "repeatability_max_residual": r.lemma1_max_residual,
            "condition_residuals": { "p5n": c.p5n, "p9": c.p9, "p10": c.p10, "p11": c.p11 },
            "fingerprint_distance": r.fingerprint_distance,
            "multiplicities": r.multiplicities,
        }),
        failures,
    ))
}

pub fn robustness_csv(trials: &[RobustnessTrial]) -> String {
    let mut out = String::from(
        "index,d,delta,seed,epsilon,lhs_i,lhs_ii,lhs_iii,lhs_iv,rhs_small,rhs_large,rhs_sharp,all_bounds_hold,sharp_bounds_hold\n",
    );
    for t in trials {
        let r = &t.report;
        out.push_str(&format!(
            "{},{},{:e},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{},{}\n",
            t.index,
            t.d,
            t.delta,
            t.seed,
            r.epsilon,
            r.lhs_i,
            r.lhs_ii,
            r.lhs_iii,
            r.lhs_iv,
            r.rhs_small,
            r.rhs_large,
            r.rhs_sharp,
            r.all_bounds_hold,
            r.sharp_bounds_hold
        ));
    }
    out
}

pub fn robustness_summary(trials: &[RobustnessTrial]) -> (Value, Vec<String>) {
    let all = trials.iter().filter(|t| t.report.all_bounds_hold).count();
    let sharp = trials.iter().filter(|t| t.report.sharp_bounds_hold).count();
    let max_ratio = trials
        .iter()
        .filter(|t| t.report.rhs_small > 0.0)
        .map(|t| t.report.lhs_i.max(t.report.lhs_ii) / t.report.rhs_small)
        .fold(0.0, f64::max);
    let mut failures = Vec::new();
    if let Some(t) = trials.iter().find(|t| !t.report.all_bounds_hold) {
        failures.push(format!("bounds (i)-(iv) fail in trial {} (d = {}, delta = {})", t.index, t.d, t.delta));
    }
    if let Some(t) = trials.iter().find(|t| !t.report.sharp_bounds_hold) {
        failures.push(format!("sharp bound fails in trial {} (d = {}, delta = {})", t.index, t.d, t.delta));
    }
    let dims: BTreeSet<usize> = trials.iter().map(|t| t.d).collect();
    (
        json!({
            "trials": trials.len(),
            "dims": dims,
            "all_bounds_hold": all,
            "sharp_bounds_hold": sharp,
            "max_lhs_over_sqrt_eps": max_ratio,
        }),
        failures,
    )
}

pub fn robustness_grid(cfg: &RunConfig) -> (Vec<usize>, Vec<f64>) {
    let dims = cfg.d.map(|d| vec![d]).unwrap_or_else(|| TRIAL_DIMS.to_vec());
    let deltas = cfg.delta.map(|x| vec![x]).unwrap_or_else(|| TRIAL_DELTAS.to_vec());
    (dims, deltas)
}

pub fn robustness(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (dims, deltas) = robustness_grid(cfg);
    let trials = robustness_trials_on(&dims, &deltas, cfg.seed, cfg.trials.unwrap_or(DEFAULT_TRIALS), &cfg.tol)?;
    let (mut payload, failures) = robustness_summary(&trials);
    payload["deltas"] = json!(deltas);
    Ok(Outcome::new(payload, failures).with_csv(robustness_csv(&trials)))
}

pub fn entropy_csv(rows: &[tempcert_core::EntropyRow]) -> String {
    let mut out = String::from("d,pair,entropy_bits,method\n");
    for r in rows {
        out.push_str(&format!(
            "{},{}-{},{:e},{}\n",
            r.d,
            r.pair.0,
            r.pair.1,
            r.entropy_bits,
            r.method.as_str()
        ));
    }
    out
}

/// Monotonicity, pair symmetry and reference values of an entropy sweep.
pub fn entropy_checks(table: &EntropyTable, ds: &[usize], tol: f64) -> Result<(Value, Vec<String>), CliError> {
    let mut failures = Vec::new();
    let series: Vec<f64> = ds
        .iter()
        .map(|&d| table.value(d, (1, 2), EntropyMethod::Overlap).unwrap_or(f64::NAN))
        .collect();
    for w in ds.windows(2).zip(series.windows(2)) {
        let ((d0, d1), (h0, h1)) = ((w.0[0], w.0[1]), (w.1[0], w.1[1]));
        if h1 <= h0 {
            failures.push(format!("entropy not increasing between d = {d0} ({h0}) and d = {d1} ({h1})"));
        }
    }
    let mut max_asym = 0.0f64;
    let mut max_dual = 0.0f64;
    for (&d, &h) in ds.iter().zip(&series) {
        let closed = entropy_closed_form(d)?;
        for pair in tempcert_core::randomness::REFERENCED_PAIRS {
            let v = table.value(d, pair, EntropyMethod::Overlap).unwrap_or(f64::NAN);
            max_asym = max_asym.max((v - h).abs());
            max_dual = max_dual.max((v - closed).abs());
        }
    }
    if !(max_asym < tol) {
        failures.push(format!("referenced pairs differ by {max_asym:.3e}"));
    }
    if !(max_dual < tol) {
        failures.push(format!("overlap and closed form differ by {max_dual:.3e}"));
    }
    let references = [(2usize, 1.0), (3, 2.0 * 3f64.log2() - 16.0 / 9.0)];
    for (d, expect) in references {
        if let Some(h) = table.value(d, (1, 2), EntropyMethod::Overlap) {
            if (h - expect).abs() > tol {
                failures.push(format!("H at d = {d} is {h}, expected {expect}"));
            }
        }
    }
    Ok((
        json!({
            "d": ds,
            "entropy_bits": series,
            "max_pair_asymmetry": max_asym,
            "max_dual_path_gap": max_dual,
        }),
        failures,
    ))
}

pub fn randomness(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let ds = d_range(cfg, 2, 8);
    let table = entropy_sweep(ds[0], *ds.last().expect("non-empty range"))?;
    let (mut payload, failures) = entropy_checks(&table, &ds, cfg.tol.value_tol)?;
    payload["unreferenced"] = table
        .unreferenced
        .iter()
        .map(|r| json!({"d": r.d, "pair": format!("{}-{}", r.pair.0, r.pair.1), "entropy_bits": r.entropy_bits, "method": r.method.as_str()}))
        .collect();
    Ok(Outcome::new(payload, failures).with_csv(entropy_csv(&table.rows)))
}

/// Seeded `(θ, φ)` pairs for the strategy-1 sweep.
pub fn lemma2_angles(seed: u64, n: usize) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI))).collect()
}

pub fn lemma2_outcome(seed: u64) -> Result<Outcome, CliError> {
    let demo = lemma2_demo()?;
    let q1 = strategy1_quartet()?;
    let mut sweep = Vec::new();
    let mut worst = 0.0f64;
    for (theta, phi) in lemma2_angles(seed, LEMMA2_TRIALS) {
        let t = tau_of(&q1, &strategy1_state(theta, phi)?)?.re;
        worst = worst.max((t - 4.0).abs());
        sweep.push(json!({"theta": theta, "phi": phi, "tau": t}));
    }
    let mut failures = Vec::new();
    if !(worst < 1e-9) {
        failures.push(format!("strategy 1 misses 4 by {worst:.3e}"));
    }
    if !((demo.strategy2_tau - 4.0).abs() <= PRINTED_DATA_TOL) {
        failures.push(format!(
            "strategy 2 gives tau = {:.6} (best over all states {:.6}), not 4 +- {PRINTED_DATA_TOL}",
            demo.strategy2_tau, demo.strategy2_max_tau
        ));
    }
    if !(demo.overlap_mismatch > MIN_OVERLAP_MISMATCH) {
        failures.push(format!("overlap mismatch only {:.4}", demo.overlap_mismatch));
    }
    Ok(Outcome::new(
        json!({
            "strategy1_sweep": sweep,
            "strategy1_max_deviation": worst,
            "strategy1_tau": demo.strategy1_tau,
            "strategy2_tau": demo.strategy2_tau,
            "strategy2_max_tau": demo.strategy2_max_tau,
            "strategy2_input_norms": demo.strategy2_input_norms,
            "u13_overlap": demo.u13_overlap,
            "v13_overlap": demo.v13_overlap,
            "overlap_mismatch": demo.overlap_mismatch,
            "fingerprint_gap": demo.fingerprint_gap,
        }),
        failures,
    ))
}

pub fn lemma2(cfg: &RunConfig) -> Result<Outcome, CliError> {
    lemma2_outcome(cfg.seed)
}
