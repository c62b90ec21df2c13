//! Acceptance checks, one test per criterion; each prints a `[PASS]`/`[FAIL]` line.
//!
//! Lines are written straight to stdout so they show up even when output is captured.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use tempcert_cli::commands::lemma2_angles;
use tempcert_core::certification::{lemma2_demo, strategy1_quartet, strategy1_state};
use tempcert_core::inequality::{classical_bound_search, tau_of, tau_operator_value};
use tempcert_core::*;

fn report(id: &str, name: &str, pass: bool, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "[{tag}] criterion {id} {name}: {detail}");
    let _ = out.flush();
    assert!(pass, "criterion {id} {name}: {detail}");
}

#[test]
fn criterion_1_quantum_maximum() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for d in 2..=8 {
        let q = canonical_quartet(d).unwrap();
        let rho = maximally_mixed(d).unwrap();
        let expect = 4.0 * (d as f64 - 1.0);
        worst = worst
            .max((tau_of(&q, &rho).unwrap().re - expect).abs())
            .max((tau_operator_value(&q, &rho).re - expect).abs());
    }
    let t = start.elapsed();
    report(
        "1",
        "quantum maximum",
        worst < 1e-9 && t < Duration::from_secs(5),
        format!("max |tau - 4(d-1)| = {worst:.2e} over d = 2..8, both paths, {t:.2?}"),
    );
}

#[test]
fn criterion_2_classical_bound() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut errors = Vec::new();
    for d in 2..=12 {
        let closed = classical_bound_closed(d).unwrap();
        match (classical_bound_search(d), classical_bound_enumeration(d)) {
            (Ok(a), Ok(b)) => worst = worst.max((a.value - closed).abs()).max((b.value - closed).abs()),
            (a, b) => errors.push(format!("d = {d}: {:?} {:?}", a.err(), b.err())),
        }
    }
    let c2 = (classical_bound_closed(2).unwrap() - 2.0 * 2f64.sqrt()).abs();
    let c3 = (classical_bound_closed(3).unwrap() - (1.0 + 3.0 * 3f64.sqrt())).abs();
    let t = start.elapsed();
    report(
        "2",
        "classical bound",
        errors.is_empty() && c2 <= 1e-12 && c3 <= 1e-12 && t < Duration::from_secs(10),
        format!("searches within {worst:.2e} of closed form (d = 2..12), |C_2 - 2sqrt2| = {c2:.1e}, |C_3 - (1+3sqrt3)| = {c3:.1e}, {t:.2?} {errors:?}"),
    );
}

#[test]
fn criterion_3_quantum_classical_gap() {
    let min_gap = (2..=20)
        .map(|d| 4.0 * (d as f64 - 1.0) - classical_bound_closed(d).unwrap())
        .fold(f64::INFINITY, f64::min);
    report("3", "quantum-classical gap", min_gap > 0.0, format!("min 4(d-1) - C_d over d = 2..20 is {min_gap:.4}"));
}

#[test]
fn criterion_4_sos_identities() {
    let mut canonical = 0.0f64;
    for d in 2..=6 {
        let r = sos_residuals(&canonical_quartet(d).unwrap()).unwrap();
        canonical = canonical.max(r.primary_residual).max(r.alt_residual);
    }
    let mut random = 0.0f64;
    for d in [2, 3] {
        for seed in 0..100 {
            random = random.max(sos_residuals(&haar_rotated_quartet(d, 1_000 + seed).unwrap()).unwrap().primary_residual);
        }
    }
    report(
        "4",
        "SOS identities",
        canonical < 1e-9 && random < 1e-9,
        format!("canonical d = 2..6 (both families) {canonical:.2e}, 200 random quartets {random:.2e}"),
    );
}

#[test]
fn criterion_5_repeatability() {
    let tol = ToleranceConfig::default();
    let (mut projective, mut smoothed_min) = (0.0f64, f64::INFINITY);
    let mut disagreements = 0;
    for d in [2, 3, 4] {
        let rho = maximally_mixed(d).unwrap();
        for a in canonical_quartet(d).unwrap().observables() {
            let m = Povm::from_observable(a);
            let r = repeatability_residuals(&m, &rho).unwrap();
            projective = projective.max(r.into_iter().fold(0.0, f64::max));
            let s = repeatability_residuals(&m.smoothed(0.9), &rho).unwrap();
            smoothed_min = smoothed_min.min(s.into_iter().fold(0.0, f64::max));
        }
        for seed in 0..200u64 {
            let u = haar_unitary(d, 50_000 + seed).unwrap();
            let base = Povm::from_observable(&build_z(d).unwrap().conjugated(&u));
            let m = if seed % 2 == 0 { base } else { base.smoothed(0.5 + 0.49 * seed as f64 / 200.0) };
            let r = projectivity_check(&m, &tol).unwrap();
            if !r.criteria_agree || r.projective != (seed % 2 == 0) {
                disagreements += 1;
            }
        }
    }
    report(
        "5",
        "repeatability criterion",
        projective < 1e-12 && smoothed_min > 0.01 && disagreements == 0,
        format!("projective residual {projective:.2e}, smoothed (0.9) residual >= {smoothed_min:.4}, {disagreements}/600 disagreements"),
    );
}

#[test]
fn criterion_6a_strategy_one() {
    let q = strategy1_quartet().unwrap();
    let worst = lemma2_angles(2024, 10)
        .into_iter()
        .map(|(th, ph)| (tau_of(&q, &strategy1_state(th, ph).unwrap()).unwrap().re - 4.0).abs())
        .fold(0.0, f64::max);
    report("6a", "inequivalent strategies (strategy 1)", worst < 1e-9, format!("max |tau_2 - 4| over 10 random (theta, phi) = {worst:.2e}"));
}

#[test]
fn criterion_6b_strategy_two() {
    let r = lemma2_demo().unwrap();
    report(
        "6b",
        "inequivalent strategies (strategy 2, three-decimal data)",
        (r.strategy2_tau - 4.0).abs() <= 5e-3,
        format!(
            "tau_2 = {:.4} at the given state, best over all states {:.4}; input norms {:.3?}",
            r.strategy2_tau, r.strategy2_max_tau, r.strategy2_input_norms
        ),
    );
}

#[test]
fn criterion_6c_overlap_mismatch() {
    let r = lemma2_demo().unwrap();
    report(
        "6c",
        "inequivalent strategies (overlaps)",
        r.overlap_mismatch > 0.2,
        format!("|<u1|u3>| = {:.4}, |<v1|v3>| = {:.4}, mismatch {:.4}", r.u13_overlap, r.v13_overlap, r.overlap_mismatch),
    );
}

#[test]
fn criterion_7_robustness() {
    let start = Instant::now();
    let trials = robustness_trials(0xC0FFEE, 1000, &ToleranceConfig::default()).unwrap();
    let t = start.elapsed();
    let all = trials.iter().filter(|x| x.report.all_bounds_hold).count();
    let sharp = trials.iter().filter(|x| x.report.sharp_bounds_hold).count();
    let covered: std::collections::BTreeSet<(usize, u64)> = trials.iter().map(|x| (x.d, x.delta.to_bits())).collect();
    report(
        "7",
        "robustness",
        all == 1000 && sharp == 1000 && covered.len() == 9 && t < Duration::from_secs(60),
        format!("bounds (i)-(iv) hold in {all}/1000, sharp bound in {sharp}/1000, {} (d, delta) cells, {t:.2?}", covered.len()),
    );
}

#[test]
fn criterion_8_randomness() {
    let h: Vec<f64> = (2..=8).map(|d| entropy_closed_form(d).unwrap()).collect();
    let mut dual = 0.0f64;
    let mut asym = 0.0f64;
    for d in 2..=8 {
        let q = canonical_quartet(d).unwrap();
        let base = pair_entropy(q.a1(), q.a2()).unwrap();
        for (i, j) in [(1, 2), (2, 1), (3, 4), (4, 3)] {
            let v = pair_entropy(q.get(i), q.get(j)).unwrap();
            dual = dual.max((v - h[d - 2]).abs());
            asym = asym.max((v - base).abs());
        }
    }
    let increasing = h.windows(2).all(|w| w[1] > w[0]);
    let h3 = 2.0 * 3f64.log2() - 16.0 / 9.0;
    let refs = (h[0] - 1.0).abs() < 1e-9 && (h[1] - h3).abs() < 1e-9 && (h[1] - 1.3921).abs() < 5e-5;
    report(
        "8",
        "randomness",
        dual < 1e-9 && asym < 1e-9 && increasing && refs,
        format!("H(2) = {:.4}, H(3) = {:.4}, dual-path gap {dual:.1e}, pair asymmetry {asym:.1e}, increasing = {increasing}", h[0], h[1]),
    );
}

#[test]
fn criterion_9_determinism() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for dir in &dirs {
        let status = Command::new(env!("CARGO_BIN_EXE_tempcert"))
            .args(["suite", "--dmax", "6", "--trials", "200", "--seed", "7", "--out"])
            .arg(dir.path())
            .output()
            .unwrap()
            .status;
        assert!(status.code().is_some());
    }
    let mut names: Vec<String> = std::fs::read_dir(dirs[0].path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".csv") || n == "suite_payload.json")
        .collect();
    names.sort();
    let differing: Vec<&String> = names
        .iter()
        .filter(|n| std::fs::read(dirs[0].path().join(n)).ok() != std::fs::read(dirs[1].path().join(n)).ok())
        .collect();
    report(
        "9",
        "determinism",
        names.len() >= 5 && differing.is_empty(),
        format!("{} artifacts compared, {} differ", names.len(), differing.len()),
    );
}
