//! Cross-checks between independent computation paths.

use std::collections::BTreeMap;

use tempcert_core::certification::{fingerprint_gap, strategy1_quartet, strategy2_quartet};
use tempcert_core::inequality::{tau_of, tau_operator_value};
use tempcert_core::numerics::hermitian_eigen;
use tempcert_core::sequential::{quartet_statistics, TAU_PAIRS};
use tempcert_core::*;

#[test]
fn quantum_maximum_both_paths() {
    for d in 2..=8 {
        let q = canonical_quartet(d).unwrap();
        let rho = maximally_mixed(d).unwrap();
        let expected = 4.0 * (d as f64 - 1.0);
        let stats = tau_of(&q, &rho).unwrap();
        let op = tau_operator_value(&q, &rho);
        assert!((stats.re - expected).abs() < 1e-9, "d={d}: stats {stats}");
        assert!((op.re - expected).abs() < 1e-9, "d={d}: operator {op}");
        assert!(expected > classical_bound_closed(d).unwrap());
    }
}

#[test]
fn statistics_and_operator_paths_agree_on_random_quartets() {
    for d in [2, 3] {
        let rho = maximally_mixed(d).unwrap();
        for seed in 0..50 {
            let q = haar_rotated_quartet(d, seed).unwrap();
            let a = tau_of(&q, &rho).unwrap();
            let b = tau_operator_value(&q, &rho);
            assert!((a - b).norm() < 1e-9, "d={d} seed={seed}");
        }
    }
}

#[test]
fn sos_identity_on_random_quartets() {
    for d in [2, 3] {
        for seed in 0..100 {
            let q = haar_rotated_quartet(d, 1000 + seed).unwrap();
            let r = sos_residuals(&q).unwrap();
            assert!(r.primary_residual < 1e-9, "d={d} seed={seed}: {}", r.primary_residual);
            assert!(r.alt_residual < 1e-9);
        }
    }
}

#[test]
fn random_quartets_respect_quantum_bound() {
    for d in [2, 3, 4] {
        let rho = maximally_mixed(d).unwrap();
        for seed in 0..100 {
            let tau = tau_of(&haar_rotated_quartet(d, 5000 + seed).unwrap(), &rho).unwrap().re;
            assert!(tau <= 4.0 * (d as f64 - 1.0) + 1e-9);
        }
    }
}

#[test]
fn optimality_iff_vanishing_terms() {
    let tol = ToleranceConfig::default();
    for d in 2..=4 {
        let rho = maximally_mixed(d).unwrap();
        for (q, optimal) in [
            (canonical_quartet(d).unwrap(), true),
            (perturb_quartet(d, 1e-2, 3).unwrap(), false),
            (haar_rotated_quartet(d, 77).unwrap(), false),
        ] {
            let tau = tau_of(&q, &rho).unwrap().re;
            let at_max = (tau - 4.0 * (d as f64 - 1.0)).abs() <= tol.value_tol;
            let vanish = sos_residuals(&q).unwrap().max_term_norm() < tol.structural_tol;
            assert_eq!(at_max, optimal);
            assert_eq!(vanish, optimal);
        }
    }
}

#[test]
fn classical_bound_three_ways() {
    for d in 2..=12 {
        let closed = classical_bound_closed(d).unwrap();
        let q = classical_bound_bruteforce(d).unwrap();
        let e = classical_bound_enumeration(d).unwrap();
        assert!((closed - q).abs() < 1e-12, "d={d}");
        assert!((closed - e.value).abs() < 1e-12, "d={d}");
    }
}

#[test]
fn deterministic_assignments_never_exceed_classical_bound() {
    let tol = ToleranceConfig::default();
    for d in [2, 3] {
        let bound = classical_bound_closed(d).unwrap();
        for code in 0..d.pow(4) {
            let v = [code / d.pow(3), (code / d / d) % d, (code / d) % d, code % d];
            let tables: BTreeMap<_, _> = TAU_PAIRS
                .iter()
                .map(|&(i, j)| {
                    let mut p = vec![0.0; d * d];
                    p[v[i - 1] * d + v[j - 1]] = 1.0;
                    ((i, j), JointTable::from_flat(d, p, &tol).unwrap())
                })
                .collect();
            assert!(tau_from_stats(&tables, d).unwrap().re <= bound + 1e-12, "v={v:?}");
        }
    }
}

#[test]
fn lemma1_equivalence_over_random_povms() {
    let tol = ToleranceConfig::default();
    for d in [2, 3, 4] {
        for seed in 0..200u64 {
            let u = haar_unitary(d, 90_000 + seed).unwrap();
            let base = Povm::from_observable(&build_z(d).unwrap().conjugated(&u));
            let m = if seed % 2 == 0 {
                base
            } else {
                base.smoothed(0.5 + 0.49 * (seed as f64 / 200.0))
            };
            let r = projectivity_check(&m, &tol).unwrap();
            assert!(r.criteria_agree, "d={d} seed={seed}: {r:?}");
            assert_eq!(r.projective, seed % 2 == 0);
        }
    }
}

#[test]
fn correlation_set_invariants() {
    for d in 2..=5 {
        let q = haar_rotated_quartet(d, 31).unwrap();
        let stats = quartet_statistics(&q, &maximally_mixed(d).unwrap()).unwrap();
        let (modulus, conj) = CorrelationSet::from_tables(&stats, d).invariant_residuals();
        assert!(modulus < 1e-9 && conj < 1e-9);
    }
}

#[test]
fn fingerprint_separates_lemma2_strategies() {
    let a = overlap_fingerprint(&strategy1_quartet().unwrap());
    let b = overlap_fingerprint(&strategy2_quartet().unwrap());
    assert!(fingerprint_gap(&a, &b) > 0.1);
    let target = (std::f64::consts::PI / 8.0).cos().powi(2);
    assert!(a.iter().any(|x| (x - target).abs() < 1e-12));
    assert!(b.iter().any(|x| (x - 0.5).abs() < 1e-12));
}

#[test]
fn entropy_dual_path() {
    for d in 2..=8 {
        let q = canonical_quartet(d).unwrap();
        let closed = entropy_closed_form(d).unwrap();
        for (i, j) in [(1, 2), (2, 1), (3, 4), (4, 3)] {
            assert!((pair_entropy(q.get(i), q.get(j)).unwrap() - closed).abs() < 1e-9);
        }
    }
}

#[test]
fn psd_of_sos_gap() {
    // 4(d−1)·1 − β̂ is a sum of squares, hence positive semidefinite
    for d in 2..=5 {
        let q = haar_rotated_quartet(d, 8).unwrap();
        let gap = &Matrix::identity(d).scale_real(4.0 * (d as f64 - 1.0)) - &tau_operator(&q);
        let herm = (&gap + &gap.adjoint()).scale_real(0.5);
        let (vals, _) = hermitian_eigen(&herm);
        assert!(vals[0] > -1e-9);
    }
}
