//! Self-testing pipeline, the non-uniqueness example, and robustness under perturbation.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::inequality::{sequential_tau_operator, tau_of};
use crate::numerics::{
    expm_i_hermitian, hermitian_eigen, hs_norm, random_hermitian_unit, root_of_unity, seeded_rng, Matrix,
    ToleranceConfig, C64,
};
use crate::observables::{a_coeff, canonical_quartet, Quartet, RootOfUnityObservable};
use crate::sequential::{maximally_mixed, projectivity_check, Povm, PreparedState};
use crate::sos::build_b;

/// Largest HS residual of each algebraic condition family, over `x` and `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionResiduals {
    /// `A_x^k B_x^{(k)} = 1`
    pub p5n: f64,
    /// `(B_x^{(k)})† B_x^{(k)} = 1`
    pub p9: f64,
    /// `A_3^k A_4^{−k} = ω^{−k} A_4^k A_3^{−k}`
    pub p10: f64,
    /// `B_x^{(k)} = (B_x^{(1)})^k`
    pub p11: f64,
}

impl ConditionResiduals {
    pub fn max(&self) -> f64 {
        self.p5n.max(self.p9).max(self.p10).max(self.p11)
    }
}

pub fn algebraic_residuals(q: &Quartet, rho: &PreparedState) -> Result<ConditionResiduals> {
    if !rho.is_maximally_mixed(&ToleranceConfig::default()) {
        return Err(Error::Precondition("conditions are derived for the maximally mixed state".into()));
    }
    let d = q.d();
    let id = Matrix::identity(q.dim());
    let mut r = ConditionResiduals {
        p5n: 0.0,
        p9: 0.0,
        p10: 0.0,
        p11: 0.0,
    };
    for x in 1..=2u8 {
        let b1 = build_b(x, 1, q.a3(), q.a4())?;
        for k in 1..d {
            let b = build_b(x, k, q.a3(), q.a4())?;
            r.p5n = r.p5n.max(hs_norm(&(&(&q.get(x as usize).power(k as i64) * &b) - &id)));
            r.p9 = r.p9.max(hs_norm(&(&(&b.adjoint() * &b) - &id)));
            r.p11 = r.p11.max(hs_norm(&(&b - &b1.pow(k as u32))));
        }
    }
    for k in 1..d as i64 {
        let lhs = &q.a3().power(k) * &q.a4().power(-k);
        let rhs = (&q.a4().power(k) * &q.a3().power(-k)).scale(root_of_unity(d, -(k as f64)));
        r.p10 = r.p10.max(hs_norm(&(&lhs - &rhs)));
    }
    Ok(r)
}

/// Sorted `Tr[Π_i^a Π_j^b]` over `i < j` and all outcome pairs.
pub fn overlap_fingerprint(q: &Quartet) -> Vec<f64> {
    let mut out = Vec::with_capacity(6 * q.d() * q.d());
    for i in 1..=4 {
        for j in i + 1..=4 {
            for p in q.get(i).projectors() {
                for r in q.get(j).projectors() {
                    out.push((p * r).trace().re);
                }
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Max entrywise difference of two sorted fingerprints; infinite if lengths differ.
pub fn fingerprint_gap(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Distance to the canonical quartet's fingerprint, overlaps scaled by `d/D`.
pub fn fingerprint_distance(q: &Quartet) -> Result<f64> {
    let scale = q.d() as f64 / q.dim() as f64;
    let own: Vec<f64> = overlap_fingerprint(q).into_iter().map(|x| x * scale).collect();
    Ok(fingerprint_gap(&own, &overlap_fingerprint(&canonical_quartet(q.d())?)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    NotCertified,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Certified => "certified",
            Verdict::NotCertified => "not_certified",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificationReport {
    pub d: usize,
    pub dim: usize,
    pub lemma1_pass: [bool; 4],
    pub lemma1_max_residual: [f64; 4],
    pub tau: f64,
    pub epsilon: f64,
    pub condition_residuals: ConditionResiduals,
    pub fingerprint_distance: f64,
    pub multiplicities: [Vec<usize>; 4],
    pub verdict: Verdict,
    /// Human-readable reasons behind a non-certified verdict.
    pub reasons: Vec<String>,
}

/// Runs projectivity, τ, algebraic and fingerprint checks on the maximally mixed state.
pub fn certify(q: &Quartet, tol: &ToleranceConfig) -> Result<CertificationReport> {
    let d = q.d();
    let dim = q.dim();
    let rho = maximally_mixed(dim)?;
    let mut lemma1_pass = [false; 4];
    let mut lemma1_max_residual = [0.0; 4];
    for (i, a) in q.observables().iter().enumerate() {
        let r = projectivity_check(&Povm::from_observable(a), tol)?;
        lemma1_pass[i] = r.projective;
        lemma1_max_residual[i] = r.residuals.iter().copied().fold(0.0, f64::max);
    }
    let tau = tau_of(q, &rho)?.re;
    let epsilon = 4.0 * (d as f64 - 1.0) - tau;
    if epsilon < -tol.value_tol {
        return Err(Error::Consistency(format!(
            "tau = {tau} exceeds the quantum maximum {}",
            4 * (d - 1)
        )));
    }
    let condition_residuals = algebraic_residuals(q, &rho)?;
    let fp = fingerprint_distance(q)?;
    let multiplicities = q.observables().clone().map(|o| o.multiplicities());

    let mut reasons = Vec::new();
    if !lemma1_pass.iter().all(|&p| p) {
        reasons.push("repeatability criterion failed".to_string());
    }
    if epsilon > tol.value_tol {
        reasons.push(format!("tau falls short of 4(d-1) by {epsilon:.3e}"));
    }
    let verdict = if dim % d != 0 {
        reasons.push(format!("D = {dim} is not a multiple of d = {d}"));
        Verdict::NotCertified
    } else if !reasons.is_empty() {
        Verdict::NotCertified
    } else if dim > d {
        reasons.push(format!("D = {dim} > d = {d}: block structure not checked"));
        Verdict::Inconclusive
    } else if fp > tol.value_tol {
        reasons.push(format!("overlap fingerprint differs from canonical by {fp:.3e}"));
        Verdict::NotCertified
    } else {
        Verdict::Certified
    };
    Ok(CertificationReport {
        d,
        dim,
        lemma1_pass,
        lemma1_max_residual,
        tau,
        epsilon,
        condition_residuals,
        fingerprint_distance: fp,
        multiplicities,
        verdict,
        reasons,
    })
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn normalized(v: &[C64]) -> Vec<C64> {
    let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

/// Binary observable with `|u⟩` as outcome `plus` (0 → eigenvalue +1, 1 → −1).
fn rank_one_binary(u: &[C64], plus: bool) -> Result<RootOfUnityObservable> {
    let p = Matrix::projector_onto(&normalized(u));
    let q = &Matrix::identity(u.len()) - &p;
    let projs = if plus { vec![p, q] } else { vec![q, p] };
    RootOfUnityObservable::from_projectors(projs, 2, &ToleranceConfig::default())
}

/// `|u⟩` carries outcome +1 for `A_1..A_3` and −1 for `A_4`.
fn binary_quartet(vectors: &[Vec<C64>; 4]) -> Result<Quartet> {
    Quartet::new(
        rank_one_binary(&vectors[0], true)?,
        rank_one_binary(&vectors[1], true)?,
        rank_one_binary(&vectors[2], true)?,
        rank_one_binary(&vectors[3], false)?,
    )
}

pub fn strategy1_vectors() -> [Vec<C64>; 4] {
    let z = c(0.0, 0.0);
    let (c4, s4) = ((PI / 4.0).cos(), (PI / 4.0).sin());
    let (c8, s8) = ((PI / 8.0).cos(), (PI / 8.0).sin());
    [
        vec![c(1.0, 0.0), z, z],
        vec![c(c4, 0.0), c(s4, 0.0), z],
        vec![c(c8, 0.0), c(s8, 0.0), z],
        vec![c(c8, 0.0), c(-s8, 0.0), z],
    ]
}

/// The 3-decimal vectors as printed (not normalized).
pub fn strategy2_vectors() -> [Vec<C64>; 4] {
    let h = 0.5 * C64::from_polar(1.0, PI / 4.0);
    [
        vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        vec![c(0.582, 0.0), c(-0.275, 0.308), c(-0.264, 0.317)],
        vec![c((PI / 4.0).cos(), 0.0), h, h],
        vec![c(0.910, 0.0), c(-0.135, -0.384), c(-0.104, -0.393)],
    ]
}

pub fn strategy2_state_vector() -> Vec<C64> {
    vec![c(0.427, 0.0), c(-0.512, -0.548), c(0.067, 0.747)]
}

pub fn strategy1_quartet() -> Result<Quartet> {
    binary_quartet(&strategy1_vectors())
}

/// Strategy-2 observables built from the normalized printed vectors.
pub fn strategy2_quartet() -> Result<Quartet> {
    binary_quartet(&strategy2_vectors())
}

pub fn strategy1_state(theta: f64, phi: f64) -> Result<PreparedState> {
    PreparedState::pure(&[
        c(theta.cos(), 0.0),
        C64::from_polar(theta.sin(), phi),
        c(0.0, 0.0),
    ])
}

pub fn strategy2_state() -> Result<PreparedState> {
    PreparedState::pure(&strategy2_state_vector())
}

fn abs_inner(u: &[C64], v: &[C64]) -> f64 {
    let (u, v) = (normalized(u), normalized(v));
    u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum::<C64>().norm()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma2Report {
    pub theta: f64,
    pub phi: f64,
    pub strategy1_tau: f64,
    pub strategy2_tau: f64,
    /// Largest τ_2 reachable by any state with the strategy-2 observables.
    pub strategy2_max_tau: f64,
    /// Norms of the printed strategy-2 vectors `v_1..v_4` and state.
    pub strategy2_input_norms: [f64; 5],
    pub u13_overlap: f64,
    pub v13_overlap: f64,
    pub overlap_mismatch: f64,
    pub fingerprint_gap: f64,
}

pub fn lemma2_demo() -> Result<Lemma2Report> {
    lemma2_demo_at(PI / 5.0, 1.1)
}

pub fn lemma2_demo_at(theta: f64, phi: f64) -> Result<Lemma2Report> {
    let q1 = strategy1_quartet()?;
    let q2 = strategy2_quartet()?;
    let strategy1_tau = tau_of(&q1, &strategy1_state(theta, phi)?)?.re;
    let strategy2_tau = tau_of(&q2, &strategy2_state()?)?.re;
    let (vals, _) = hermitian_eigen(&sequential_tau_operator(&q2));
    let strategy2_max_tau = *vals.last().unwrap_or(&f64::NAN);
    let (u, v) = (strategy1_vectors(), strategy2_vectors());
    let norm = |x: &[C64]| x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let u13_overlap = abs_inner(&u[0], &u[2]);
    let v13_overlap = abs_inner(&v[0], &v[2]);
    Ok(Lemma2Report {
        theta,
        phi,
        strategy1_tau,
        strategy2_tau,
        strategy2_max_tau,
        strategy2_input_norms: [norm(&v[0]), norm(&v[1]), norm(&v[2]), norm(&v[3]), norm(&strategy2_state_vector())],
        u13_overlap,
        v13_overlap,
        overlap_mismatch: (u13_overlap - v13_overlap).abs(),
        fingerprint_gap: fingerprint_gap(&overlap_fingerprint(&q1), &overlap_fingerprint(&q2)),
    })
}

pub const MAX_PERTURBATION: f64 = 0.5;

/// Canonical quartet with each member conjugated by an independent `exp(iδH)`.
pub fn perturb_quartet(d: usize, delta: f64, seed: u64) -> Result<Quartet> {
    if !(0.0..=MAX_PERTURBATION).contains(&delta) {
        return Err(Error::Domain(format!("delta must lie in [0, {MAX_PERTURBATION}], got {delta}")));
    }
    let q = canonical_quartet(d)?;
    if delta == 0.0 {
        return Ok(q);
    }
    let mut rng = seeded_rng(seed);
    let obs = q.observables().clone().map(|a| {
        let h = random_hermitian_unit(d, &mut rng);
        a.conjugated(&expm_i_hermitian(&h, delta))
    });
    let [a1, a2, a3, a4] = obs;
    Quartet::new(a1, a2, a3, a4)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessReport {
    pub d: usize,
    pub epsilon: f64,
    pub lhs_i: f64,
    pub lhs_ii: f64,
    pub lhs_iii: f64,
    pub lhs_iv: f64,
    /// `√ε`
    pub rhs_small: f64,
    /// `2√ε(2 + √ε)`
    pub rhs_large: f64,
    /// `√(ε/D)`
    pub rhs_sharp: f64,
    pub all_bounds_hold: bool,
    pub sharp_bounds_hold: bool,
}

/// The four operators whose deviation the robustness bounds control, each times ρ.
fn robustness_operators(q: &Quartet, rho: &Matrix) -> [Matrix; 4] {
    let d = q.d();
    let a = a_coeff(1, d);
    let w = root_of_unity(d, 1.0);
    let [a1, a2, a3, a4] = q.unitaries();
    let (a3d, a4d) = (a3.adjoint(), a4.adjoint());
    let i = &a1 * &(&a3d.scale(a) + &a4d.scale(a.conj() * w));
    let ii = &a2 * &(&a3d.scale(a.conj()) + &a4d.scale(a));
    let iii = &(&a4 * &a3d) - &(&a3 * &a4d).scale(w);
    let iv = &(&a2 * &a1.adjoint()).scale(w) - &(&a1 * &a2.adjoint());
    [&i * rho, &ii * rho, &iii * rho, &iv * rho]
}

pub fn robustness_check(
    ideal: &Quartet,
    actual: &Quartet,
    rho: &PreparedState,
    tol: &ToleranceConfig,
) -> Result<RobustnessReport> {
    if !rho.is_maximally_mixed(tol) {
        return Err(Error::Precondition("robustness bounds assume the maximally mixed state".into()));
    }
    if ideal.d() != actual.d() || ideal.dim() != actual.dim() || rho.dim() != actual.dim() {
        return Err(Error::Dimension("ideal, actual and state must share d and D".into()));
    }
    for (i, a) in actual.observables().iter().enumerate() {
        if !projectivity_check(&Povm::from_observable(a), tol)?.projective {
            return Err(Error::Precondition(format!("A_{} fails the repeatability criterion", i + 1)));
        }
    }
    let d = actual.d();
    let tau = tau_of(actual, rho)?.re;
    let raw_eps = 4.0 * (d as f64 - 1.0) - tau;
    if raw_eps < -tol.value_tol {
        return Err(Error::Consistency(format!("tau = {tau} exceeds the quantum maximum")));
    }
    let epsilon = raw_eps.max(0.0);
    let ops = robustness_operators(actual, rho.density());
    let ideal_ops = robustness_operators(ideal, rho.density());
    let lhs: Vec<f64> = ops.iter().zip(&ideal_ops).map(|(x, y)| hs_norm(&(x - y))).collect();
    let rhs_small = epsilon.sqrt();
    let rhs_large = 2.0 * rhs_small * (2.0 + rhs_small);
    let rhs_sharp = (epsilon / actual.dim() as f64).sqrt();
    let v = tol.value_tol;
    Ok(RobustnessReport {
        d,
        epsilon,
        lhs_i: lhs[0],
        lhs_ii: lhs[1],
        lhs_iii: lhs[2],
        lhs_iv: lhs[3],
        rhs_small,
        rhs_large,
        rhs_sharp,
        all_bounds_hold: lhs[0] < rhs_small + v
            && lhs[1] < rhs_small + v
            && lhs[2] <= rhs_large + v
            && lhs[3] <= rhs_large + v,
        sharp_bounds_hold: lhs[0] <= rhs_sharp + v && lhs[1] <= rhs_sharp + v,
    })
}

pub const TRIAL_DIMS: [usize; 3] = [2, 3, 4];
pub const TRIAL_DELTAS: [f64; 3] = [1e-4, 1e-3, 1e-2];

#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessTrial {
    pub index: usize,
    pub d: usize,
    pub delta: f64,
    pub seed: u64,
    pub report: RobustnessReport,
}

/// Trial `t` uses `d = TRIAL_DIMS[t % 3]`, `δ = TRIAL_DELTAS[(t / 3) % 3]`, seed `base + t`.
pub fn robustness_trials(base_seed: u64, trials: usize, tol: &ToleranceConfig) -> Result<Vec<RobustnessTrial>> {
    robustness_trials_on(&TRIAL_DIMS, &TRIAL_DELTAS, base_seed, trials, tol)
}

/// Same schedule over arbitrary dimension and δ grids.
pub fn robustness_trials_on(
    dims: &[usize],
    deltas: &[f64],
    base_seed: u64,
    trials: usize,
    tol: &ToleranceConfig,
) -> Result<Vec<RobustnessTrial>> {
    if dims.is_empty() || deltas.is_empty() {
        return Err(Error::Domain("robustness grid needs at least one d and one delta".into()));
    }
    let ideals: Vec<Quartet> = dims.iter().map(|&d| canonical_quartet(d)).collect::<Result<_>>()?;
    let states: Vec<PreparedState> = dims.iter().map(|&d| maximally_mixed(d)).collect::<Result<_>>()?;
    (0..trials)
        .map(|t| {
            let slot = t % dims.len();
            let d = dims[slot];
            let delta = deltas[(t / dims.len()) % deltas.len()];
            let seed = base_seed.wrapping_add(t as u64);
            let actual = perturb_quartet(d, delta, seed)?;
            let report = robustness_check(&ideals[slot], &actual, &states[slot], tol)?;
            Ok(RobustnessTrial {
                index: t,
                d,
                delta,
                seed,
                report,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::haar_unitary;
    use crate::sequential::quartet_statistics;

    #[test]
    fn canonical_residuals_vanish() {
        for d in 2..=6 {
            let r = algebraic_residuals(&canonical_quartet(d).unwrap(), &maximally_mixed(d).unwrap()).unwrap();
            assert!(r.max() < 1e-9, "d={d} {r:?}");
        }
    }

    #[test]
    fn adjoint_a4_breaks_twist() {
        let q = canonical_quartet(3).unwrap();
        let tol = ToleranceConfig::default();
        let flipped = RootOfUnityObservable::from_unitary(q.a4().unitary().adjoint(), 3, &tol).unwrap();
        let q = q.with_observable(4, flipped).unwrap();
        let r = algebraic_residuals(&q, &maximally_mixed(3).unwrap()).unwrap();
        assert!(r.p10 > 0.1);
    }

    #[test]
    fn fingerprint_invariance() {
        let q = canonical_quartet(3).unwrap();
        let u = haar_unitary(3, 7).unwrap();
        assert!(fingerprint_distance(&q.conjugated(&u)).unwrap() < 1e-9);
        let shuffled = q.with_observable(2, q.a2().relabeled(&[1, 2, 0]).unwrap()).unwrap();
        assert!(fingerprint_distance(&shuffled).unwrap() < 1e-9);
    }

    #[test]
    fn certify_canonical_and_conjugated() {
        let tol = ToleranceConfig::default();
        for d in 2..=5 {
            let q = canonical_quartet(d).unwrap();
            assert_eq!(certify(&q, &tol).unwrap().verdict, Verdict::Certified);
            let u = haar_unitary(d, 11 + d as u64).unwrap();
            let r = certify(&q.conjugated(&u), &tol).unwrap();
            assert_eq!(r.verdict, Verdict::Certified, "{r:?}");
        }
    }

    #[test]
    fn certified_reproduces_canonical_tables() {
        let tol = ToleranceConfig::default();
        let q = canonical_quartet(3).unwrap();
        let c = q.conjugated(&haar_unitary(3, 5).unwrap());
        assert_eq!(certify(&c, &tol).unwrap().verdict, Verdict::Certified);
        let rho = maximally_mixed(3).unwrap();
        let a = quartet_statistics(&q, &rho).unwrap();
        let b = quartet_statistics(&c, &rho).unwrap();
        for (k, t) in &a {
            assert!(t.max_abs_diff(&b[k]) < 1e-9);
        }
    }

    #[test]
    fn certify_rejects_perturbed_and_handles_larger_dim() {
        let tol = ToleranceConfig::default();
        let r = certify(&perturb_quartet(3, 0.05, 1).unwrap(), &tol).unwrap();
        assert_eq!(r.verdict, Verdict::NotCertified);
        assert!(r.epsilon > 0.0);

        let q = canonical_quartet(2).unwrap();
        let id2 = Matrix::identity(2);
        let tol_obs = ToleranceConfig::default();
        let lifted: Vec<_> = q
            .observables()
            .iter()
            .map(|a| RootOfUnityObservable::from_unitary(a.unitary().kron(&id2), 2, &tol_obs).unwrap())
            .collect();
        let big = Quartet::new(lifted[0].clone(), lifted[1].clone(), lifted[2].clone(), lifted[3].clone()).unwrap();
        let r = certify(&big, &tol).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(r.fingerprint_distance < 1e-9);

        let l2 = certify(&strategy2_quartet().unwrap(), &tol).unwrap();
        assert_eq!(l2.verdict, Verdict::NotCertified);
    }

    #[test]
    fn lemma2_strategy1_reaches_four() {
        for (theta, phi) in [(PI / 5.0, 1.1), (0.3, -2.0), (1.2, 0.0)] {
            let r = lemma2_demo_at(theta, phi).unwrap();
            assert!((r.strategy1_tau - 4.0).abs() < 1e-9, "{r:?}");
        }
    }

    #[test]
    fn lemma2_overlaps() {
        let r = lemma2_demo().unwrap();
        assert!((r.u13_overlap - (PI / 8.0).cos()).abs() < 1e-12);
        assert!((r.v13_overlap - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(r.overlap_mismatch > 0.2);
        assert!(r.fingerprint_gap > 0.1);
        // the printed strategy-2 data is not a maximal strategy
        assert!(r.strategy2_max_tau < 3.0);
        assert!(r.strategy2_tau <= r.strategy2_max_tau + 1e-12);
    }

    #[test]
    fn sequential_operator_matches_statistics() {
        let q = strategy1_quartet().unwrap();
        let x = sequential_tau_operator(&q);
        let rho = strategy1_state(0.4, 0.7).unwrap();
        let a = (rho.density() * &x).trace();
        let b = tau_of(&q, &rho).unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn perturbation_examples() {
        assert_eq!(perturb_quartet(3, 0.0, 9).unwrap(), canonical_quartet(3).unwrap());
        let q = perturb_quartet(3, 1e-3, 9).unwrap();
        let tol = ToleranceConfig::default();
        q.validate(&tol).unwrap();
        let eps = 8.0 - tau_of(&q, &maximally_mixed(3).unwrap()).unwrap().re;
        assert!((0.0..1e-3).contains(&eps), "eps={eps}");
        assert!(perturb_quartet(3, 0.6, 1).is_err());
        assert!(perturb_quartet(3, -0.1, 1).is_err());
    }

    #[test]
    fn robustness_identity_and_preconditions() {
        let tol = ToleranceConfig::default();
        let q = canonical_quartet(3).unwrap();
        let rho = maximally_mixed(3).unwrap();
        let r = robustness_check(&q, &q, &rho, &tol).unwrap();
        assert!(r.epsilon.abs() < 1e-12 && r.all_bounds_hold && r.sharp_bounds_hold);
        assert_eq!([r.lhs_i, r.lhs_ii, r.lhs_iii, r.lhs_iv], [0.0; 4]);
        let pure = PreparedState::pure(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(robustness_check(&q, &q, &pure, &tol), Err(Error::Precondition(_))));
    }

    #[test]
    fn robustness_trials_hold() {
        let tol = ToleranceConfig::default();
        let trials = robustness_trials(42, 90, &tol).unwrap();
        assert!(trials.iter().all(|t| t.report.all_bounds_hold && t.report.sharp_bounds_hold));
        assert_eq!((trials[4].d, trials[4].delta, trials[4].seed), (3, 1e-3, 46));
    }

    #[test]
    fn epsilon_grows_with_delta() {
        let tol = ToleranceConfig::default();
        for d in TRIAL_DIMS {
            let ideal = canonical_quartet(d).unwrap();
            let rho = maximally_mixed(d).unwrap();
            let mean = |delta: f64| {
                (0..20)
                    .map(|s| robustness_check(&ideal, &perturb_quartet(d, delta, s).unwrap(), &rho, &tol).unwrap().epsilon)
                    .sum::<f64>()
                    / 20.0
            };
            let e: Vec<f64> = TRIAL_DELTAS.iter().map(|&x| mean(x)).collect();
            assert!(e[0] <= e[1] && e[1] <= e[2], "d={d}: {e:?}");
        }
    }
}
