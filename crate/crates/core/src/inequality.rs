//! The temporal expression τ_d: statistics and operator evaluation, classical bound.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{root_of_unity, Matrix, ToleranceConfig, C64};
use crate::observables::{a_coeff, canonical_quartet, printed_closed_forms, Quartet};
use crate::sequential::{maximally_mixed, quartet_statistics, JointTable, PreparedState, TAU_PAIRS};

/// τ sums ~8(d−1) complex terms, so its imaginary part gets a looser bound than `value_tol`.
pub const TAU_REALNESS_TOL: f64 = 1e-8;

/// `⟨A_i^k A_j^l⟩ = Σ_{a,b} ω^{ak+bl} p(a, b)`.
pub fn fourier_correlator(t: &JointTable, k: i64, l: i64, d: usize) -> C64 {
    debug_assert_eq!(t.d(), d);
    let mut s = C64::new(0.0, 0.0);
    for a in 0..d {
        for b in 0..d {
            let e = (a as i64 * k + b as i64 * l).rem_euclid(d as i64);
            s += root_of_unity(d, e as f64) * t.get(a, b);
        }
    }
    s
}

/// Coefficient of pair `(i, j)` at power `k` (the `k` always sits on `A_1`/`A_2`).
fn pair_coeff(i: usize, j: usize, k: i64, d: usize) -> C64 {
    let a = a_coeff(k, d);
    let wk = root_of_unity(d, k as f64);
    match (i.min(j), i.max(j)) {
        (1, 3) | (2, 4) => a,
        (1, 4) => a.conj() * wk,
        (2, 3) => a.conj(),
        _ => unreachable!("pair ({i}, {j}) not in the temporal expression"),
    }
}

/// Powers `(first, second)` for pair `(i, j)`: `A_{1,2}` carry `k`, `A_{3,4}` carry `d − k`.
fn pair_powers(i: usize, k: i64, d: usize) -> (i64, i64) {
    if i <= 2 {
        (k, d as i64 - k)
    } else {
        (d as i64 - k, k)
    }
}

fn missing(i: usize, j: usize) -> Error {
    Error::Dimension(format!("missing joint table for pair ({i}, {j})"))
}

/// Evaluates τ_d from the eight sequential tables; errors if the result is not real.
pub fn tau_from_stats(tables: &BTreeMap<(usize, usize), JointTable>, d: usize) -> Result<C64> {
    let tau = tau_from_stats_unchecked(tables, d)?;
    if tau.im.abs() >= TAU_REALNESS_TOL {
        return Err(Error::Realness { imag: tau.im });
    }
    Ok(tau)
}

/// Per-pair contributions to τ_d, in [`TAU_PAIRS`] order.
pub fn tau_contributions(tables: &BTreeMap<(usize, usize), JointTable>, d: usize) -> Result<Vec<((usize, usize), C64)>> {
    if d < 2 {
        return Err(Error::Domain(format!("d must be >= 2, got {d}")));
    }
    TAU_PAIRS
        .iter()
        .map(|&(i, j)| {
            let t = tables.get(&(i, j)).ok_or_else(|| missing(i, j))?;
            if t.d() != d {
                return Err(Error::Dimension(format!("table ({i}, {j}) has d = {}, expected {d}", t.d())));
            }
            let s = (1..d as i64)
                .map(|k| {
                    let (p, q) = pair_powers(i, k, d);
                    pair_coeff(i, j, k, d) * fourier_correlator(t, p, q, d)
                })
                .sum();
            Ok(((i, j), s))
        })
        .collect()
}

fn tau_from_stats_unchecked(tables: &BTreeMap<(usize, usize), JointTable>, d: usize) -> Result<C64> {
    Ok(tau_contributions(tables, d)?.into_iter().map(|(_, c)| c).sum())
}

/// β̂ built from raw matrices (no validation, so it also accepts non-observables).
pub fn beta_from_matrices(d: usize, m: [&Matrix; 4]) -> Matrix {
    let n = m[0].dim();
    let mut out = Matrix::zeros(n, n);
    let pows: Vec<Vec<Matrix>> = m.iter().map(|a| (0..=d as u32).map(|e| a.pow(e)).collect()).collect();
    for k in 1..d {
        for &(i, j) in &TAU_PAIRS {
            let (p, q) = pair_powers(i, k as i64, d);
            let term = &pows[i - 1][p as usize] * &pows[j - 1][q as usize];
            out = &out + &term.scale(pair_coeff(i, j, k as i64, d));
        }
    }
    out
}

/// The operator β̂ with `Tr[ρ β̂] = τ_d` on the maximally mixed state.
pub fn tau_operator(q: &Quartet) -> Matrix {
    let u = q.unitaries();
    beta_from_matrices(q.d(), [&u[0], &u[1], &u[2], &u[3]])
}

/// `Tr[ρ β̂]`.
pub fn tau_operator_value(q: &Quartet, rho: &PreparedState) -> C64 {
    (rho.density() * &tau_operator(q)).trace()
}

/// Hermitian `X` with `τ_d(ρ) = Tr[ρ X]` for Lüders statistics on an arbitrary state.
///
/// Its largest eigenvalue is the maximum of τ_d over all preparations.
pub fn sequential_tau_operator(q: &Quartet) -> Matrix {
    let d = q.d();
    let n = q.dim();
    let mut out = Matrix::zeros(n, n);
    for &(i, j) in &TAU_PAIRS {
        let pi = q.get(i).projectors();
        for k in 1..d as i64 {
            let (p, r) = pair_powers(i, k, d);
            let c = pair_coeff(i, j, k, d);
            for (a, pa) in pi.iter().enumerate() {
                // Π_a (Σ_b ω^{b r} Π'_b) Π_a = Π_a A_j^r Π_a
                let inner = pa * &(&q.get(j).power(r) * pa);
                let w = root_of_unity(d, ((a as i64 * p).rem_euclid(d as i64)) as f64);
                out = &out + &inner.scale(c * w);
            }
        }
    }
    out
}

/// τ_d of a quartet via its sequential statistics.
pub fn tau_of(q: &Quartet, rho: &PreparedState) -> Result<C64> {
    tau_from_stats(&quartet_statistics(q, rho)?, q.d())
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub d: usize,
    pub tau: C64,
    pub classical_bound: f64,
    pub quantum_max: f64,
    pub violated: bool,
    /// `Re τ − C_d`.
    pub gap: f64,
}

pub fn inequality_report(tau: C64, d: usize, tol: &ToleranceConfig) -> Result<InequalityReport> {
    let classical_bound = classical_bound_closed(d)?;
    Ok(InequalityReport {
        d,
        tau,
        classical_bound,
        quantum_max: 4.0 * (d as f64 - 1.0),
        violated: tau.re > classical_bound + tol.value_tol,
        gap: tau.re - classical_bound,
    })
}

/// All correlators `⟨A_i^k A_j^l⟩` of a set of joint tables.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSet {
    pub d: usize,
    pub values: BTreeMap<(usize, usize, usize, usize), C64>,
}

impl CorrelationSet {
    pub fn from_tables(tables: &BTreeMap<(usize, usize), JointTable>, d: usize) -> Self {
        let mut values = BTreeMap::new();
        for (&(i, j), t) in tables {
            for k in 0..d {
                for l in 0..d {
                    values.insert((i, j, k, l), fourier_correlator(t, k as i64, l as i64, d));
                }
            }
        }
        Self { d, values }
    }

    /// Largest violation of `|c| ≤ 1` and of conjugation symmetry.
    pub fn invariant_residuals(&self) -> (f64, f64) {
        let d = self.d;
        let mut modulus = 0.0f64;
        let mut conj = 0.0f64;
        for (&(i, j, k, l), v) in &self.values {
            modulus = modulus.max(v.norm() - 1.0);
            if let Some(w) = self.values.get(&(i, j, (d - k) % d, (d - l) % d)) {
                conj = conj.max((v - w.conj()).norm());
            }
        }
        (modulus.max(0.0), conj)
    }
}

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::Domain(format!("d must be >= 2, got {d}")))
    } else {
        Ok(())
    }
}

fn cot(x: f64) -> f64 {
    x.cos() / x.sin()
}

/// `C_d = 3 cot(π/4d) − cot(3π/4d) − 4`.
pub fn classical_bound_closed(d: usize) -> Result<f64> {
    check_d(d)?;
    let x = PI / (4.0 * d as f64);
    Ok(3.0 * cot(x) - cot(3.0 * x) - 4.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalDecomposition {
    /// `α_0, …, α_{d−1}`; the upper half is the `−β` tail.
    pub alphas: Vec<f64>,
    pub s_value: f64,
}

pub fn classical_decomposition(d: usize) -> Result<ClassicalDecomposition> {
    check_d(d)?;
    let df = d as f64;
    let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
    let shift = sign * (PI / (4.0 * df)).tan();
    let alphas = (0..d)
        .map(|k| {
            let a = (cot(PI * (k as f64 + 0.25) / df) + shift) / (2.0 * df);
            // exact zero at k = ⌊d/2⌋ for odd d
            if d % 2 == 1 && k == d / 2 {
                0.0
            } else {
                a
            }
        })
        .collect();
    let s_value = 0.5 * (1.0 - cot(PI / df * ((d / 2) as f64 + 0.25)));
    Ok(ClassicalDecomposition { alphas, s_value })
}

/// `Σ_m p(first = second + k)` on table `t[first][second]`.
fn prob_first_ahead(t: &JointTable, k: i64) -> f64 {
    let d = t.d();
    (0..d).map(|m| t.get((m as i64 + k).rem_euclid(d as i64) as usize, m)).sum()
}

/// `Σ_m p(second = first + k)`.
fn prob_second_ahead(t: &JointTable, k: i64) -> f64 {
    let d = t.d();
    (0..d).map(|m| t.get(m, (m as i64 + k).rem_euclid(d as i64) as usize)).sum()
}

/// Probability form τ̃_d with `τ_d = d·τ̃_d − 8S`.
pub fn tau_tilde(tables: &BTreeMap<(usize, usize), JointTable>, d: usize) -> Result<f64> {
    let dec = classical_decomposition(d)?;
    let get = |i, j| tables.get(&(i, j)).ok_or_else(|| missing(i, j));
    let (t13, t14, t23, t24) = (get(1, 3)?, get(1, 4)?, get(2, 3)?, get(2, 4)?);
    let (t31, t41, t32, t42) = (get(3, 1)?, get(4, 1)?, get(3, 2)?, get(4, 2)?);
    let mut s = 0.0;
    for (k, &alpha) in dec.alphas.iter().enumerate() {
        let k = k as i64;
        s += alpha
            * (prob_first_ahead(t13, k)
                + prob_first_ahead(t24, k)
                + prob_first_ahead(t23, -k)
                + prob_first_ahead(t14, -k - 1)
                + prob_second_ahead(t31, k)
                + prob_second_ahead(t42, k)
                + prob_second_ahead(t32, -k)
                + prob_second_ahead(t41, -k - 1));
    }
    Ok(s)
}

/// Result of a maximization over classical strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundSearch {
    pub value: f64,
    pub argmax: Vec<usize>,
}

const BRUTE_FORCE_TOL: f64 = 1e-12;

fn agree_with_closed(d: usize, value: f64, what: &str) -> Result<()> {
    let closed = classical_bound_closed(d)?;
    // relative guard for large d where C_d ~ 4d
    if (value - closed).abs() > BRUTE_FORCE_TOL * closed.abs().max(1.0) {
        return Err(Error::Consistency(format!(
            "{what} gives {value:.15}, closed form {closed:.15} (d = {d})"
        )));
    }
    Ok(())
}

/// Maximizes `2(α_{q1} + α_{q2} + α_{q3} + α_{−1−Σq})` over `q ∈ {0..d−1}³`.
pub fn classical_bound_search(d: usize) -> Result<BoundSearch> {
    let dec = classical_decomposition(d)?;
    let al = &dec.alphas;
    let mut best = f64::NEG_INFINITY;
    let mut argmax = vec![0; 3];
    for q1 in 0..d {
        for q2 in 0..d {
            for q3 in 0..d {
                let q4 = (-1 - (q1 + q2 + q3) as i64).rem_euclid(d as i64) as usize;
                let v = 2.0 * (al[q1] + al[q2] + al[q3] + al[q4]);
                if v > best {
                    best = v;
                    argmax = vec![q1, q2, q3];
                }
            }
        }
    }
    let value = d as f64 * best - 8.0 * dec.s_value;
    agree_with_closed(d, value, "q-tuple brute force")?;
    Ok(BoundSearch { value, argmax })
}

pub fn classical_bound_bruteforce(d: usize) -> Result<f64> {
    Ok(classical_bound_search(d)?.value)
}

/// Exhaustive search over deterministic value assignments `(v_1, …, v_4)`.
///
/// Each run has fixed outcomes, so every joint table is a point mass at `(v_i, v_j)`.
pub fn classical_bound_enumeration(d: usize) -> Result<BoundSearch> {
    check_d(d)?;
    let tol = ToleranceConfig::default();
    // τ contribution of each pair for every (v_i, v_j), via the generic statistics path
    let mut lookup = vec![vec![0.0; d * d]; TAU_PAIRS.len()];
    for vi in 0..d {
        for vj in 0..d {
            let mut probs = vec![0.0; d * d];
            probs[vi * d + vj] = 1.0;
            let t = JointTable::from_flat(d, probs, &tol)?;
            let tables: BTreeMap<_, _> = TAU_PAIRS.iter().map(|&p| (p, t.clone())).collect();
            for (idx, (_, c)) in tau_contributions(&tables, d)?.into_iter().enumerate() {
                lookup[idx][vi * d + vj] = c.re;
            }
        }
    }
    let mut best = f64::NEG_INFINITY;
    let mut argmax = vec![0; 4];
    let mut v = [0usize; 4];
    for code in 0..d.pow(4) {
        let mut c = code;
        for slot in v.iter_mut().rev() {
            *slot = c % d;
            c /= d;
        }
        let total: f64 = TAU_PAIRS
            .iter()
            .enumerate()
            .map(|(idx, &(i, j))| lookup[idx][v[i - 1] * d + v[j - 1]])
            .sum();
        if total > best + 1e-13 {
            best = total;
            argmax = v.to_vec();
        }
    }
    agree_with_closed(d, best, "deterministic-assignment enumeration")?;
    Ok(BoundSearch { value: best, argmax })
}

/// Solved vs printed closed forms of `A_3`, `A_4`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrintedFormComparison {
    pub d: usize,
    pub solved_tau: f64,
    pub printed_tau: C64,
    pub printed_a3_distance: f64,
    pub printed_a4_distance: f64,
    pub solved_attains_max: bool,
    pub printed_attains_max: bool,
}

/// Evaluates `Tr[β̂]/d` for both forms and reports which one reaches `4(d − 1)`.
pub fn compare_printed_forms(d: usize, tol: &ToleranceConfig) -> Result<PrintedFormComparison> {
    let q = canonical_quartet(d)?;
    let rho = maximally_mixed(d)?;
    let solved_tau = tau_of(&q, &rho)?.re;
    let (m, n) = printed_closed_forms(d)?;
    let u = q.unitaries();
    let beta = beta_from_matrices(d, [&u[0], &u[1], &m, &n]);
    let printed_tau = beta.trace() / d as f64;
    let max = 4.0 * (d as f64 - 1.0);
    Ok(PrintedFormComparison {
        d,
        solved_tau,
        printed_tau,
        printed_a3_distance: crate::numerics::hs_norm(&(&m - &u[2])),
        printed_a4_distance: crate::numerics::hs_norm(&(&n - &u[3])),
        solved_attains_max: (solved_tau - max).abs() <= tol.value_tol,
        printed_attains_max: (printed_tau - max).norm() <= tol.value_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::build_z;

    fn table(rows: &[Vec<f64>]) -> JointTable {
        JointTable::from_rows(rows, &ToleranceConfig::default()).unwrap()
    }

    #[test]
    fn correlator_examples() {
        let diag = table(&[vec![0.5, 0.0], vec![0.0, 0.5]]);
        let flat = table(&[vec![0.25, 0.25], vec![0.25, 0.25]]);
        assert!((fourier_correlator(&diag, 0, 0, 2) - 1.0).norm() < 1e-15);
        assert!((fourier_correlator(&diag, 1, 1, 2) - 1.0).norm() < 1e-15);
        assert!(fourier_correlator(&flat, 1, 1, 2).norm() < 1e-15);
    }

    #[test]
    fn canonical_tau_values() {
        for (d, expected) in [(2, 4.0), (3, 8.0)] {
            let q = canonical_quartet(d).unwrap();
            let tau = tau_of(&q, &maximally_mixed(d).unwrap()).unwrap();
            assert!((tau.re - expected).abs() < 1e-9, "d={d}: {tau}");
        }
    }

    #[test]
    fn all_z_quartet_paths_agree() {
        let z = build_z(2).unwrap();
        let q = Quartet::new(z.clone(), z.clone(), z.clone(), z).unwrap();
        let rho = maximally_mixed(2).unwrap();
        let a = tau_of(&q, &rho).unwrap();
        let b = tau_operator_value(&q, &rho);
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn d2_beta_matches_binary_form() {
        let q = canonical_quartet(2).unwrap();
        let [a1, a2, a3, a4] = q.unitaries();
        let expected = [
            &a1 * &a3, -(&a1 * &a4), &a2 * &a3, &a2 * &a4,
            &a3 * &a1, -(&a4 * &a1), &a3 * &a2, &a4 * &a2,
        ]
        .iter()
        .fold(Matrix::zeros(2, 2), |acc, m| &acc + m)
        .scale_real(std::f64::consts::FRAC_1_SQRT_2);
        assert!(tau_operator(&q).max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn closed_form_examples() {
        assert!((classical_bound_closed(2).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((classical_bound_closed(3).unwrap() - (1.0 + 3.0 * 3f64.sqrt())).abs() < 1e-12);
        for d in 2..=20 {
            assert!(4.0 * (d as f64 - 1.0) > classical_bound_closed(d).unwrap());
        }
        assert!(classical_bound_closed(1).is_err());
    }

    #[test]
    fn decomposition_examples() {
        let dec = classical_decomposition(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((dec.alphas[0] - s).abs() < 1e-12);
        assert!(dec.alphas[1].abs() < 1e-12);
        assert!((dec.s_value - s).abs() < 1e-12);
        let c2 = 2.0 * 2.0 * (3.0 * dec.alphas[0] + dec.alphas[1]) - 8.0 * dec.s_value;
        assert!((c2 - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        for d in (3..=15).step_by(2) {
            assert_eq!(classical_decomposition(d).unwrap().alphas[d / 2], 0.0);
        }
    }

    #[test]
    fn brute_force_examples() {
        let s = classical_bound_search(2).unwrap();
        assert!((s.value - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(s.argmax, vec![0, 0, 0]);
        assert!((classical_bound_bruteforce(3).unwrap() - (1.0 + 3.0 * 3f64.sqrt())).abs() < 1e-12);
        for d in 2..=16 {
            classical_bound_search(d).unwrap();
        }
    }

    #[test]
    fn enumeration_matches_and_records_attainer() {
        for d in 2..=6 {
            let e = classical_bound_enumeration(d).unwrap();
            assert!((e.value - classical_bound_closed(d).unwrap()).abs() < 1e-12);
        }
        assert_eq!(classical_bound_enumeration(2).unwrap().argmax, vec![0, 0, 0, 0]);
    }

    #[test]
    fn arbitrary_tables_give_real_tau() {
        // k and d − k terms are complex conjugates for any real table
        let tol = ToleranceConfig::default();
        for d in 2..=5 {
            let tables: BTreeMap<_, _> = TAU_PAIRS
                .iter()
                .enumerate()
                .map(|(s, &p)| {
                    let raw: Vec<f64> = (0..d * d).map(|i| ((i * 7 + s * 13 + d) % 11) as f64 + 0.5).collect();
                    let total: f64 = raw.iter().sum();
                    (p, JointTable::from_flat(d, raw.iter().map(|x| x / total).collect(), &tol).unwrap())
                })
                .collect();
            let tau = tau_from_stats(&tables, d).unwrap();
            assert!(tau.im.abs() < 1e-12);
            let dec = classical_decomposition(d).unwrap();
            let via_tilde = d as f64 * tau_tilde(&tables, d).unwrap() - 8.0 * dec.s_value;
            assert!((tau.re - via_tilde).abs() < 1e-12, "d={d}");
        }
    }

    #[test]
    fn printed_forms_fall_short() {
        let tol = ToleranceConfig::default();
        for d in 2..=5 {
            let c = compare_printed_forms(d, &tol).unwrap();
            assert!(c.solved_attains_max);
            assert!(!c.printed_attains_max, "d={d}: {:?}", c.printed_tau);
        }
        assert!(compare_printed_forms(2, &tol).unwrap().printed_tau.norm() < 1e-12);
    }
}
