//! Root-of-unity observables and the canonical quartet.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{
    hs_norm, root_of_unity, spectral_project_roots, unitarity_residual, Matrix, ToleranceConfig, C64,
};

/// `a_k = (1 − i)/2 · exp(iπk / 2d)` without range checks.
pub(crate) fn a_coeff(k: i64, d: usize) -> C64 {
    C64::new(0.5, -0.5) * C64::from_polar(1.0, PI * k as f64 / (2.0 * d as f64))
}

/// Coefficient `a_k` of the temporal expression, `1 ≤ k ≤ d − 1`.
pub fn coeff_a(k: usize, d: usize) -> Result<C64> {
    if d < 2 {
        return Err(Error::Domain(format!("d must be >= 2, got {d}")));
    }
    if k == 0 || k >= d {
        return Err(Error::Domain(format!("k must lie in 1..={}, got {k}", d - 1)));
    }
    Ok(a_coeff(k as i64, d))
}

/// A unitary whose spectrum lies in the `d`-th roots of unity, with its spectral projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct RootOfUnityObservable {
    d: usize,
    unitary: Matrix,
    projectors: Vec<Matrix>,
}

impl RootOfUnityObservable {
    /// Decomposes `unitary` into projectors; fails if it is not unitary or has off-root eigenvalues.
    pub fn from_unitary(unitary: Matrix, d: usize, tol: &ToleranceConfig) -> Result<Self> {
        let projectors = spectral_project_roots(&unitary, d, tol)?;
        Ok(Self {
            d,
            unitary,
            projectors,
        })
    }

    /// `A = Σ_a ω^a Π^a` from a complete set of orthogonal projectors.
    pub fn from_projectors(projectors: Vec<Matrix>, d: usize, tol: &ToleranceConfig) -> Result<Self> {
        observable_from_projectors(projectors, d, tol)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Ambient Hilbert-space dimension `D`.
    pub fn dim(&self) -> usize {
        self.unitary.dim()
    }

    pub fn unitary(&self) -> &Matrix {
        &self.unitary
    }

    pub fn projectors(&self) -> &[Matrix] {
        &self.projectors
    }

    pub fn projector(&self, outcome: usize) -> &Matrix {
        &self.projectors[outcome]
    }

    /// `A^k` with `k` reduced mod `d`.
    pub fn power(&self, k: i64) -> Matrix {
        observable_power(self, k)
    }

    /// Rank of each spectral projector (trace, rounded).
    pub fn multiplicities(&self) -> Vec<usize> {
        self.projectors
            .iter()
            .map(|p| p.trace().re.round().max(0.0) as usize)
            .collect()
    }

    /// `U A U†`, projectors conjugated alongside.
    pub fn conjugated(&self, u: &Matrix) -> Self {
        Self {
            d: self.d,
            unitary: self.unitary.conjugate_by(u),
            projectors: self.projectors.iter().map(|p| p.conjugate_by(u)).collect(),
        }
    }

    /// Permutes outcome labels: new outcome `a` is old outcome `perm[a]`.
    ///
    /// The unitary is rebuilt from the permuted projectors.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.d || {
            let mut seen = vec![false; self.d];
            perm.iter().any(|&p| p >= self.d || std::mem::replace(&mut seen[p], true))
        } {
            return Err(Error::Domain(format!("{perm:?} is not a permutation of 0..{}", self.d)));
        }
        let projectors: Vec<Matrix> = perm.iter().map(|&p| self.projectors[p].clone()).collect();
        Ok(Self {
            d: self.d,
            unitary: fourier_sum(&projectors, self.d),
            projectors,
        })
    }

    /// Structural residuals: unitarity, reconstruction, completeness, orthogonality.
    pub fn residuals(&self) -> Vec<(String, f64)> {
        let n = self.dim();
        let mut out = vec![
            ("unitarity".to_string(), unitarity_residual(&self.unitary).unwrap_or(f64::INFINITY)),
            (
                "reconstruction".to_string(),
                hs_norm(&(&self.unitary - &fourier_sum(&self.projectors, self.d))),
            ),
        ];
        out.extend(projector_residuals(&self.projectors, n));
        out
    }

    pub fn validate(&self, tol: &ToleranceConfig) -> Result<()> {
        let failing: Vec<_> = self
            .residuals()
            .into_iter()
            .filter(|(_, r)| !(*r <= tol.structural_tol))
            .collect();
        if failing.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(failing))
        }
    }

    /// Every root appears exactly once (required for canonical constructions).
    pub fn is_nondegenerate(&self) -> bool {
        self.dim() == self.d && self.multiplicities().iter().all(|&m| m == 1)
    }
}

fn fourier_sum(projectors: &[Matrix], d: usize) -> Matrix {
    let n = projectors[0].dim();
    projectors
        .iter()
        .enumerate()
        .fold(Matrix::zeros(n, n), |acc, (a, p)| &acc + &p.scale(root_of_unity(d, a as f64)))
}

/// Completeness, idempotency and pairwise orthogonality residuals (HS norms).
pub(crate) fn projector_residuals(projectors: &[Matrix], n: usize) -> Vec<(String, f64)> {
    let mut out = Vec::new();
    let sum = projectors
        .iter()
        .fold(Matrix::zeros(n, n), |acc, p| &acc + p);
    out.push(("completeness".to_string(), hs_norm(&(&sum - &Matrix::identity(n)))));
    for (a, p) in projectors.iter().enumerate() {
        out.push((format!("idempotency[{a}]"), hs_norm(&(&(p * p) - p))));
        out.push((format!("hermiticity[{a}]"), hs_norm(&(p - &p.adjoint()))));
        for (b, q) in projectors.iter().enumerate().skip(a + 1) {
            out.push((format!("orthogonality[{a},{b}]"), hs_norm(&(p * q))));
        }
    }
    out
}

pub fn observable_from_projectors(
    projectors: Vec<Matrix>,
    d: usize,
    tol: &ToleranceConfig,
) -> Result<RootOfUnityObservable> {
    if d == 0 || projectors.len() != d {
        return Err(Error::Dimension(format!(
            "expected {d} projectors, got {}",
            projectors.len()
        )));
    }
    let n = projectors[0].dim();
    if projectors.iter().any(|p| !p.is_square() || p.dim() != n) {
        return Err(Error::Dimension("projectors must be square and of equal size".into()));
    }
    let failing: Vec<_> = projector_residuals(&projectors, n)
        .into_iter()
        .filter(|(_, r)| !(*r <= tol.structural_tol))
        .collect();
    if !failing.is_empty() {
        return Err(Error::Validation(failing));
    }
    Ok(RootOfUnityObservable {
        d,
        unitary: fourier_sum(&projectors, d),
        projectors,
    })
}

/// `A^k` for any integer `k`; negative powers wrap to `d − (|k| mod d)`.
pub fn observable_power(a: &RootOfUnityObservable, k: i64) -> Matrix {
    let e = k.rem_euclid(a.d as i64) as u32;
    a.unitary.pow(e)
}

fn canonical_from_unitary(u: Matrix, d: usize, name: &str) -> Result<RootOfUnityObservable> {
    let tol = ToleranceConfig::default();
    let obs = RootOfUnityObservable::from_unitary(u, d, &tol)
        .map_err(|e| Error::Construction(format!("{name}: {e}")))?;
    if !obs.is_nondegenerate() {
        return Err(Error::Construction(format!(
            "{name}: spectrum multiplicities {:?}, expected each root once",
            obs.multiplicities()
        )));
    }
    Ok(obs)
}

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::Domain(format!("d must be >= 2, got {d}")))
    } else {
        Ok(())
    }
}

/// `Z_d = Σ_i ω^i |i⟩⟨i|`.
pub fn build_z(d: usize) -> Result<RootOfUnityObservable> {
    check_d(d)?;
    let projectors = (0..d)
        .map(|a| {
            let mut m = Matrix::zeros(d, d);
            m.set(a, a, C64::new(1.0, 0.0));
            m
        })
        .collect::<Vec<_>>();
    Ok(RootOfUnityObservable {
        d,
        unitary: fourier_sum(&projectors, d),
        projectors,
    })
}

/// Raw entries of `T_d`; half-integer powers of ω on the principal branch.
pub fn t_matrix(d: usize) -> Matrix {
    Matrix::from_fn(d, d, |i, j| {
        let diag = if i == j {
            root_of_unity(d, i as f64 + 0.5)
        } else {
            C64::new(0.0, 0.0)
        };
        let sign = if (i == 0) ^ (j == 0) { -1.0 } else { 1.0 };
        diag - root_of_unity(d, (i + j + 1) as f64 / 2.0) * (2.0 / d as f64 * sign)
    })
}

/// The unitary `T_d`, whose eigenbasis pairs with `Z_d`'s in the canonical quartet.
pub fn build_t(d: usize) -> Result<RootOfUnityObservable> {
    check_d(d)?;
    canonical_from_unitary(t_matrix(d), d, "T_d")
}

/// Four observables sharing `d` and `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quartet {
    observables: [RootOfUnityObservable; 4],
}

impl Quartet {
    pub fn new(
        a1: RootOfUnityObservable,
        a2: RootOfUnityObservable,
        a3: RootOfUnityObservable,
        a4: RootOfUnityObservable,
    ) -> Result<Self> {
        let d = a1.d();
        let n = a1.dim();
        for (i, a) in [&a2, &a3, &a4].iter().enumerate() {
            if a.d() != d || a.dim() != n {
                return Err(Error::Dimension(format!(
                    "observable {} has (d, D) = ({}, {}), expected ({d}, {n})",
                    i + 2,
                    a.d(),
                    a.dim()
                )));
            }
        }
        Ok(Self {
            observables: [a1, a2, a3, a4],
        })
    }

    /// Builds a quartet from four unitaries, validating each spectrum.
    pub fn from_unitaries(unitaries: [Matrix; 4], d: usize, tol: &ToleranceConfig) -> Result<Self> {
        let [u1, u2, u3, u4] = unitaries;
        Self::new(
            RootOfUnityObservable::from_unitary(u1, d, tol)?,
            RootOfUnityObservable::from_unitary(u2, d, tol)?,
            RootOfUnityObservable::from_unitary(u3, d, tol)?,
            RootOfUnityObservable::from_unitary(u4, d, tol)?,
        )
    }

    pub fn d(&self) -> usize {
        self.observables[0].d()
    }

    pub fn dim(&self) -> usize {
        self.observables[0].dim()
    }

    /// Observable `A_i`, 1-based.
    pub fn get(&self, i: usize) -> &RootOfUnityObservable {
        &self.observables[i - 1]
    }

    pub fn a1(&self) -> &RootOfUnityObservable {
        &self.observables[0]
    }

    pub fn a2(&self) -> &RootOfUnityObservable {
        &self.observables[1]
    }

    pub fn a3(&self) -> &RootOfUnityObservable {
        &self.observables[2]
    }

    pub fn a4(&self) -> &RootOfUnityObservable {
        &self.observables[3]
    }

    pub fn observables(&self) -> &[RootOfUnityObservable; 4] {
        &self.observables
    }

    pub fn unitaries(&self) -> [Matrix; 4] {
        self.observables.clone().map(|o| o.unitary)
    }

    pub fn conjugated(&self, u: &Matrix) -> Self {
        Self {
            observables: self.observables.clone().map(|o| o.conjugated(u)),
        }
    }

    /// Replaces observable `i` (1-based).
    pub fn with_observable(&self, i: usize, obs: RootOfUnityObservable) -> Result<Self> {
        let mut observables = self.observables.clone();
        observables[i - 1] = obs;
        let [a1, a2, a3, a4] = observables;
        Self::new(a1, a2, a3, a4)
    }

    pub fn validate(&self, tol: &ToleranceConfig) -> Result<()> {
        let mut failing = Vec::new();
        for (i, a) in self.observables.iter().enumerate() {
            for (name, r) in a.residuals() {
                if !(r <= tol.structural_tol) {
                    failing.push((format!("A{}.{name}", i + 1), r));
                }
            }
        }
        if failing.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(failing))
        }
    }
}

/// Unitaries `(A_3, A_4)` solving the `k = 1` optimality system
/// `a_1 A_3^{-1} + a_1^* ω A_4^{-1} = Z_d^†`, `a_1^* A_3^{-1} + a_1 A_4^{-1} = T_d^†`.
pub fn solve_optimal_pair(z: &Matrix, t: &Matrix, d: usize) -> (Matrix, Matrix) {
    let a = a_coeff(1, d);
    let ac = a.conj();
    let w = root_of_unity(d, 1.0);
    let det = a * a - ac * ac * w;
    let zd = z.adjoint();
    let td = t.adjoint();
    let a3_inv = (&zd.scale(a) - &td.scale(ac * w)).scale(det.inv());
    let a4_inv = (&td.scale(a) - &zd.scale(ac)).scale(det.inv());
    (a3_inv.adjoint(), a4_inv.adjoint())
}

/// `A_1 = Z_d`, `A_2 = T_d`, and `A_3`, `A_4` from the optimality system.
pub fn canonical_quartet(d: usize) -> Result<Quartet> {
    check_d(d)?;
    let z = build_z(d)?;
    let t = build_t(d)?;
    let (a3, a4) = solve_optimal_pair(z.unitary(), t.unitary(), d);
    for (name, m) in [("A_3", &a3), ("A_4", &a4)] {
        let r = unitarity_residual(m)?;
        if r > ToleranceConfig::default().structural_tol {
            return Err(Error::Construction(format!("{name} not unitary (residual {r:.3e})")));
        }
    }
    let a3 = canonical_from_unitary(a3, d, "A_3")?;
    let a4 = canonical_from_unitary(a4, d, "A_4")?;
    Quartet::new(z, t, a3, a4)
}

/// Four independently Haar-rotated copies of `Z_d` (seeds `seed, seed+1, …`).
pub fn haar_rotated_quartet(d: usize, seed: u64) -> Result<Quartet> {
    let z = build_z(d)?;
    let mut obs = Vec::with_capacity(4);
    for i in 0..4 {
        obs.push(z.conjugated(&crate::numerics::haar_unitary(d, seed.wrapping_mul(4).wrapping_add(i))?));
    }
    let [a1, a2, a3, a4]: [RootOfUnityObservable; 4] = obs.try_into().expect("four observables");
    Quartet::new(a1, a2, a3, a4)
}

/// The literal closed forms `a_1^* Z + 2(a_1^*)^3 T` and `a_1 Z − a_1^* T` (not necessarily optimal).
pub fn printed_closed_forms(d: usize) -> Result<(Matrix, Matrix)> {
    check_d(d)?;
    let a = a_coeff(1, d);
    let ac = a.conj();
    let z = build_z(d)?.unitary().clone();
    let t = t_matrix(d);
    let m = &z.scale(ac) + &t.scale(ac * ac * ac * 2.0);
    let n = &z.scale(a) - &t.scale(ac);
    Ok((m, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{haar_unitary, is_unitary};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn coeff_a_values() {
        // (1 − i)/2 · e^{iπ/4} = 1/√2
        let a = coeff_a(1, 2).unwrap();
        assert!((a - c(std::f64::consts::FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        for d in 2..=12 {
            for k in 1..d {
                let ak = coeff_a(k, d).unwrap();
                assert!((ak.norm_sqr() - 0.5).abs() < 1e-15);
                assert!((coeff_a(d - k, d).unwrap() - ak.conj()).norm() < 1e-15);
            }
        }
        assert!(coeff_a(0, 3).is_err());
        assert!(coeff_a(3, 3).is_err());
        assert!(coeff_a(1, 1).is_err());
    }

    #[test]
    fn coefficient_cancellation_identities() {
        for d in 2..=12 {
            for k in 1..d {
                let a = coeff_a(k, d).unwrap();
                let wk = root_of_unity(d, k as f64);
                assert!((a * a * wk.conj() + a.conj() * a.conj()).norm() < 1e-14);
                assert!((a.conj() * a.conj() * wk + a * a).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn z_examples() {
        let z2 = build_z(2).unwrap();
        assert!(z2.unitary().max_abs_diff(&Matrix::from_diagonal(&[c(1., 0.), c(-1., 0.)])) < 1e-15);
        let z3 = build_z(3).unwrap();
        let w = root_of_unity(3, 1.0);
        assert!(z3.unitary().max_abs_diff(&Matrix::from_diagonal(&[c(1., 0.), w, w * w])) < 1e-15);
        for d in 2..=9 {
            assert!(build_z(d).unwrap().is_nondegenerate());
        }
        assert!(build_z(1).is_err());
    }

    #[test]
    fn t_examples() {
        let t2 = build_t(2).unwrap();
        let expected = Matrix::from_row_major(2, 2, vec![c(0., 0.), c(-1., 0.), c(-1., 0.), c(0., 0.)]).unwrap();
        assert!(t2.unitary().max_abs_diff(&expected) < 1e-15);
        // eigenvalue +1 on (1,−1)/√2, −1 on (1,1)/√2
        let p0 = Matrix::projector_onto(&[c(1., 0.), c(-1., 0.)]);
        let p1 = Matrix::projector_onto(&[c(1., 0.), c(1., 0.)]);
        assert!(t2.projector(0).max_abs_diff(&p0) < 1e-12);
        assert!(t2.projector(1).max_abs_diff(&p1) < 1e-12);

        let tol = ToleranceConfig::default();
        for d in 2..=16 {
            let t = build_t(d).unwrap();
            assert!(is_unitary(t.unitary(), &tol).unwrap(), "T_{d} unitary");
            assert!(t.is_nondegenerate(), "T_{d} spectrum {:?}", t.multiplicities());
        }
    }

    #[test]
    fn observable_from_projectors_examples() {
        let tol = ToleranceConfig::default();
        let z3 = build_z(3).unwrap();
        let rebuilt = observable_from_projectors(z3.projectors().to_vec(), 3, &tol).unwrap();
        assert!(rebuilt.unitary().max_abs_diff(z3.unitary()) < 1e-15);

        let p0 = Matrix::from_row_major(2, 2, vec![c(0.5, 0.), c(-0.5, 0.), c(-0.5, 0.), c(0.5, 0.)]).unwrap();
        let p1 = Matrix::from_row_major(2, 2, vec![c(0.5, 0.), c(0.5, 0.), c(0.5, 0.), c(0.5, 0.)]).unwrap();
        let t = observable_from_projectors(vec![p0, p1], 2, &tol).unwrap();
        assert!(t.unitary().max_abs_diff(build_t(2).unwrap().unitary()) < 1e-15);

        let bad = vec![Matrix::identity(2).scale_real(0.6), Matrix::identity(2).scale_real(0.4)];
        match observable_from_projectors(bad, 2, &tol) {
            Err(Error::Validation(items)) => assert!(items.iter().any(|(n, _)| n.starts_with("idempotency"))),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn powers() {
        let z3 = build_z(3).unwrap();
        assert!(observable_power(&z3, 3).max_abs_diff(&Matrix::identity(3)) < 1e-14);
        assert_eq!(observable_power(&z3, 0), Matrix::identity(3));
        assert!(observable_power(&z3, -1).max_abs_diff(&z3.unitary().adjoint()) < 1e-14);
        let t2 = build_t(2).unwrap();
        assert!(observable_power(&t2, 2).max_abs_diff(&Matrix::identity(2)) < 1e-14);
        for d in 2..=6 {
            for a in canonical_quartet(d).unwrap().observables() {
                assert!(a.power(d as i64 - 1).max_abs_diff(&a.unitary().adjoint()) < 1e-12);
            }
        }
    }

    #[test]
    fn canonical_quartet_d2_matches_hand_solution() {
        let q = canonical_quartet(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let sz = Matrix::from_diagonal(&[c(1., 0.), c(-1., 0.)]);
        let sx = Matrix::from_row_major(2, 2, vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap();
        assert!(q.a1().unitary().max_abs_diff(&sz) < 1e-14);
        assert!(q.a2().unitary().max_abs_diff(&(-&sx)) < 1e-14);
        assert!(q.a3().unitary().max_abs_diff(&(&sz - &sx).scale_real(s)) < 1e-14);
        assert!(q.a4().unitary().max_abs_diff(&(&sz + &sx).scale_real(-s)) < 1e-14);
    }

    #[test]
    fn canonical_quartet_is_valid_and_nondegenerate() {
        let tol = ToleranceConfig::default();
        for d in 2..=10 {
            let q = canonical_quartet(d).unwrap();
            q.validate(&tol).unwrap();
            for a in q.observables() {
                assert!(a.is_nondegenerate());
                assert!(a.power(d as i64).max_abs_diff(&Matrix::identity(d)) < 1e-10);
            }
        }
    }

    #[test]
    fn canonical_twisted_commutation() {
        for d in 2..=8 {
            let q = canonical_quartet(d).unwrap();
            for k in 1..d as i64 {
                let lhs = &q.a3().power(k) * &q.a4().power(-k);
                let rhs = (&q.a4().power(k) * &q.a3().power(-k)).scale(root_of_unity(d, -(k as f64)));
                assert!(hs_norm(&(&lhs - &rhs)) < 1e-9, "d={d} k={k}");
            }
        }
    }

    #[test]
    fn printed_forms_agree_only_up_to_sign_at_d2() {
        let (m, n) = printed_closed_forms(2).unwrap();
        let q = canonical_quartet(2).unwrap();
        assert!(m.max_abs_diff(q.a3().unitary()) < 1e-14);
        assert!(n.max_abs_diff(&(-q.a4().unitary())) < 1e-14);
        let (m3, _) = printed_closed_forms(3).unwrap();
        assert!(hs_norm(&(&m3 - canonical_quartet(3).unwrap().a3().unitary())) > 0.1);
    }

    #[test]
    fn conjugation_and_relabeling() {
        let tol = ToleranceConfig::default();
        let t3 = build_t(3).unwrap();
        let u = haar_unitary(3, 8).unwrap();
        let c = t3.conjugated(&u);
        c.validate(&tol).unwrap();
        let r = t3.relabeled(&[2, 0, 1]).unwrap();
        r.validate(&tol).unwrap();
        assert!(r.projector(0).max_abs_diff(t3.projector(2)) < 1e-15);
        assert!(t3.relabeled(&[0, 0, 1]).is_err());
    }
}
