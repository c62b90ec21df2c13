//! Sequential (Lüders) measurement statistics and the repeatability test for projectivity.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigen, hermiticity_residual, hs_norm, is_unitary, psd_sqrt, Matrix, ToleranceConfig};
use crate::observables::{Quartet, RootOfUnityObservable};

/// `d` positive effects summing to identity, with optional Kraus unitaries.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    effects: Vec<Matrix>,
    kraus_unitaries: Vec<Matrix>,
}

impl Povm {
    /// Effects with identity Kraus unitaries.
    pub fn new(effects: Vec<Matrix>, tol: &ToleranceConfig) -> Result<Self> {
        let n = effects.first().map(|e| e.dim()).unwrap_or(0);
        let ids = vec![Matrix::identity(n.max(1)); effects.len()];
        Self::with_kraus(effects, ids, tol)
    }

    pub fn with_kraus(effects: Vec<Matrix>, kraus_unitaries: Vec<Matrix>, tol: &ToleranceConfig) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::Dimension("a POVM needs at least one effect".into()));
        }
        if kraus_unitaries.len() != effects.len() {
            return Err(Error::Dimension(format!(
                "{} effects but {} Kraus unitaries",
                effects.len(),
                kraus_unitaries.len()
            )));
        }
        let n = effects[0].dim();
        if effects.iter().chain(&kraus_unitaries).any(|m| !m.is_square() || m.dim() != n) {
            return Err(Error::Dimension("effects and Kraus unitaries must be square and of equal size".into()));
        }
        let mut failing = Vec::new();
        let mut sum = Matrix::zeros(n, n);
        for (a, e) in effects.iter().enumerate() {
            let h = hermiticity_residual(e);
            if h > tol.structural_tol {
                failing.push((format!("hermiticity[{a}]"), h));
                continue;
            }
            let (vals, _) = hermitian_eigen(e);
            if vals[0] < -tol.structural_tol {
                failing.push((format!("positivity[{a}]"), -vals[0]));
            }
            sum = &sum + e;
        }
        let c = hs_norm(&(&sum - &Matrix::identity(n)));
        if c > tol.structural_tol {
            failing.push(("completeness".into(), c));
        }
        for (a, u) in kraus_unitaries.iter().enumerate() {
            if !is_unitary(u, tol)? {
                failing.push((format!("kraus_unitarity[{a}]"), f64::NAN));
            }
        }
        if !failing.is_empty() {
            return Err(Error::Validation(failing));
        }
        Ok(Self {
            effects,
            kraus_unitaries,
        })
    }

    /// Projective measurement given by the observable's spectral projectors.
    pub fn from_observable(a: &RootOfUnityObservable) -> Self {
        let n = a.dim();
        Self {
            effects: a.projectors().to_vec(),
            kraus_unitaries: vec![Matrix::identity(n); a.d()],
        }
    }

    /// Effects `λ·M_a + (1 − λ)/d · 1`.
    pub fn smoothed(&self, lambda: f64) -> Self {
        let d = self.d() as f64;
        let n = self.dim();
        Self {
            effects: self
                .effects
                .iter()
                .map(|e| &e.scale_real(lambda) + &Matrix::identity(n).scale_real((1.0 - lambda) / d))
                .collect(),
            kraus_unitaries: self.kraus_unitaries.clone(),
        }
    }

    pub fn d(&self) -> usize {
        self.effects.len()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn effects(&self) -> &[Matrix] {
        &self.effects
    }

    pub fn kraus_unitaries(&self) -> &[Matrix] {
        &self.kraus_unitaries
    }

    /// `K_a = U_a √M_a`.
    pub fn kraus(&self) -> Result<Vec<Matrix>> {
        self.effects
            .iter()
            .zip(&self.kraus_unitaries)
            .map(|(e, u)| Ok(u * &psd_sqrt(e)))
            .collect()
    }
}

/// A density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedState {
    density: Matrix,
}

impl PreparedState {
    pub fn new(density: Matrix, tol: &ToleranceConfig) -> Result<Self> {
        if !density.is_square() {
            return Err(Error::Dimension("density matrix must be square".into()));
        }
        let mut failing = Vec::new();
        let h = hermiticity_residual(&density);
        if h > tol.structural_tol {
            failing.push(("hermiticity".to_string(), h));
        }
        let t = (density.trace() - 1.0).norm();
        if t > tol.structural_tol {
            failing.push(("unit_trace".to_string(), t));
        }
        if h <= tol.structural_tol {
            let (vals, _) = hermitian_eigen(&density);
            if vals[0] < -tol.structural_tol {
                failing.push(("positivity".to_string(), -vals[0]));
            }
        }
        if failing.is_empty() {
            Ok(Self { density })
        } else {
            Err(Error::Validation(failing))
        }
    }

    /// `|ψ⟩⟨ψ|/⟨ψ|ψ⟩`.
    pub fn pure(psi: &[crate::C64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
        if psi.is_empty() || !(norm2 > 0.0) || !norm2.is_finite() {
            return Err(Error::Domain("state vector must be non-zero and finite".into()));
        }
        Ok(Self {
            density: Matrix::projector_onto(psi),
        })
    }

    pub fn dim(&self) -> usize {
        self.density.dim()
    }

    pub fn density(&self) -> &Matrix {
        &self.density
    }

    pub fn is_maximally_mixed(&self, tol: &ToleranceConfig) -> bool {
        let n = self.dim();
        hs_norm(&(&self.density - &Matrix::identity(n).scale_real(1.0 / n as f64))) <= tol.structural_tol
    }
}

pub fn maximally_mixed(dim: usize) -> Result<PreparedState> {
    if dim == 0 {
        return Err(Error::Dimension("D must be >= 1".into()));
    }
    Ok(PreparedState {
        density: Matrix::identity(dim).scale_real(1.0 / dim as f64),
    })
}

/// `probs[a][b] = p(a, b | first, second)`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    d: usize,
    probs: Vec<f64>,
}

impl JointTable {
    pub fn from_rows(rows: &[Vec<f64>], tol: &ToleranceConfig) -> Result<Self> {
        let d = rows.len();
        if d == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(Error::Dimension("joint table must be d x d with d >= 1".into()));
        }
        Self::from_flat(d, rows.concat(), tol)
    }

    /// Validates range (clamping round-off below zero) and normalization.
    pub fn from_flat(d: usize, mut probs: Vec<f64>, tol: &ToleranceConfig) -> Result<Self> {
        if probs.len() != d * d {
            return Err(Error::Dimension(format!("expected {} entries, got {}", d * d, probs.len())));
        }
        for p in probs.iter_mut() {
            if !p.is_finite() || *p < -tol.structural_tol || *p > 1.0 + tol.structural_tol {
                return Err(Error::Numeric(format!("probability {p} outside [0, 1]")));
            }
            *p = p.clamp(0.0, 1.0);
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > tol.value_tol {
            return Err(Error::Numeric(format!("joint table sums to {total}")));
        }
        Ok(Self { d, probs })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.probs[a * self.d + b]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.probs.chunks(self.d).map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let d = self.d;
        Self {
            d,
            probs: (0..d * d).map(|i| self.probs[(i % d) * d + i / d]).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &JointTable) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Joint statistics of `first` then `second` under the Lüders update.
pub fn luders_joint(rho: &PreparedState, first: &Povm, second: &Povm) -> Result<JointTable> {
    luders_joint_with(rho, first, second, &ToleranceConfig::default())
}

pub fn luders_joint_with(
    rho: &PreparedState,
    first: &Povm,
    second: &Povm,
    tol: &ToleranceConfig,
) -> Result<JointTable> {
    if first.dim() != rho.dim() || second.dim() != rho.dim() {
        return Err(Error::Dimension(format!(
            "state has D = {}, measurements have D = {} and {}",
            rho.dim(),
            first.dim(),
            second.dim()
        )));
    }
    if first.d() != second.d() {
        return Err(Error::Dimension(format!(
            "measurements have {} and {} outcomes",
            first.d(),
            second.d()
        )));
    }
    let d = first.d();
    let mut probs = Vec::with_capacity(d * d);
    for k in first.kraus()? {
        let post = &(&k * rho.density()) * &k.adjoint();
        for e in second.effects() {
            probs.push((e * &post).trace().re);
        }
    }
    JointTable::from_flat(d, probs, tol)
}

/// Row sums: `p(a | first)`.
pub fn first_marginal(t: &JointTable) -> Vec<f64> {
    t.probs.chunks(t.d).map(|r| r.iter().sum()).collect()
}

/// `|p(a, a | M, M) − p(a | M)|` per outcome on the maximally mixed state.
pub fn repeatability_residuals(m: &Povm, rho: &PreparedState) -> Result<Vec<f64>> {
    let tol = ToleranceConfig::default();
    if !rho.is_maximally_mixed(&tol) {
        return Err(Error::Precondition(
            "repeatability criterion is only valid on the maximally mixed state".into(),
        ));
    }
    let t = luders_joint_with(rho, m, m, &tol)?;
    let marg = first_marginal(&t);
    Ok((0..t.d).map(|a| (t.get(a, a) - marg[a]).abs()).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectivityReport {
    /// Repeatability criterion verdict.
    pub projective: bool,
    pub residuals: Vec<f64>,
    /// `||M_a² − M_a||_HS` per effect.
    pub idempotency_residuals: Vec<f64>,
    pub idempotent: bool,
    pub criteria_agree: bool,
}

pub fn projectivity_check(m: &Povm, tol: &ToleranceConfig) -> Result<ProjectivityReport> {
    let residuals = repeatability_residuals(m, &maximally_mixed(m.dim())?)?;
    let projective = residuals.iter().all(|&r| r <= tol.value_tol);
    let idempotency_residuals: Vec<f64> = m.effects().iter().map(|e| hs_norm(&(&(e * e) - e))).collect();
    let idempotent = idempotency_residuals.iter().all(|&r| r <= tol.structural_tol);
    Ok(ProjectivityReport {
        projective,
        residuals,
        idempotency_residuals,
        idempotent,
        criteria_agree: projective == idempotent,
    })
}

/// The eight ordered pairs entering the temporal expression.
pub const TAU_PAIRS: [(usize, usize); 8] = [(1, 3), (1, 4), (2, 3), (2, 4), (3, 1), (4, 1), (3, 2), (4, 2)];

/// Joint tables for every ordered pair `(i, j)` of distinct quartet members.
pub fn quartet_statistics(q: &Quartet, rho: &PreparedState) -> Result<BTreeMap<(usize, usize), JointTable>> {
    let povms: Vec<Povm> = q.observables().iter().map(Povm::from_observable).collect();
    let mut out = BTreeMap::new();
    for i in 1..=4 {
        for j in 1..=4 {
            if i != j {
                out.insert((i, j), luders_joint(rho, &povms[i - 1], &povms[j - 1])?);
            }
        }
    }
    Ok(out)
}
