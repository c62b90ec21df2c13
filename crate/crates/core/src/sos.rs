//! Sum-of-squares certificates for the quantum maximum `4(d − 1)`.

use crate::error::{Error, Result};
use crate::inequality::tau_operator;
use crate::numerics::{hs_norm, root_of_unity, unitarity_residual, Matrix, ToleranceConfig};
use crate::observables::{a_coeff, Quartet, RootOfUnityObservable};

fn check_args(x: u8, k: usize, d: usize) -> Result<()> {
    if x != 1 && x != 2 {
        return Err(Error::Domain(format!("x must be 1 or 2, got {x}")));
    }
    if k == 0 || k >= d {
        return Err(Error::Domain(format!("k must lie in 1..={}, got {k}", d - 1)));
    }
    Ok(())
}

fn check_unitary(a: &RootOfUnityObservable, name: &str) -> Result<()> {
    let r = unitarity_residual(a.unitary())?;
    if r > ToleranceConfig::default().structural_tol {
        return Err(Error::Precondition(format!("{name} is not unitary (residual {r:.3e})")));
    }
    Ok(())
}

/// `B_1^{(k)} = a_k A_3^{−k} + a_k^* ω^k A_4^{−k}`, `B_2^{(k)} = a_k^* A_3^{−k} + a_k A_4^{−k}`.
pub fn build_b(x: u8, k: usize, a3: &RootOfUnityObservable, a4: &RootOfUnityObservable) -> Result<Matrix> {
    let d = a3.d();
    check_args(x, k, d)?;
    check_unitary(a3, "A_3")?;
    check_unitary(a4, "A_4")?;
    let a = a_coeff(k as i64, d);
    let (c3, c4) = if x == 1 {
        (a, a.conj() * root_of_unity(d, k as f64))
    } else {
        (a.conj(), a)
    };
    let k = k as i64;
    Ok(&a3.power(-k).scale(c3) + &a4.power(-k).scale(c4))
}

/// `C_1^{(k)} = a_k^* A_1^{−k} + a_k A_2^{−k}`, `C_2^{(k)} = ω^{−k} a_k A_1^{−k} + a_k^* A_2^{−k}`.
pub fn build_c(x: u8, k: usize, a1: &RootOfUnityObservable, a2: &RootOfUnityObservable) -> Result<Matrix> {
    let d = a1.d();
    check_args(x, k, d)?;
    check_unitary(a1, "A_1")?;
    check_unitary(a2, "A_2")?;
    let a = a_coeff(k as i64, d);
    let (c1, c2) = if x == 1 {
        (a.conj(), a)
    } else {
        (root_of_unity(d, -(k as f64)) * a, a.conj())
    };
    let k = k as i64;
    Ok(&a1.power(-k).scale(c1) + &a2.power(-k).scale(c2))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SosReport {
    pub d: usize,
    /// `||Σ P†P − (4(d−1)·1 − β̂)||_HS`.
    pub primary_residual: f64,
    /// Same for the `Q` family.
    pub alt_residual: f64,
    /// `||P_x^{(k)}||_HS`, ordered `x = 1, 2` then `k = 1..d−1`.
    pub per_term_norms: Vec<f64>,
    pub alt_per_term_norms: Vec<f64>,
}

impl SosReport {
    pub fn max_term_norm(&self) -> f64 {
        self.per_term_norms.iter().copied().fold(0.0, f64::max)
    }
}

pub fn sos_residuals(q: &Quartet) -> Result<SosReport> {
    let d = q.d();
    let n = q.dim();
    let id = Matrix::identity(n);
    let target = &id.scale_real(4.0 * (d as f64 - 1.0)) - &tau_operator(q);
    let mut p_sum = Matrix::zeros(n, n);
    let mut q_sum = Matrix::zeros(n, n);
    let mut per_term_norms = Vec::with_capacity(2 * (d - 1));
    let mut alt_per_term_norms = Vec::with_capacity(2 * (d - 1));
    for x in 1..=2u8 {
        for k in 1..d {
            let ax = q.get(x as usize);
            let p = &id - &(&ax.power(k as i64) * &build_b(x, k, q.a3(), q.a4())?);
            p_sum = &p_sum + &(&p.adjoint() * &p);
            per_term_norms.push(hs_norm(&p));

            let ay = q.get(x as usize + 2);
            let qq = &id - &(&ay.power(k as i64) * &build_c(x, k, q.a1(), q.a2())?);
            q_sum = &q_sum + &(&qq.adjoint() * &qq);
            alt_per_term_norms.push(hs_norm(&qq));
        }
    }
    Ok(SosReport {
        d,
        primary_residual: hs_norm(&(&p_sum - &target)),
        alt_residual: hs_norm(&(&q_sum - &target)),
        per_term_norms,
        alt_per_term_norms,
    })
}
