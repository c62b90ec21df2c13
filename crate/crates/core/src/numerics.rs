//! Dense complex linear algebra with explicit tolerances.
//!
//! All operators in this crate are small (at most a few dozen rows), so a
//! plain dense representation is used throughout. Decompositions are delegated
//! to `nalgebra`; everything that encodes a numerical *decision* (snapping an
//! eigenvalue to a root of unity, accepting a residual) lives here.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Numerical tolerances shared by every check in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Unitarity, projector and operator-identity residuals (HS norm).
    pub structural_tol: f64,
    /// Scalar comparisons (probabilities, tau values, entropies).
    pub value_tol: f64,
    /// Comparisons against values printed with three decimals.
    pub printed_value_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            structural_tol: 1e-9,
            value_tol: 1e-9,
            printed_value_tol: 5e-3,
        }
    }
}

impl ToleranceConfig {
    pub fn new(structural_tol: f64, value_tol: f64, printed_value_tol: f64) -> Result<Self> {
        let all = [structural_tol, value_tol, printed_value_tol];
        if all.iter().any(|t| !t.is_finite() || *t <= 0.0) {
            return Err(Error::Domain(format!(
                "tolerances must be finite and strictly positive, got {all:?}"
            )));
        }
        if printed_value_tol < structural_tol {
            return Err(Error::Domain(format!(
                "printed_value_tol ({printed_value_tol}) must be >= structural_tol ({structural_tol})"
            )));
        }
        Ok(Self {
            structural_tol,
            value_tol,
            printed_value_tol,
        })
    }

    /// Same defaults with structural and value tolerances overridden by one number.
    pub fn uniform(tol: f64) -> Result<Self> {
        let base = Self::default();
        Self::new(tol, tol, base.printed_value_tol.max(tol))
    }
}

/// `exp(2πi · exponent / d)`, principal branch for fractional exponents.
pub fn root_of_unity(d: usize, exponent: f64) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * exponent / d as f64)
}

/// Dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix(DMatrix<C64>);

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            let row: Vec<String> = (0..self.cols())
                .map(|j| {
                    let z = self.get(i, j);
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  {}", row.join("  "))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    /// Builds a matrix from row-major entries; rejects wrong lengths and non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("empty matrix {rows}x{cols}")));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for {rows}x{cols}, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numeric(format!(
                "non-finite entry at row {}, col {}",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(rows, cols, |i, j| f(i, j)))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { C64::new(0.0, 0.0) })
    }

    /// `|v><v| / <v|v>`.
    pub fn projector_onto(v: &[C64]) -> Self {
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let n = v.len();
        Self::from_fn(n, n, |i, j| v[i] * v[j].conj() / norm2)
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        self.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.0[(i, j)] = value;
    }

    pub fn to_row_major(&self) -> Vec<C64> {
        (0..self.rows())
            .flat_map(|i| (0..self.cols()).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self(&self.0 * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// Non-negative integer power by repeated squaring.
    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::identity(self.dim());
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn kron(&self, other: &Matrix) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &Matrix) -> Self {
        &(u * self) * &u.adjoint()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub(crate) fn from_inner(m: DMatrix<C64>) -> Self {
        Self(m)
    }
}

impl<'a> Add<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn add(self, rhs: &'a Matrix) -> Matrix {
        Matrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &'a Matrix) -> Matrix {
        Matrix(&self.0 - &rhs.0)
    }
}

impl<'a> Mul<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &'a Matrix) -> Matrix {
        Matrix(&self.0 * &rhs.0)
    }
}

impl Add for Matrix {
    type Output = Matrix;
    fn add(self, rhs: Matrix) -> Matrix {
        Matrix(self.0 + rhs.0)
    }
}

impl Sub for Matrix {
    type Output = Matrix;
    fn sub(self, rhs: Matrix) -> Matrix {
        Matrix(self.0 - rhs.0)
    }
}

impl Mul for Matrix {
    type Output = Matrix;
    fn mul(self, rhs: Matrix) -> Matrix {
        Matrix(self.0 * rhs.0)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix(-&self.0)
    }
}

impl Neg for Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix(-self.0)
    }
}

/// Hilbert–Schmidt norm `sqrt(Tr[m† m])`.
pub fn hs_norm(m: &Matrix) -> f64 {
    m.inner().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn require_square(m: &Matrix, what: &str) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "{what} must be square, got {}x{}",
            m.rows(),
            m.cols()
        )))
    }
}

/// `||m† m − 1||_HS`.
pub fn unitarity_residual(m: &Matrix) -> Result<f64> {
    require_square(m, "unitary candidate")?;
    Ok(hs_norm(&(&(&m.adjoint() * m) - &Matrix::identity(m.dim()))))
}

pub fn is_unitary(m: &Matrix, tol: &ToleranceConfig) -> Result<bool> {
    Ok(unitarity_residual(m)? <= tol.structural_tol)
}

/// `||m − m†||_HS`.
pub fn hermiticity_residual(m: &Matrix) -> f64 {
    hs_norm(&(m - &m.adjoint()))
}

/// Splits a unitary with `d`-th-root-of-unity spectrum into its spectral projectors.
///
/// `result[a]` projects onto the eigenspace of `ω^a`; absent eigenvalues give
/// a zero projector. Each eigenvalue is snapped to the closest root by angle.
pub fn spectral_project_roots(a: &Matrix, d: usize, tol: &ToleranceConfig) -> Result<Vec<Matrix>> {
    if d == 0 {
        return Err(Error::Domain("d must be positive".into()));
    }
    let residual = unitarity_residual(a)?;
    if residual > tol.structural_tol {
        return Err(Error::Precondition(format!(
            "matrix is not unitary (residual {residual:.3e})"
        )));
    }
    let n = a.dim();
    // A is normal, so Re A and Im A commute and share A's eigenvectors. The
    // Hermitian mix Re A + c·Im A keeps distinct roots of unity well apart for
    // the chosen c, and Hermitian eigensolvers cope with degenerate spectra.
    const MIX: f64 = 2.888;
    let re = (a + &a.adjoint()).scale_real(0.5);
    let im = (a - &a.adjoint()).scale(C64::new(0.0, -0.5));
    let (_, vectors) = hermitian_eigen(&(&re + &im.scale_real(MIX)));
    let mut projectors = vec![Matrix::zeros(n, n); d];
    for col in 0..n {
        let v: Vec<C64> = (0..n).map(|r| vectors.get(r, col)).collect();
        let av: Vec<C64> = (0..n).map(|r| (0..n).map(|c| a.get(r, c) * v[c]).sum()).collect();
        let lambda: C64 = v.iter().zip(&av).map(|(x, y)| x.conj() * y).sum();
        let turns = lambda.arg() * d as f64 / (2.0 * PI);
        let label = turns.round().rem_euclid(d as f64) as usize;
        let distance = (lambda - root_of_unity(d, label as f64)).norm();
        if distance > tol.structural_tol {
            return Err(Error::Spectrum {
                d,
                eigenvalue: format!("{:.6}{:+.6}i", lambda.re, lambda.im),
                distance,
            });
        }
        projectors[label] = &projectors[label] + &Matrix::projector_onto(&v);
    }
    Ok(projectors)
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending.
pub fn hermitian_eigen(m: &Matrix) -> (Vec<f64>, Matrix) {
    // Symmetrise first so round-off asymmetry cannot leak into the decomposition.
    let h = (m.inner() + m.inner().adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let n = m.dim();
    let vectors = Matrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_map(m: &Matrix, f: impl Fn(f64) -> C64) -> Matrix {
    let (values, vectors) = hermitian_eigen(m);
    let diag: Vec<C64> = values.into_iter().map(f).collect();
    &(&vectors * &Matrix::from_diagonal(&diag)) * &vectors.adjoint()
}

/// Principal square root of a positive semidefinite matrix (tiny negative eigenvalues clamp to 0).
pub fn psd_sqrt(m: &Matrix) -> Matrix {
    hermitian_map(m, |x| C64::new(x.max(0.0).sqrt(), 0.0))
}

/// `exp(i t H)` for Hermitian `H`.
pub fn expm_i_hermitian(h: &Matrix, t: f64) -> Matrix {
    hermitian_map(h, |x| C64::from_polar(1.0, t * x))
}

fn complex_gaussian(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let entries: Vec<C64> = (0..n * n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re * scale, im * scale)
        })
        .collect();
    Matrix::from_fn(n, n, |i, j| entries[i * n + j])
}

/// Haar-distributed `n×n` unitary, deterministic in `(n, seed)`.
///
/// Ginibre matrix, QR, then the phases of `R`'s diagonal are pushed into `Q`.
pub fn haar_unitary(n: usize, seed: u64) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::Dimension("haar_unitary needs n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(haar_from_rng(n, &mut rng))
}

pub(crate) fn haar_from_rng(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let g = complex_gaussian(n, rng);
    let qr = g.inner().clone().qr();
    let q = qr.q();
    let r = qr.r();
    let phases = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let rii = r[(i, i)];
            if rii.norm() > 0.0 {
                rii / rii.norm()
            } else {
                C64::new(1.0, 0.0)
            }
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Matrix::from_inner(q * phases)
}

/// Random Hermitian matrix with unit HS norm.
pub(crate) fn random_hermitian_unit(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let g = complex_gaussian(n, rng);
    let h = (&g + &g.adjoint()).scale_real(0.5);
    let norm = hs_norm(&h);
    if norm == 0.0 {
        Matrix::zeros(n, n)
    } else {
        h.scale_real(1.0 / norm)
    }
}

pub(crate) fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
