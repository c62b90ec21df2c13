//! Shannon entropy of the second outcome given the first, for canonical measurement pairs.

use crate::error::{Error, Result};
use crate::numerics::{root_of_unity, ToleranceConfig};
use crate::observables::{build_t, build_z, canonical_quartet, RootOfUnityObservable};

fn shannon_bits(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

fn check_rank_one(a: &RootOfUnityObservable, b: &RootOfUnityObservable) -> Result<()> {
    if a.d() != b.d() || a.dim() != b.dim() {
        return Err(Error::Dimension("observables must share d and D".into()));
    }
    if a.dim() != a.d() {
        return Err(Error::Precondition(format!(
            "entropy needs rank-one projectors (D = d), got D = {}, d = {}",
            a.dim(),
            a.d()
        )));
    }
    Ok(())
}

/// Conditional distributions `p(b | a) = Tr[Π_a Π'_b]` for every first outcome `a`.
pub fn conditional_overlaps(first: &RootOfUnityObservable, second: &RootOfUnityObservable) -> Result<Vec<Vec<f64>>> {
    check_rank_one(first, second)?;
    Ok(first
        .projectors()
        .iter()
        .map(|p| second.projectors().iter().map(|q| (p * q).trace().re.max(0.0)).collect())
        .collect())
}

/// Entropy in bits of the second outcome for a fixed first outcome.
///
/// Errors if the value depends on which first outcome is fixed.
pub fn pair_entropy(first: &RootOfUnityObservable, second: &RootOfUnityObservable) -> Result<f64> {
    pair_entropy_with(first, second, &ToleranceConfig::default())
}

pub fn pair_entropy_with(
    first: &RootOfUnityObservable,
    second: &RootOfUnityObservable,
    tol: &ToleranceConfig,
) -> Result<f64> {
    let per_outcome: Vec<f64> = conditional_overlaps(first, second)?
        .into_iter()
        .map(shannon_bits)
        .collect();
    let lo = per_outcome.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = per_outcome.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo > tol.value_tol {
        return Err(Error::NonUniformOverlap { spread: hi - lo });
    }
    Ok(per_outcome[0])
}

/// Entropy averaged over first outcomes with the uniform first marginal.
pub fn averaged_pair_entropy(first: &RootOfUnityObservable, second: &RootOfUnityObservable) -> Result<f64> {
    let rows = conditional_overlaps(first, second)?;
    let n = rows.len() as f64;
    Ok(rows.into_iter().map(shannon_bits).sum::<f64>() / n)
}

/// `|⟨Z_d^{a1}|T_d^{a2}⟩|² = (4/d²) / |1 − ω^{a2 − a1 − 1/2}|²`.
pub fn zt_overlap(a1: usize, a2: usize, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::Domain(format!("d must be >= 2, got {d}")));
    }
    if a1 >= d || a2 >= d {
        return Err(Error::Domain(format!("outcomes must lie in 0..{d}, got ({a1}, {a2})")));
    }
    let x = a2 as f64 - a1 as f64 - 0.5;
    let df = d as f64;
    Ok(4.0 / (df * df) / (1.0 - root_of_unity(d, x)).norm_sqr())
}

/// `|⟨Z_d^{a1}|T_d^{a2}⟩|²` from the eigendecompositions.
pub fn zt_overlap_direct(d: usize) -> Result<Vec<Vec<f64>>> {
    conditional_overlaps(&build_z(d)?, &build_t(d)?)
}

/// Closed-form `H(A_1, A_2)`, cross-checked against the eigenbasis overlaps.
pub fn entropy_closed_form(d: usize) -> Result<f64> {
    let h = shannon_bits((0..d).map(|x| zt_overlap(0, x, d)).collect::<Result<Vec<_>>>()?);
    let direct = pair_entropy(&build_z(d)?, &build_t(d)?)?;
    if (h - direct).abs() > ToleranceConfig::default().value_tol {
        return Err(Error::Consistency(format!(
            "closed form {h} vs eigenbasis {direct} at d = {d}"
        )));
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EntropyMethod {
    Overlap,
    ClosedForm,
    /// First-outcome average; used for pairs without a reference value.
    Averaged,
}

impl EntropyMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            EntropyMethod::Overlap => "overlap",
            EntropyMethod::ClosedForm => "closed_form",
            EntropyMethod::Averaged => "averaged",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyRow {
    pub d: usize,
    pub pair: (usize, usize),
    pub entropy_bits: f64,
    pub method: EntropyMethod,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EntropyTable {
    pub rows: Vec<EntropyRow>,
    /// Pairs with no published reference value.
    pub unreferenced: Vec<EntropyRow>,
}

impl EntropyTable {
    pub fn value(&self, d: usize, pair: (usize, usize), method: EntropyMethod) -> Option<f64> {
        self.rows
            .iter()
            .chain(&self.unreferenced)
            .find(|r| r.d == d && r.pair == pair && r.method == method)
            .map(|r| r.entropy_bits)
    }
}

pub const REFERENCED_PAIRS: [(usize, usize); 4] = [(1, 2), (2, 1), (3, 4), (4, 3)];
pub const UNREFERENCED_PAIRS: [(usize, usize); 8] = [(1, 3), (1, 4), (2, 3), (2, 4), (3, 1), (4, 1), (3, 2), (4, 2)];
pub const MAX_SWEEP_D: usize = 32;

pub fn entropy_sweep(d_min: usize, d_max: usize) -> Result<EntropyTable> {
    if !(2 <= d_min && d_min <= d_max && d_max <= MAX_SWEEP_D) {
        return Err(Error::Domain(format!(
            "need 2 <= d_min <= d_max <= {MAX_SWEEP_D}, got ({d_min}, {d_max})"
        )));
    }
    let tol = ToleranceConfig::default();
    let mut table = EntropyTable::default();
    for d in d_min..=d_max {
        let q = canonical_quartet(d)?;
        let closed = entropy_closed_form(d)?;
        for &(i, j) in &REFERENCED_PAIRS {
            let h = pair_entropy(q.get(i), q.get(j))?;
            if (h - closed).abs() > tol.value_tol {
                return Err(Error::Consistency(format!(
                    "H(A_{i}, A_{j}) = {h} differs from the closed form {closed} at d = {d}"
                )));
            }
            table.rows.push(EntropyRow {
                d,
                pair: (i, j),
                entropy_bits: h,
                method: EntropyMethod::Overlap,
            });
            table.rows.push(EntropyRow {
                d,
                pair: (i, j),
                entropy_bits: closed,
                method: EntropyMethod::ClosedForm,
            });
        }
        for &(i, j) in &UNREFERENCED_PAIRS {
            table.unreferenced.push(EntropyRow {
                d,
                pair: (i, j),
                entropy_bits: averaged_pair_entropy(q.get(i), q.get(j))?,
                method: EntropyMethod::Averaged,
            });
        }
    }
    Ok(table)
}
