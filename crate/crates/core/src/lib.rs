//! Certification of root-of-unity measurements from sequential (temporal) correlations.
//!
//! The crate is organised bottom-up: [`numerics`] provides the dense complex
//! matrix type and spectral helpers, [`observables`] builds the canonical
//! quartet, [`sequential`] turns measurements into joint statistics,
//! [`inequality`] evaluates the temporal expression and its classical bound,
//! [`sos`] and [`certification`] check the self-testing conditions, and
//! [`randomness`] computes the certified entropy.

pub mod certification;
pub mod error;
pub mod inequality;
pub mod numerics;
pub mod observables;
pub mod randomness;
pub mod sequential;
pub mod sos;

pub use certification::{
    algebraic_residuals, certify, lemma2_demo, overlap_fingerprint, perturb_quartet, robustness_check,
    robustness_trials, CertificationReport, ConditionResiduals, Lemma2Report, RobustnessReport, Verdict,
};
pub use error::{Error, Result};
pub use inequality::{
    classical_bound_bruteforce, classical_bound_closed, classical_bound_enumeration, classical_decomposition,
    fourier_correlator, tau_from_stats, tau_operator, tau_tilde, CorrelationSet, InequalityReport,
};
pub use numerics::{haar_unitary, hs_norm, is_unitary, spectral_project_roots, Matrix, ToleranceConfig, C64};
pub use observables::{
    build_t, build_z, canonical_quartet, haar_rotated_quartet, coeff_a, observable_from_projectors, observable_power, Quartet,
    RootOfUnityObservable,
};
pub use randomness::{
    entropy_closed_form, entropy_sweep, pair_entropy, zt_overlap, EntropyMethod, EntropyRow, EntropyTable,
};
pub use sequential::{
    first_marginal, luders_joint, maximally_mixed, projectivity_check, repeatability_residuals, JointTable, Povm,
    PreparedState,
};
pub use sos::{build_b, build_c, sos_residuals, SosReport};
