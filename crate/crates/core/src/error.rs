use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("eigenvalue {eigenvalue} is {distance:.3e} away from the nearest {d}-th root of unity")]
    Spectrum {
        d: usize,
        eigenvalue: String,
        distance: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Input failed structural validation; each entry names the check and its residual.
    #[error("validation failed: {}", format_residuals(.0))]
    Validation(Vec<(String, f64)>),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("tau has imaginary part {imag:.3e}; statistics are not consistent")]
    Realness { imag: f64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("overlap entropy depends on the first outcome (spread {spread:.3e})")]
    NonUniformOverlap { spread: f64 },
}

fn format_residuals(items: &[(String, f64)]) -> String {
    items
        .iter()
        .map(|(name, r)| format!("{name}={r:.3e}"))
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;
