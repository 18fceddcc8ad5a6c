use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("singular matrix in {0}")]
    Singular(&'static str),

    /// A numerical invariant that must hold by construction was violated.
    #[error("invariant `{name}` violated: {detail}")]
    Invariant { name: &'static str, detail: String },

    #[error("probability at index {index} is {value:e}, below the clamp tolerance")]
    NegativeProbability { index: usize, value: f64 },

    #[error("probability at index {index} has imaginary residue {residue:e}")]
    ComplexResidue { index: usize, residue: f64 },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("truncation leak {leak:e} on the top Fock shell at n_max = {n_max}; raise n_max")]
    TruncationLeak { leak: f64, n_max: usize },

    #[error("caustic at t = {t}: |det lambda3| = {det:e}; perturb t")]
    Caustic { t: f64, det: f64 },

    #[error("Hermite value overflows (ln|H| = {ln_abs:.3}); use the scaled form")]
    Overflow { ln_abs: f64 },
}
