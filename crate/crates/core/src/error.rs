use num_complex::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid stencil: {0}")]
    InvalidStencil(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("eigensolver did not converge (matrix fingerprint {fingerprint:016x}, dimension {dim})")]
    NoConvergence { fingerprint: u64, dim: usize },

    #[error("profile is identically zero")]
    ZeroProfile,

    #[error("profile needs at least 10 sites, got {0}")]
    ProfileTooShort(usize),

    #[error("polynomial has degree 0, there are no roots")]
    ConstantPolynomial,

    #[error("degenerate polynomial: {0}")]
    DegeneratePolynomial(String),

    #[error("expected {expected} values after reduction, found {found}")]
    Cardinality { expected: usize, found: usize },

    #[error("eigenvector vanishes identically at alpha = {0}")]
    VanishingVector(Complex64),

    #[error("triple grouping failed: {0}")]
    TripleGrouping(String),

    #[error("base energy on spectrum (min |det| = {0:e})")]
    OnSpectrum(f64),

    #[error("no Bloch reduction exists for open boundaries in the stacking direction")]
    NoBlochReduction,

    #[error("boundary matrix could not be built: {0}")]
    BoundaryMatrix(String),
}

pub type Result<T> = std::result::Result<T, Error>;
