use thiserror::Error;

/// Which characteristic-function axiom an audit found violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Axiom {
    /// |Φ(s)| ≤ 1
    Modulus,
    /// Φ(0) = 1
    Normalization,
    /// Φ(−s) = conj Φ(s)
    Hermitian,
    /// Gram matrices [Φ(s_i − s_j)] are positive semidefinite
    PositiveDefinite,
}

impl std::fmt::Display for Axiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Axiom::Modulus => "modulus",
            Axiom::Normalization => "normalization",
            Axiom::Hermitian => "hermitian",
            Axiom::PositiveDefinite => "positive-definite",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("Lévy condition violated for the {which} weight: window ratio {ratio:.6} does not decay ({side})")]
    LevyConditionViolated {
        which: &'static str,
        side: &'static str,
        ratio: f64,
    },

    #[error("quadrature did not converge: estimate {estimate}, error {error:e} after {intervals} intervals")]
    QuadratureNotConverged {
        estimate: f64,
        error: f64,
        intervals: usize,
    },

    #[error("negative time t = {0}")]
    NegativeTime(f64),

    #[error("audit failed ({axiom}): {detail} at s = {witness:?}")]
    AuditFailed {
        axiom: Axiom,
        detail: String,
        witness: Vec<f64>,
    },

    #[error("kernel integrates to zero")]
    ZeroKernel,

    #[error("kernel is not integrable: {0}")]
    NonIntegrableKernel(String),

    #[error("infinite moment: {0}")]
    InfiniteMoment(String),

    #[error("stable index alpha = {0} outside (0, 2]")]
    AlphaOutOfRange(f64),

    #[error("grid too coarse: renormalization changed mass by {0:e}")]
    GridTooCoarse(f64),

    #[error("truncation N = {truncation} leaves Poisson tail {tail:e} > {tol:e}; use N >= {suggested}")]
    TruncationTooSmall {
        truncation: usize,
        tail: f64,
        tol: f64,
        suggested: usize,
    },

    #[error("path-separation weights sum to {0}, expected 1")]
    UnnormalizedWeights(f64),

    #[error("{0:e} of probability mass lies outside the momentum window")]
    SupportClipped(f64),

    #[error("characteristic-function samples are not Hermitian (max mismatch {0:e})")]
    NonHermitianInput(f64),

    #[error("momentum window too narrow: {0}")]
    WindowTooNarrow(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::LevyConditionViolated { .. } => "LevyConditionViolated",
            Error::QuadratureNotConverged { .. } => "QuadratureNotConverged",
            Error::NegativeTime(_) => "NegativeTime",
            Error::AuditFailed { .. } => "AuditFailed",
            Error::ZeroKernel => "ZeroKernel",
            Error::NonIntegrableKernel(_) => "NonIntegrableKernel",
            Error::InfiniteMoment(_) => "InfiniteMoment",
            Error::AlphaOutOfRange(_) => "AlphaOutOfRange",
            Error::GridTooCoarse(_) => "GridTooCoarse",
            Error::TruncationTooSmall { .. } => "TruncationTooSmall",
            Error::UnnormalizedWeights(_) => "UnnormalizedWeights",
            Error::SupportClipped(_) => "SupportClipped",
            Error::NonHermitianInput(_) => "NonHermitianInput",
            Error::WindowTooNarrow(_) => "WindowTooNarrow",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::Parse { .. } => "Parse",
            Error::Io(_) => "Io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
