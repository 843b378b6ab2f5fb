use thiserror::Error;

/// Errors raised by the library.
///
/// Quadrature non-convergence is normally reported in-band (a `converged`
/// flag next to the value); [`Error::NonConvergent`] is what callers get when
/// they ask for a hard failure instead.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{context}: quadrature did not converge (error estimate {err:e})")]
    NonConvergent { context: String, err: f64 },
    #[error("extrapolation needs at least 3 points, got {0}")]
    InsufficientData(usize),
    #[error("argument {0} lies on the branch cut [1, inf)")]
    BranchCut(String),
    #[error("adjacent samples {index} and {next} are too far apart to track the argument", next = .index + 1)]
    PathTooCoarse { index: usize },
    #[error("point {0} lies on the imaginary axis and no side was declared")]
    ImaginaryAxis(String),
    #[error("the function vanishes identically")]
    ZeroFunction,
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("f(zeta) is not real: imaginary part {0:e}")]
    NotRealValue(f64),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("invalid function spec: {0}")]
    InvalidSpec(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("alpha = 1 with nonzero skewness needs the (c, b) parametrisation")]
    AlphaOneSkewed,
    #[error("root not bracketed at r = {0}")]
    RootNotBracketed(f64),
    #[error("the function is not balanced")]
    NotBalanced,
    #[error("tau = {0} lies on the cut (-inf, 0]")]
    TauOnCut(String),
    #[error("radius {0} is not on the curve of real values")]
    NotOnCurve(f64),
    #[error("positivity parameter rho = {0} is degenerate")]
    RhoDegenerate(f64),
    #[error("Gamma pole at argument {0}")]
    GammaPole(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
