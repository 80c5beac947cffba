use thiserror::Error;

/// Errors shared across the crate. Numeric routines return `Result` so that
/// precondition violations surface as values instead of panics; the CLI maps
/// these onto exit codes.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Density parameters outside the well-defined family (m <= 0, n < 2, b >= m/n, non-finite).
    #[error("invalid density parameters: {0}")]
    ParamDomain(String),

    /// Parameters are density-valid but outside the variational range b < m/(n+m).
    #[error("parameters outside the variational range: b = {b} must be below m/(n+m) = {bound}")]
    Variational { b: f64, bound: f64 },

    /// Scalar argument outside its domain (negative radius, p = 0, kappa outside (0,1), ...).
    #[error("argument out of domain: {0}")]
    ArgDomain(String),

    /// Direction set failed validation (non-unit, too few, near-duplicates).
    #[error("invalid direction set: {0}")]
    Directions(String),

    /// Two containers built over different direction sets were combined.
    #[error("direction sets do not match: {0}")]
    DimensionMismatch(String),

    /// Halfspace intersection is unbounded; directions do not positively span.
    /// The witness is a unit vector with u_i . v >= 0 for every direction.
    #[error("directions do not positively span (unbounded body); witness hemisphere {witness:?}")]
    Unbounded { witness: Vec<f64> },

    /// Measure concentrated in a closed hemisphere; carries a witness direction.
    #[error("measure concentrated in the closed hemisphere of {witness:?}")]
    Concentrated { witness: Vec<f64> },

    /// A ray hit the boundary between facets; the normal is ambiguous.
    #[error("ray hits a lower-dimensional face shared by facets {0} and {1}")]
    RayTie(usize, usize),

    /// Quadrature subdivision budget exhausted before reaching the target tolerance.
    #[error("quadrature tolerance not met: error estimate {achieved:e} above target {target:e}")]
    ToleranceNotMet { achieved: f64, target: f64 },

    /// Root finding could not bracket or converge.
    #[error("root finding failed: {0}")]
    RootFinding(String),

    /// Operation requires an active facet.
    #[error("facet {0} is inactive (zero (n-1)-measure)")]
    InactiveFacet(usize),

    /// Solver configuration failed validation.
    #[error("invalid solve config: {0}")]
    Config(String),

    /// Support floor violated during a solve; indicates kappa0/measure pathology.
    #[error("support floor violated at iteration {iter}: min effective h = {min_h:e} < 1e-6")]
    SupportFloor { iter: usize, min_h: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
