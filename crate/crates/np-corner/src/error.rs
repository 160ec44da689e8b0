use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Symbol evaluated at a nonzero integer, a pole of 1/sin(pi z).
    #[error("z = {0} is within tolerance of a nonzero-integer pole of the symbol")]
    Pole(String),
    /// Input outside an operation's stated domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Spectral parameter outside the half-strip image.
    #[error("lambda not in the admissible region: {0}")]
    NotInDomain(String),
    /// Point within tolerance of the region boundary contour.
    #[error("point within {tol:e} of the contour (distance {dist:e})")]
    OnBoundary { dist: f64, tol: f64 },
    /// Root search exhausted all starts.
    #[error("no convergence after {0} Newton starts")]
    NoConvergence(usize),
    /// Linear system too ill-conditioned to trust.
    #[error("near-singular system (condition estimate {0:.3e})")]
    NearSingular(f64),
    /// Kernel of K*-I not one-dimensional at this resolution.
    #[error("degenerate kernel: sigma_min={0:.3e}, sigma_next={1:.3e}")]
    DegenerateKernel(f64, f64),
    /// Log-grid samples carry too much mass at the grid ends.
    #[error("grid truncation: boundary mass {0:.3e} exceeds {1:.3e}")]
    Truncation(f64, f64),
    /// Multiplier denominator nearly vanishes on the grid.
    #[error("multiplier denominator minimum {0:.3e} below threshold")]
    SmallDenominator(f64),
    /// Nonlinear corner fit failed to converge.
    #[error("exponent fit diverged: {0}")]
    FitDiverged(String),
    /// Too few nodes in the fit window.
    #[error("fit window [{0:.3e}, {1:.3e}] contains only {2} nodes")]
    WindowTooSmall(f64, f64, usize),
    /// Invalid run configuration.
    #[error("config error: {0}")]
    Config(String),
    /// Malformed artifact file.
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
