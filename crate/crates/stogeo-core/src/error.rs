//! Error type shared by all modules.

use alloc::string::String;

/// Errors produced by geometric queries, path simulation, and solvers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A chart query was made at a point outside every chart domain.
    #[error("point outside chart domain (chart {chart})")]
    OutsideChartDomain { chart: usize },

    /// The metric failed a positive-definiteness check, e.g. at a chart
    /// singularity such as a sphere pole.
    #[error("metric not positive-definite at evaluation point (chart {chart})")]
    MetricNotPositiveDefinite { chart: usize },

    /// A finite-difference stencil left the chart domain.
    #[error("derivative stencil exits chart domain (chart {chart})")]
    StencilExitsDomain { chart: usize },

    /// An integrated trajectory left its chart and no transition applies.
    #[error("trajectory exited chart {chart} with no available transition")]
    ChartExitNoTransition { chart: usize },

    /// A path argument is structurally unusable (too few nodes, non-uniform
    /// grid, mismatched dimensions).
    #[error("malformed path: {0}")]
    MalformedPath(String),

    /// Frame orthonormality drifted past the hard bound before correction;
    /// the step size is too large for the geometry.
    #[error("frame orthonormality drift {drift:.3e} exceeds hard bound {bound:.3e}; reduce dt")]
    OrthonormalityLost { drift: f64, bound: f64 },

    /// Grids of two co-integrated paths do not match.
    #[error("mismatched time grids: {0}")]
    GridMismatch(String),

    /// A Monte Carlo ensemble is below the statistical minimum.
    #[error("ensemble of {got} paths is below the minimum {min}")]
    EnsembleTooSmall { got: usize, min: usize },

    /// Too many sample paths left the usable chart region.
    #[error("{lost} of {total} paths exited the chart region (allowed fraction {allowed})")]
    TooManyLostPaths { lost: usize, total: usize, allowed: f64 },

    /// A PDE solve became unstable (norm growth beyond the safety factor).
    #[error("solver instability: solution norm grew by {growth:.3e}x")]
    SolverUnstable { growth: f64 },

    /// Invalid argument outside the other categories.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Lie-algebra data failed a structural invariant.
    #[error("invalid Lie algebra data: {0}")]
    InvalidAlgebra(String),

    /// A regression design matrix is too ill-conditioned to use.
    #[error("regression ill-conditioned: condition number {cond:.3e} exceeds bound {bound:.3e}")]
    IllConditionedRegression { cond: f64, bound: f64 },

    /// Picard iteration did not reach tolerance within the iteration cap.
    #[error("Picard iteration did not converge: change {change:.3e} after {iterations} iterations")]
    NotConverged { iterations: usize, change: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
