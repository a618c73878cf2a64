//! Error type shared by every module.

use alloc::string::String;

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Failures reported by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    /// Newton iteration stalled.
    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        /// Iterations performed.
        iterations: usize,
        /// Last residual max-norm.
        residual: f64,
    },
    /// The ρ-window is too short for the profile to reach its far field.
    #[error("profile has not reached its far field at the window edge (mismatch {mismatch:e})")]
    GridTooNarrow {
        /// Distance to ±1 one unit inside the window edge.
        mismatch: f64,
    },
    /// Two objects that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    /// Right-hand side not orthogonal to the kernel.
    #[error("solvability violated: <rhs, θ0'> = {inner_product:e} exceeds {tolerance:e}")]
    SolvabilityViolated {
        /// Discrete inner product with `θ0'`.
        inner_product: f64,
        /// Accepted bound.
        tolerance: f64,
    },
    /// A linear system has a (numerically) zero pivot.
    #[error("singular system ({0})")]
    Singular(&'static str),
    /// Point lies outside the admissible tubular neighbourhood.
    #[error("point at distance {distance} outside tube of half-width {limit}")]
    OutsideChart {
        /// Signed distance of the point.
        distance: f64,
        /// Admissible half-width.
        limit: f64,
    },
    /// Closest-point projection failed.
    #[error("projection onto curve did not converge")]
    ProjectionDiverged,
    /// Radius outside the admissible range.
    #[error("degenerate radius {radius}")]
    DegenerateRadius {
        /// Offending radius.
        radius: f64,
    },
    /// Sharp interface shrank below the collapse floor.
    #[error("interface collapsed at t = {time} (R = {radius})")]
    InterfaceCollapse {
        /// Time of collapse.
        time: f64,
        /// Radius at collapse.
        radius: f64,
    },
    /// Chart parameters are inconsistent with the domain.
    #[error("chart mismatch: {0}")]
    ChartMismatch(String),
    /// Invalid user input.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A self-check failed.
    #[error("check {check} failed: {value:e} exceeds {tolerance:e}")]
    CheckFailed {
        /// Name of the check.
        check: &'static str,
        /// Measured value.
        value: f64,
        /// Tolerance.
        tolerance: f64,
    },
    /// Radial grid does not resolve the interface layer.
    #[error("radial spacing {h} exceeds eps/8 = {limit}")]
    ResolutionTooCoarse {
        /// Grid spacing.
        h: f64,
        /// Largest admissible spacing.
        limit: f64,
    },
    /// Time step failed after all halvings.
    #[error("time step failed at t = {time} with dt = {dt:e}")]
    StepFailed {
        /// Time at which the step started.
        time: f64,
        /// Last attempted step.
        dt: f64,
    },
    /// No sign change of `c` on the grid.
    #[error("no interface found")]
    NoInterface,
    /// More than one sign change of `c` on the grid.
    #[error("{count} sign changes found, expected one")]
    MultipleInterfaces {
        /// Number of sign changes.
        count: usize,
    },
    /// Order fit cannot be computed.
    #[error("degenerate fit: {0}")]
    DegenerateFit(&'static str),
    /// Finite-difference stencil leaves the domain.
    #[error("stencil leaves the domain at |x| = {radius}")]
    StencilOutOfDomain {
        /// Radius of the evaluation point.
        radius: f64,
    },
}
