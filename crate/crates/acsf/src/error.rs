//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The anisotropy factor is not strictly positive on the circle.
    #[error("PositivityViolation: g attains {min:.6e} at theta = {at:.6}")]
    PositivityViolation { min: f64, at: f64 },

    /// A translator was evaluated outside its open angular range.
    #[error("OutOfAngularRange: theta = {theta:.6} not in ({lo:.6}, {hi:.6})")]
    OutOfAngularRange { theta: f64, lo: f64, hi: f64 },

    /// Adaptive quadrature did not meet its tolerance within budget.
    #[error(
        "QuadratureFailure: error {err:.3e} > tol {tol:.3e} after {subdivisions} subdivisions"
    )]
    QuadratureFailure {
        err: f64,
        tol: f64,
        subdivisions: usize,
    },

    /// Convex hull input was collinear or otherwise degenerate.
    #[error("DegenerateInput: {0}")]
    DegenerateInput(String),

    /// A support curve lost discrete convexity (radius of curvature <= 0).
    #[error("NonConvexState: discrete radius of curvature {radius:.6e} at grid index {index}")]
    NonConvexState { index: usize, radius: f64 },

    /// An explicit step destroyed convexity; carries the flow time.
    #[error("ConvexityLoss: at time {time:.6e}, grid index {index}")]
    ConvexityLoss { time: f64, index: usize },

    /// Graph-mode curvature dropped to zero or below.
    #[error("PositivityLoss: kappa = {kappa:.6e} at node {index}")]
    PositivityLoss { index: usize, kappa: f64 },

    /// The glued initial curve could not be formed for the given depth.
    #[error("GluingFailure: {0}")]
    GluingFailure(String),

    /// A requested comparison time precedes some run's initial time.
    #[error(
        "WindowMismatch: time {time:.6} precedes initial time {t_r:.6} of the run at depth {depth}"
    )]
    WindowMismatch { time: f64, t_r: f64, depth: f64 },

    /// Nothing to render.
    #[error("EmptyGeometry: {0}")]
    EmptyGeometry(String),

    /// A flow trace was asked for a quantity needing more snapshots.
    #[error("InsufficientTrace: {0}")]
    InsufficientTrace(String),
}

impl Error {
    /// Stable machine-readable name, used by the CLI diagnostic stream.
    pub fn name(&self) -> &'static str {
        match self {
            Error::PositivityViolation { .. } => "PositivityViolation",
            Error::OutOfAngularRange { .. } => "OutOfAngularRange",
            Error::QuadratureFailure { .. } => "QuadratureFailure",
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::NonConvexState { .. } => "NonConvexState",
            Error::ConvexityLoss { .. } => "ConvexityLoss",
            Error::PositivityLoss { .. } => "PositivityLoss",
            Error::GluingFailure(_) => "GluingFailure",
            Error::WindowMismatch { .. } => "WindowMismatch",
            Error::EmptyGeometry(_) => "EmptyGeometry",
            Error::InsufficientTrace(_) => "InsufficientTrace",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
