//! Error type shared across the workspace.

use thiserror::Error;

use crate::reference::MCEstimate;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid alpha: stability index must lie in (0, 2), got {0}")]
    InvalidAlpha(f64),

    #[error("invalid eps: jump intensity must be finite and >= 0, got {0}")]
    InvalidEps(f64),

    #[error("invalid diffusion: coefficient d must be finite and >= 0, got {0}")]
    InvalidDiffusion(f64),

    #[error("degenerate operator: eps = 0 and d = 0 reduce the generator to pure transport")]
    DegenerateOperator,

    #[error("invalid domain: need a < b, got ({0}, {1})")]
    InvalidDomain(f64, f64),

    #[error("drift is not finite at x = {0}")]
    NonFiniteDrift(f64),

    #[error("invalid cell count: need an even number >= 4, got {0}")]
    InvalidCells(usize),

    #[error("grid covers ({grid_a}, {grid_b}) but the problem domain is ({a}, {b})")]
    DomainMismatch {
        grid_a: f64,
        grid_b: f64,
        a: f64,
        b: f64,
    },

    #[error("problem kind mismatch: expected {expected}, got {got}")]
    KindMismatch {
        expected: &'static str,
        got: &'static str,
    },

    #[error("gamma pole: argument {0} is a non-positive integer")]
    GammaPole(f64),

    #[error("zeta argument {0} outside the supported range (-1, 1)")]
    ZetaDomain(f64),

    #[error("argument x = {x} lies outside ({lo}, {hi})")]
    OutsideDomain { x: f64, lo: f64, hi: f64 },

    #[error("length mismatch: expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("singular matrix: no usable pivot in column {0}")]
    SingularMatrix(usize),

    #[error("invalid solve options: {0}")]
    InvalidOptions(String),

    #[error(
        "gmres did not converge: relative residual {residual:.3e} after {iterations} iterations"
    )]
    NoConvergence {
        iterations: usize,
        residual: f64,
        /// Best iterate reached before giving up.
        best: Vec<f64>,
    },

    #[error("asymptotic expansion requires d > 0")]
    RequiresDiffusion,

    #[error("probe point {0} is not a grid node")]
    NonNodeProbe(f64),

    #[error("path budget exhausted: fraction {fraction:.3} of paths hit the step cap")]
    PathBudgetExhausted {
        fraction: f64,
        estimate: Box<MCEstimate>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
