//! Mean first exit times and escape probabilities for scalar SDEs driven by
//! a deterministic drift plus Brownian and symmetric alpha-stable Levy noise.
//!
//! Both quantities satisfy integro-differential boundary-value problems on a
//! bounded interval `(a, b)` with *exterior* data: the exit time solves
//! `A u = -1` in `(a, b)` with `u = 0` outside, and the escape probability
//! (to the right) solves `A P = 0` with `P = 0` left of `a` and `P = 1`
//! right of `b`, where `A` combines drift, Gaussian diffusion and the
//! singular jump integral of the alpha-stable measure.
//!
//! The crate is organized around five pieces:
//!
//! - [`problem`]: problem parameterization ([`ProblemSpec`], [`DriftSpec`],
//!   [`ProblemKind`]) and validation.
//! - [`special`]: the Gamma function, the Riemann zeta function on `(-1, 1)`
//!   and the jump-measure constant `C_alpha` the discretization needs.
//! - [`assembly`]: uniform grids and dense linear systems discretizing the
//!   nonlocal generator, in three scheme variants ([`Scheme`]).
//! - [`linsolve`]: dense LU with partial pivoting and restarted GMRES.
//! - [`reference`]: independent oracles (closed forms, a small-jump
//!   asymptotic expansion, and a Monte Carlo path simulator).
//! - [`harness`]: experiment runner behind the CLI: profiles, convergence
//!   studies, parameter sweeps and CSV output.

pub mod assembly;
pub mod error;
pub mod grid;
pub mod harness;
pub mod linsolve;
pub mod matrix;
pub mod problem;
pub mod reference;
pub mod special;

pub use assembly::{LinearSystem, Scheme, SolutionProfile};
pub use error::{Error, Result};
pub use grid::Grid;
pub use linsolve::{SolveMethod, SolveOptions, SolverStats};
pub use problem::{DriftSpec, ProblemKind, ProblemSpec};
