//! Independent oracles the solver is validated against: closed-form
//! solutions, the small-jump asymptotic expansion, and a Monte Carlo path
//! simulator.

mod asymptotic;
mod closed_form;
mod monte_carlo;
pub mod quad;

pub use asymptotic::{
    asymptotic_exit_time, asymptotic_exit_time_quadrature, u1_closed_form, AsymptoticSolution,
};
pub use closed_form::{escape_prob_closed_form, getoor_exit_time, lhs_closed_form};
pub use monte_carlo::{mc_exit_time, sample_alpha_stable, MCEstimate};
