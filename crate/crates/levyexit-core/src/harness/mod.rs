//! Experiment runner behind the CLI: single solves, convergence studies
//! with fitted log-log slopes, the eps-scaling study against the asymptotic
//! expansion, and Cartesian parameter sweeps.

mod config;
mod csv;

pub use config::{one_sided_from_str, parse_config, scheme_from_str, solver_from_str};
pub use csv::{to_csv_string, write_csv, CsvRecord};

use rayon::prelude::*;

use crate::assembly::{
    assemble_escape, assemble_exit_time, attach_boundary, operator_apply, Scheme, SolutionProfile,
};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linsolve::{solve_with, SolveOptions};
use crate::problem::{DriftSpec, ProblemKind, ProblemSpec};
use crate::reference::{asymptotic_exit_time, getoor_exit_time, lhs_closed_form};

/// Convergence-study flavor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyKind {
    /// Discrete generator applied to `1 - x^2`, against its closed form.
    Operator,
    /// Exit-time solve with the uncorrected scheme, against the stable-
    /// process closed form.
    PunchedHoleExit,
    /// Exit-time solve with the corrected scheme, against the same oracle.
    CorrectedExit,
}

impl StudyKind {
    pub fn name(&self) -> &'static str {
        match self {
            StudyKind::Operator => "operator",
            StudyKind::PunchedHoleExit => "punched-hole",
            StudyKind::CorrectedExit => "corrected",
        }
    }
}

/// One-sided drift differencing policy for the near-boundary rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OneSidedPolicy {
    /// Enable exactly in the discontinuous regime: `alpha < 1`, `d = 0`,
    /// nonzero drift.
    Auto,
    On,
    Off,
}

impl OneSidedPolicy {
    pub fn resolve(&self, problem: &ProblemSpec) -> bool {
        match self {
            OneSidedPolicy::On => true,
            OneSidedPolicy::Off => false,
            OneSidedPolicy::Auto => {
                problem.alpha < 1.0 && problem.d == 0.0 && !problem.drift.is_zero()
            }
        }
    }
}

/// Everything one experiment needs. `problem` is the effective base case
/// (an `alpha = 2` request is already folded into `eps = 0`, `d + 2 eps`);
/// sweep axes are applied per cell on top of it.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub scheme: Scheme,
    pub solver: SolveOptions,
    pub one_sided: OneSidedPolicy,
    /// Resolution J (grid spacing h = 1/J) for single solves.
    pub resolution: usize,
    /// Explicit cell-count override; wins over `resolution` when set.
    pub n_cells: Option<usize>,
    /// Resolution ladder for convergence studies.
    pub resolutions: Vec<usize>,
    pub probe: f64,
    pub study: StudyKind,
    /// Sweep axes; empty means "use the base problem's value".
    pub alphas: Vec<f64>,
    pub eps_values: Vec<f64>,
    pub d_values: Vec<f64>,
    /// Symmetric domain half-widths; each cell solves on (-b, b).
    pub b_values: Vec<f64>,
    // Monte Carlo knobs.
    pub x0: f64,
    pub dt: f64,
    pub n_paths: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            problem: ProblemSpec {
                alpha: 1.0,
                eps: 1.0,
                d: 0.0,
                drift: DriftSpec::Zero,
                domain: (-1.0, 1.0),
                kind: ProblemKind::ExitTime,
            },
            scheme: Scheme::PrincipalValue,
            solver: SolveOptions::default(),
            one_sided: OneSidedPolicy::Auto,
            resolution: 80,
            n_cells: None,
            resolutions: vec![10, 20, 40, 80, 160, 320],
            probe: -0.5,
            study: StudyKind::CorrectedExit,
            alphas: Vec::new(),
            eps_values: Vec::new(),
            d_values: Vec::new(),
            b_values: Vec::new(),
            x0: 0.0,
            dt: 1e-4,
            n_paths: 100_000,
            seed: 1,
        }
    }
}

/// Error-vs-axis series with its fitted log10-log10 slope.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    /// "J" for resolution ladders, "eps" for the scaling study.
    pub axis_name: &'static str,
    pub axis: Vec<f64>,
    pub errors: Vec<f64>,
    pub probe: f64,
    pub fitted_slope: f64,
    /// Which oracle the errors are measured against.
    pub reference: String,
}

/// A resolved sweep cell: the requested axis values plus the outcome.
#[derive(Debug)]
pub struct SweepCell {
    pub alpha: f64,
    pub eps: f64,
    pub d: f64,
    pub domain: (f64, f64),
    pub result: Result<SolutionProfile>,
}

/// Sweep outcome in deterministic Cartesian order (alpha outermost, then
/// eps, d, domain).
#[derive(Debug)]
pub struct SweepResult {
    pub cells: Vec<SweepCell>,
}

/// Map requested noise parameters onto a solvable problem. A request for
/// `alpha = 2` means Brownian motion with characteristic function
/// `exp(-eps t lambda^2)`, i.e. extra diffusion `2 eps` and no jump part;
/// the stored `alpha` is then an unused placeholder.
pub fn effective_problem(
    base: &ProblemSpec,
    alpha: f64,
    eps: f64,
    d: f64,
    domain: (f64, f64),
) -> ProblemSpec {
    let mut p = base.clone();
    p.domain = domain;
    if alpha == 2.0 {
        p.alpha = 1.0;
        p.eps = 0.0;
        p.d = d + 2.0 * eps;
    } else {
        p.alpha = alpha;
        p.eps = eps;
        p.d = d;
    }
    p
}

/// Cell count for resolution J on `domain`: `(b - a) J`, which must land on
/// an even integer >= 4.
pub fn cells_for(domain: (f64, f64), resolution: usize) -> Result<usize> {
    let raw = (domain.1 - domain.0) * resolution as f64;
    let rounded = raw.round();
    if (raw - rounded).abs() > 1e-9 * raw.max(1.0) {
        return Err(Error::Config(format!(
            "resolution {resolution} does not divide the domain ({}, {}) into whole cells",
            domain.0, domain.1
        )));
    }
    let n = rounded as usize;
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidCells(n));
    }
    Ok(n)
}

fn grid_for(config: &ExperimentConfig, problem: &ProblemSpec) -> Result<Grid> {
    let cells = match config.n_cells {
        Some(n) => n,
        None => cells_for(problem.domain, config.resolution)?,
    };
    Grid::build(problem.domain, cells)
}

/// Assemble and solve one problem on `grid`, handling the escape-left
/// reduction by reflection.
pub fn solve_on_grid(
    problem: &ProblemSpec,
    grid: &Grid,
    scheme: Scheme,
    solver: &SolveOptions,
    one_sided: bool,
) -> Result<SolutionProfile> {
    if problem.kind == ProblemKind::EscapeLeft {
        let reflected = problem.reflected();
        let rgrid = Grid::build(reflected.domain, grid.n_cells())?;
        let mirrored = solve_on_grid(&reflected, &rgrid, scheme, solver, one_sided)?;
        let mut values = mirrored.values;
        values.reverse();
        return Ok(SolutionProfile {
            problem: problem.clone(),
            grid: grid.clone(),
            scheme,
            one_sided,
            values,
            stats: mirrored.stats,
        });
    }
    let system = match problem.kind {
        ProblemKind::ExitTime => assemble_exit_time(problem, grid, scheme, one_sided)?,
        ProblemKind::EscapeRight => assemble_escape(problem, grid, scheme, one_sided)?,
        ProblemKind::EscapeLeft => unreachable!("handled above"),
    };
    let (interior, stats) = solve_with(&system, solver)?;
    Ok(SolutionProfile {
        problem: problem.clone(),
        grid: grid.clone(),
        scheme,
        one_sided,
        values: attach_boundary(problem.kind, &interior),
        stats,
    })
}

/// Assemble, solve and return the profile for the configured problem.
pub fn run_profile(config: &ExperimentConfig) -> Result<SolutionProfile> {
    let problem = config.problem.clone().validated()?;
    let grid = grid_for(config, &problem)?;
    let one_sided = config.one_sided.resolve(&problem);
    solve_on_grid(&problem, &grid, config.scheme, &config.solver, one_sided)
}

/// Least-squares slope of `log10 y` against `log10 x`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|v| v.log10()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.log10()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

fn require_unit_pure_jump(problem: &ProblemSpec, what: &str) -> Result<()> {
    if problem.eps != 1.0 || problem.d != 0.0 || !problem.drift.is_zero() {
        return Err(Error::Config(format!(
            "{what} is defined for the unit-intensity pure-jump driftless case \
             (eps = 1, d = 0, zero drift)"
        )));
    }
    Ok(())
}

/// Pointwise error at the probe node against the study's oracle, per
/// resolution, with the fitted slope.
pub fn run_convergence(config: &ExperimentConfig) -> Result<ConvergenceReport> {
    let problem = config.problem.clone().validated()?;
    if config.resolutions.len() < 2 {
        return Err(Error::Config(
            "a convergence study needs at least two resolutions".into(),
        ));
    }
    let alpha = problem.alpha;

    let (oracle, reference): (Box<dyn Fn(f64) -> Result<f64>>, &str) = match config.study {
        StudyKind::Operator => {
            require_unit_pure_jump(&problem, "the operator study")?;
            if problem.domain != (-1.0, 1.0) {
                return Err(Error::Config(
                    "the operator study runs on the domain (-1, 1)".into(),
                ));
            }
            (
                Box::new(move |x| lhs_closed_form(alpha, x)),
                "generator closed form",
            )
        }
        StudyKind::PunchedHoleExit | StudyKind::CorrectedExit => {
            require_unit_pure_jump(&problem, "the exit-time study")?;
            let (a, b) = problem.domain;
            if a != -b {
                return Err(Error::Config(
                    "the exit-time study needs a symmetric domain (-b, b)".into(),
                ));
            }
            (
                Box::new(move |x| getoor_exit_time(alpha, b, x)),
                "stable exit-time closed form",
            )
        }
    };
    let scheme = match config.study {
        StudyKind::Operator => config.scheme,
        StudyKind::PunchedHoleExit => Scheme::PunchedHole,
        StudyKind::CorrectedExit => Scheme::Corrected,
    };
    let want = oracle(config.probe)?;

    let mut axis = Vec::new();
    let mut errors = Vec::new();
    for &resolution in &config.resolutions {
        let cells = cells_for(problem.domain, resolution)?;
        let grid = Grid::build(problem.domain, cells)?;
        let idx = grid
            .node_index_of(config.probe)
            .ok_or(Error::NonNodeProbe(config.probe))?;
        if idx == 0 || idx == grid.n_cells() {
            return Err(Error::NonNodeProbe(config.probe));
        }
        let got = match config.study {
            StudyKind::Operator => {
                let values: Vec<f64> = grid.nodes().iter().map(|&x| 1.0 - x * x).collect();
                operator_apply(&problem, &grid, &values, scheme)?[idx - 1]
            }
            _ => {
                let profile =
                    solve_on_grid(&problem, &grid, scheme, &config.solver, false)?;
                profile.values[idx]
            }
        };
        axis.push(resolution as f64);
        errors.push((got - want).abs());
    }
    if errors.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::Config(
            "a convergence error vanished or went non-finite; slope is undefined".into(),
        ));
    }
    let fitted_slope = fit_loglog_slope(&axis, &errors);
    Ok(ConvergenceReport {
        axis_name: "J",
        axis,
        errors,
        probe: config.probe,
        fitted_slope,
        reference: reference.into(),
    })
}

/// Deviation of the solved profile from the asymptotic expansion
/// `u0 + eps u1` at the probe node, for a decreasing list of eps values at
/// fixed resolution, with the fitted slope in eps.
pub fn run_eps_scaling(config: &ExperimentConfig) -> Result<ConvergenceReport> {
    let base = config.problem.clone().validated()?;
    if config.eps_values.is_empty() {
        return Err(Error::Config("eps_list must not be empty".into()));
    }
    if config.eps_values.iter().any(|&e| e <= 0.0) {
        return Err(Error::Config(
            "eps_list entries must be positive (the eps = 0 case is the order-0 problem itself)"
                .into(),
        ));
    }
    let expansion = asymptotic_exit_time(&base, 1)?;
    let grid = grid_for(config, &base)?;
    let idx = grid
        .node_index_of(config.probe)
        .ok_or(Error::NonNodeProbe(config.probe))?;
    let x = grid.node(idx);
    let u0x = expansion.u0(x);
    let u1x = expansion.u1(x).expect("order-1 expansion");

    let mut axis = Vec::new();
    let mut errors = Vec::new();
    for &eps in &config.eps_values {
        let mut problem = base.clone();
        problem.eps = eps;
        let profile = solve_on_grid(
            &problem,
            &grid,
            config.scheme,
            &config.solver,
            config.one_sided.resolve(&problem),
        )?;
        axis.push(eps);
        errors.push((profile.values[idx] - (u0x + eps * u1x)).abs());
    }
    if errors.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::Config(
            "an eps-scaling error vanished or went non-finite; slope is undefined".into(),
        ));
    }
    let fitted_slope = fit_loglog_slope(&axis, &errors);
    Ok(ConvergenceReport {
        axis_name: "eps",
        axis,
        errors,
        probe: x,
        fitted_slope,
        reference: "u0 + eps u1".into(),
    })
}

/// Cartesian-product sweep over the configured axes. Cells run
/// independently; failures stay in their cell instead of aborting the
/// sweep, and the output order never depends on execution order.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    let base = &config.problem;
    let alphas = axis_or(&config.alphas, base.alpha);
    let eps_values = axis_or(&config.eps_values, base.eps);
    let d_values = axis_or(&config.d_values, base.d);
    let domains: Vec<(f64, f64)> = if config.b_values.is_empty() {
        vec![base.domain]
    } else {
        config.b_values.iter().map(|&b| (-b, b)).collect()
    };

    let mut requests = Vec::new();
    for &alpha in &alphas {
        for &eps in &eps_values {
            for &d in &d_values {
                for &domain in &domains {
                    requests.push((alpha, eps, d, domain));
                }
            }
        }
    }

    let cells: Vec<SweepCell> = requests
        .into_par_iter()
        .map(|(alpha, eps, d, domain)| {
            let result = (|| {
                let problem = effective_problem(base, alpha, eps, d, domain).validated()?;
                let cells = match config.n_cells {
                    Some(n) => n,
                    None => cells_for(domain, config.resolution)?,
                };
                let grid = Grid::build(domain, cells)?;
                solve_on_grid(
                    &problem,
                    &grid,
                    config.scheme,
                    &config.solver,
                    config.one_sided.resolve(&problem),
                )
            })();
            SweepCell {
                alpha,
                eps,
                d,
                domain,
                result,
            }
        })
        .collect();

    Ok(SweepResult { cells })
}

fn axis_or(axis: &[f64], fallback: f64) -> Vec<f64> {
    if axis.is_empty() {
        vec![fallback]
    } else {
        axis.to_vec()
    }
}
