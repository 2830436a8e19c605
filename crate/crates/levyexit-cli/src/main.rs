//! Command-line driver: solves exit-time and escape-probability problems,
//! runs the verification studies and parameter sweeps, and emits CSV.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use levyexit_core::harness::{
    one_sided_from_str, parse_config, run_convergence, run_eps_scaling, run_profile, run_sweep,
    scheme_from_str, solver_from_str, to_csv_string, ExperimentConfig, StudyKind,
};
use levyexit_core::reference::{getoor_exit_time, mc_exit_time};
use levyexit_core::{Error, ProblemKind, Result};

#[derive(Parser)]
#[command(
    name = "levyexit",
    about = "Mean exit times and escape probabilities for drift + Brownian + alpha-stable noise",
    version
)]
struct Cli {
    /// Experiment config file (flat `key = value` lines).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output CSV path; stdout when omitted.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Discretization: punched-hole, corrected or principal-value.
    #[arg(long, global = true)]
    scheme: Option<String>,

    /// Linear solver: lu or gmres.
    #[arg(long, global = true)]
    solver: Option<String>,

    /// One-sided drift differencing at the edge rows: auto, on or off.
    #[arg(long = "one-sided", global = true)]
    one_sided: Option<String>,

    /// Monte Carlo seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply the discrete generator to 1 - x^2 and report the error and
    /// fitted convergence slope against the closed form, per alpha.
    VerifyLhs,
    /// Solve one mean-exit-time profile.
    ExitTime,
    /// Solve one escape-probability profile.
    EscapeProb {
        /// Target side on first exit: right ([b, inf)) or left ((-inf, a]).
        #[arg(long)]
        target: Option<String>,
    },
    /// Convergence study at the probe point (kind set by `study` in the
    /// config: operator, punched-hole or corrected).
    Convergence,
    /// Deviation from the asymptotic expansion u0 + eps u1 across eps_list.
    EpsScaling,
    /// Cartesian sweep over alphas / eps_list / d_list / b_list.
    Sweep,
    /// Monte Carlo cross-check of one mean exit time.
    McCheck,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => parse_config(&std::fs::read_to_string(path)?)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = &cli.scheme {
        config.scheme = scheme_from_str(s)?;
    }
    if let Some(s) = &cli.solver {
        config.solver.method = solver_from_str(s)?;
    }
    if let Some(s) = &cli.one_sided {
        config.one_sided = one_sided_from_str(s)?;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(path, text)?;
            Ok(())
        }
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(Error::from)
        }
    }
}

/// Run a per-alpha ladder of convergence reports and stack the blocks.
fn alpha_ladder(config: &ExperimentConfig, study: StudyKind) -> Result<String> {
    let alphas = if config.alphas.is_empty() {
        vec![config.problem.alpha]
    } else {
        config.alphas.clone()
    };
    let mut text = String::new();
    for (i, &alpha) in alphas.iter().enumerate() {
        let mut cfg = config.clone();
        cfg.study = study;
        cfg.problem.alpha = alpha;
        let report = run_convergence(&cfg)?;
        if i > 0 {
            text.push('\n');
        }
        text.push_str(&format!("# alpha={alpha}\n"));
        text.push_str(&to_csv_string(&report));
        eprintln!(
            "alpha={alpha}: fitted slope {:.3}, error {:.3e} at {}={}",
            report.fitted_slope,
            report.errors.last().unwrap(),
            report.axis_name,
            report.axis.last().unwrap(),
        );
    }
    Ok(text)
}

fn run(cli: Cli) -> Result<()> {
    let mut config = load_config(&cli)?;
    match &cli.command {
        Command::VerifyLhs => {
            if config.alphas.is_empty() {
                config.alphas = vec![0.5, 1.0, 1.5];
            }
            let text = alpha_ladder(&config, StudyKind::Operator)?;
            emit(&cli.out, &text)
        }
        Command::Convergence => {
            let text = alpha_ladder(&config, config.study)?;
            emit(&cli.out, &text)
        }
        Command::ExitTime => {
            config.problem.kind = ProblemKind::ExitTime;
            let profile = run_profile(&config)?;
            eprintln!(
                "exit time: {} cells, residual {:.2e}",
                profile.grid.n_cells(),
                profile.stats.residual
            );
            emit(&cli.out, &to_csv_string(&profile))
        }
        Command::EscapeProb { target } => {
            config.problem.kind = match target.as_deref() {
                Some("right") => ProblemKind::EscapeRight,
                Some("left") => ProblemKind::EscapeLeft,
                Some(other) => {
                    return Err(Error::Config(format!(
                        "target must be left or right, got '{other}'"
                    )))
                }
                None => match config.problem.kind {
                    k @ (ProblemKind::EscapeLeft | ProblemKind::EscapeRight) => k,
                    ProblemKind::ExitTime => ProblemKind::EscapeRight,
                },
            };
            let profile = run_profile(&config)?;
            eprintln!(
                "escape probability: {} cells, residual {:.2e}",
                profile.grid.n_cells(),
                profile.stats.residual
            );
            emit(&cli.out, &to_csv_string(&profile))
        }
        Command::EpsScaling => {
            let report = run_eps_scaling(&config)?;
            eprintln!(
                "eps scaling at x={}: fitted slope {:.3}",
                report.probe, report.fitted_slope
            );
            emit(&cli.out, &to_csv_string(&report))
        }
        Command::Sweep => {
            let sweep = run_sweep(&config)?;
            let failed = sweep.cells.iter().filter(|c| c.result.is_err()).count();
            eprintln!("sweep: {} cells, {} failed", sweep.cells.len(), failed);
            emit(&cli.out, &to_csv_string(&sweep))
        }
        Command::McCheck => {
            let problem = config.problem.clone().validated()?;
            let estimate = mc_exit_time(&problem, config.x0, config.dt, config.n_paths, config.seed)?;
            // Reference: closed form when available, otherwise the solver.
            let (a, b) = problem.domain;
            let (reference, name) = if problem.d == 0.0
                && problem.eps > 0.0
                && problem.drift.is_zero()
                && a == -b
            {
                (
                    getoor_exit_time(problem.alpha, b, config.x0)? / problem.eps,
                    "closed form",
                )
            } else {
                let profile = run_profile(&config)?;
                let v = profile.value_at(config.x0).ok_or(Error::NonNodeProbe(config.x0))?;
                (v, "numerical solve")
            };
            let diff = (estimate.mean - reference).abs();
            eprintln!(
                "mc: mean {:.5} +- {:.5} vs {name} {:.5} (|diff| {:.2e}, {} paths)",
                estimate.mean, estimate.std_error, reference, diff, estimate.n_paths
            );
            let mut text = String::new();
            text.push_str(&format!("# x0={}\n", config.x0));
            text.push_str(&format!("# reference={name}\n"));
            text.push_str("quantity,value\n");
            text.push_str(&format!("mean,{:.16e}\n", estimate.mean));
            text.push_str(&format!("std_error,{:.16e}\n", estimate.std_error));
            text.push_str(&format!("n_paths,{}\n", estimate.n_paths));
            text.push_str(&format!("dt,{:.16e}\n", estimate.dt));
            text.push_str(&format!("seed,{}\n", estimate.seed));
            text.push_str(&format!(
                "truncated_fraction,{:.16e}\n",
                estimate.truncated_fraction
            ));
            text.push_str(&format!("reference_value,{:.16e}\n", reference));
            text.push_str(&format!("abs_difference,{:.16e}\n", diff));
            emit(&cli.out, &text)
        }
    }
}
