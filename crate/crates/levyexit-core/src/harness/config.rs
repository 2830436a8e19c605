//! Flat, line-oriented `key = value` experiment configs.
//!
//! Blank lines and `#` comments are ignored; lists are comma-separated.
//!
//! ```text
//! # pure-jump exit time at three stability indices
//! kind = exit-time
//! alpha = 1.5
//! eps = 1
//! d = 0
//! drift = zero
//! domain = -1, 1
//! resolution = 80
//! scheme = corrected
//! alphas = 0.5, 1, 1.5
//! ```

use crate::assembly::Scheme;
use crate::error::{Error, Result};
use crate::harness::{effective_problem, ExperimentConfig, OneSidedPolicy, StudyKind};
use crate::linsolve::SolveMethod;
use crate::problem::{DriftSpec, ProblemKind};

fn bad(lineno: usize, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("line {}: {}", lineno + 1, msg))
}

fn parse_f64(lineno: usize, v: &str) -> Result<f64> {
    v.trim()
        .parse()
        .map_err(|_| bad(lineno, format!("expected a number, got '{v}'")))
}

fn parse_usize(lineno: usize, v: &str) -> Result<usize> {
    v.trim()
        .parse()
        .map_err(|_| bad(lineno, format!("expected an integer, got '{v}'")))
}

fn parse_f64_list(lineno: usize, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|item| parse_f64(lineno, item)).collect()
}

fn parse_usize_list(lineno: usize, v: &str) -> Result<Vec<usize>> {
    v.split(',').map(|item| parse_usize(lineno, item)).collect()
}

fn parse_bool(lineno: usize, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "on" | "yes" => Ok(true),
        "false" | "off" | "no" => Ok(false),
        other => Err(bad(lineno, format!("expected true/false, got '{other}'"))),
    }
}

pub(crate) fn parse_drift(lineno: usize, v: &str) -> Result<DriftSpec> {
    let v = v.trim();
    if v == "zero" {
        return Ok(DriftSpec::Zero);
    }
    if v == "double-well" {
        return Ok(DriftSpec::DoubleWell);
    }
    if let Some(c) = v.strip_prefix("linear:") {
        return Ok(DriftSpec::Linear(parse_f64(lineno, c)?));
    }
    if let Some(coeffs) = v.strip_prefix("poly:") {
        return Ok(DriftSpec::Polynomial(parse_f64_list(lineno, coeffs)?));
    }
    Err(bad(
        lineno,
        format!("unknown drift '{v}' (use zero, linear:<c>, double-well, poly:<c0>,<c1>,...)"),
    ))
}

pub(crate) fn parse_scheme(lineno: usize, v: &str) -> Result<Scheme> {
    match v.trim() {
        "punched-hole" => Ok(Scheme::PunchedHole),
        "corrected" => Ok(Scheme::Corrected),
        "principal-value" => Ok(Scheme::PrincipalValue),
        other => Err(bad(lineno, format!("unknown scheme '{other}'"))),
    }
}

pub(crate) fn parse_one_sided(lineno: usize, v: &str) -> Result<OneSidedPolicy> {
    match v.trim() {
        "auto" => Ok(OneSidedPolicy::Auto),
        "on" => Ok(OneSidedPolicy::On),
        "off" => Ok(OneSidedPolicy::Off),
        other => Err(bad(lineno, format!("one_sided must be auto/on/off, got '{other}'"))),
    }
}

pub(crate) fn parse_solver(lineno: usize, v: &str) -> Result<SolveMethod> {
    match v.trim() {
        "lu" => Ok(SolveMethod::Lu),
        "gmres" => Ok(SolveMethod::Gmres),
        other => Err(bad(lineno, format!("solver must be lu or gmres, got '{other}'"))),
    }
}

/// Parse a scheme name as it appears in configs and CLI flags.
pub fn scheme_from_str(s: &str) -> Result<Scheme> {
    parse_scheme(usize::MAX - 1, s).map_err(|_| {
        Error::Config(format!(
            "unknown scheme '{s}' (punched-hole, corrected, principal-value)"
        ))
    })
}

/// Parse a solver name (`lu` or `gmres`).
pub fn solver_from_str(s: &str) -> Result<SolveMethod> {
    parse_solver(usize::MAX - 1, s)
        .map_err(|_| Error::Config(format!("unknown solver '{s}' (lu, gmres)")))
}

/// Parse a one-sided policy (`auto`, `on`, `off`).
pub fn one_sided_from_str(s: &str) -> Result<OneSidedPolicy> {
    parse_one_sided(usize::MAX - 1, s)
        .map_err(|_| Error::Config(format!("one-sided must be auto, on or off, got '{s}'")))
}

/// Parse a config file into an [`ExperimentConfig`], starting from the
/// defaults and validating the resulting base problem.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    // Raw requested noise parameters; folded into the effective problem at
    // the end so that alpha = 2 maps onto the pure-Gaussian path.
    let mut alpha = cfg.problem.alpha;
    let mut eps = cfg.problem.eps;
    let mut d = cfg.problem.d;
    let mut domain = cfg.problem.domain;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(lineno, "expected 'key = value'"))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "kind" => {
                cfg.problem.kind = match value {
                    "exit-time" => ProblemKind::ExitTime,
                    "escape-right" => ProblemKind::EscapeRight,
                    "escape-left" => ProblemKind::EscapeLeft,
                    other => return Err(bad(lineno, format!("unknown kind '{other}'"))),
                }
            }
            "alpha" => alpha = parse_f64(lineno, value)?,
            "eps" => eps = parse_f64(lineno, value)?,
            "d" => d = parse_f64(lineno, value)?,
            "drift" => cfg.problem.drift = parse_drift(lineno, value)?,
            "domain" => {
                let parts = parse_f64_list(lineno, value)?;
                if parts.len() != 2 {
                    return Err(bad(lineno, "domain needs exactly 'a, b'"));
                }
                domain = (parts[0], parts[1]);
            }
            "resolution" => cfg.resolution = parse_usize(lineno, value)?,
            "cells" => cfg.n_cells = Some(parse_usize(lineno, value)?),
            "resolutions" => cfg.resolutions = parse_usize_list(lineno, value)?,
            "probe" => cfg.probe = parse_f64(lineno, value)?,
            "scheme" => cfg.scheme = parse_scheme(lineno, value)?,
            "solver" => cfg.solver.method = parse_solver(lineno, value)?,
            "gmres_restart" => cfg.solver.gmres_restart = parse_usize(lineno, value)?,
            "rel_tol" => cfg.solver.rel_tol = parse_f64(lineno, value)?,
            "max_iter" => cfg.solver.max_iter = parse_usize(lineno, value)?,
            "jacobi" => cfg.solver.jacobi = parse_bool(lineno, value)?,
            "one_sided" => cfg.one_sided = parse_one_sided(lineno, value)?,
            "study" => {
                cfg.study = match value {
                    "operator" => StudyKind::Operator,
                    "punched-hole" => StudyKind::PunchedHoleExit,
                    "corrected" => StudyKind::CorrectedExit,
                    other => return Err(bad(lineno, format!("unknown study '{other}'"))),
                }
            }
            "alphas" => cfg.alphas = parse_f64_list(lineno, value)?,
            "eps_list" => cfg.eps_values = parse_f64_list(lineno, value)?,
            "d_list" => cfg.d_values = parse_f64_list(lineno, value)?,
            "b_list" => cfg.b_values = parse_f64_list(lineno, value)?,
            "x0" => cfg.x0 = parse_f64(lineno, value)?,
            "dt" => cfg.dt = parse_f64(lineno, value)?,
            "paths" => cfg.n_paths = parse_usize(lineno, value)?,
            "seed" => {
                cfg.seed = value
                    .parse()
                    .map_err(|_| bad(lineno, format!("expected a seed, got '{value}'")))?
            }
            other => return Err(bad(lineno, format!("unknown key '{other}'"))),
        }
    }

    let base = cfg.problem.clone();
    cfg.problem = effective_problem(&base, alpha, eps, d, domain).validated()?;
    Ok(cfg)
}
