//! Problem parameterization for the exit-time and escape boundary-value
//! problems: stability index `alpha`, jump intensity `eps`, Gaussian
//! diffusion coefficient `d`, drift field and bounded domain.

use crate::error::{Error, Result};

/// Drift field `f` of the SDE `dX = f(X) dt + dL`.
///
/// Restricted to named variants plus raw polynomials so problem files stay
/// declarative; every drift the experiments use fits here.
#[derive(Debug, Clone, PartialEq)]
pub enum DriftSpec {
    /// `f(x) = 0`.
    Zero,
    /// `f(x) = c x`; `c = -1` is the Ornstein-Uhlenbeck pull.
    Linear(f64),
    /// `f(x) = x - x^3`, the double-well field with stable points at +-1.
    DoubleWell,
    /// `f(x) = sum coeffs[k] x^k` (ascending powers).
    Polynomial(Vec<f64>),
}

impl DriftSpec {
    /// Evaluate `f(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            DriftSpec::Zero => 0.0,
            DriftSpec::Linear(c) => c * x,
            DriftSpec::DoubleWell => x - x * x * x,
            DriftSpec::Polynomial(coeffs) => {
                coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
            }
        }
    }

    /// Antiderivative `F(x) = int_0^x f(s) ds`, exact for every variant.
    pub fn antiderivative(&self, x: f64) -> f64 {
        match self {
            DriftSpec::Zero => 0.0,
            DriftSpec::Linear(c) => 0.5 * c * x * x,
            DriftSpec::DoubleWell => 0.5 * x * x - 0.25 * x * x * x * x,
            DriftSpec::Polynomial(coeffs) => coeffs
                .iter()
                .enumerate()
                .rev()
                .fold(0.0, |acc, (k, &c)| (acc + c / (k + 1) as f64) * x),
        }
    }

    /// Drift of the space-reflected process `x -> -x`: `f~(x) = -f(-x)`.
    ///
    /// Odd drifts (all the named ones) are invariant; polynomials get their
    /// even coefficients negated.
    pub fn reflected(&self) -> DriftSpec {
        match self {
            DriftSpec::Zero => DriftSpec::Zero,
            DriftSpec::Linear(c) => DriftSpec::Linear(*c),
            DriftSpec::DoubleWell => DriftSpec::DoubleWell,
            DriftSpec::Polynomial(coeffs) => DriftSpec::Polynomial(
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| if k % 2 == 0 { -c } else { c })
                    .collect(),
            ),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            DriftSpec::Zero => true,
            DriftSpec::Linear(c) => *c == 0.0,
            DriftSpec::DoubleWell => false,
            DriftSpec::Polynomial(coeffs) => coeffs.iter().all(|&c| c == 0.0),
        }
    }
}

impl std::fmt::Display for DriftSpec {
    /// The config-file spelling: `zero`, `linear:<c>`, `double-well`,
    /// `poly:<c0>,<c1>,...`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DriftSpec::Zero => write!(f, "zero"),
            DriftSpec::Linear(c) => write!(f, "linear:{c}"),
            DriftSpec::DoubleWell => write!(f, "double-well"),
            DriftSpec::Polynomial(coeffs) => {
                write!(f, "poly:")?;
                for (i, c) in coeffs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
        }
    }
}

/// Which boundary-value problem to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    /// Mean first exit time from the domain.
    ExitTime,
    /// Probability of landing in `[b, inf)` on first exit.
    EscapeRight,
    /// Probability of landing in `(-inf, a]` on first exit. Solved by
    /// reflecting onto an [`ProblemKind::EscapeRight`] problem.
    EscapeLeft,
}

impl ProblemKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemKind::ExitTime => "exit-time",
            ProblemKind::EscapeRight => "escape-right",
            ProblemKind::EscapeLeft => "escape-left",
        }
    }
}

/// One boundary-value problem instance.
///
/// The driving noise has generating triplet `(0, d, eps nu_alpha)`: no
/// linear term, Gaussian part `d >= 0` and the symmetric alpha-stable jump
/// measure scaled by `eps >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub alpha: f64,
    pub eps: f64,
    pub d: f64,
    pub drift: DriftSpec,
    /// Open interval `(a, b)` the process starts in.
    pub domain: (f64, f64),
    pub kind: ProblemKind,
}

impl ProblemSpec {
    /// Check every structural invariant, returning the first violation.
    ///
    /// `alpha` must lie strictly inside `(0, 2)`; pure-Gaussian dynamics
    /// (the `alpha = 2` limit) are requested with `eps = 0` and an unused
    /// `alpha` placeholder instead, because the jump formulas divide by
    /// `2 - alpha`.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return Err(Error::InvalidAlpha(self.alpha));
        }
        if !self.eps.is_finite() || self.eps < 0.0 {
            return Err(Error::InvalidEps(self.eps));
        }
        if !self.d.is_finite() || self.d < 0.0 {
            return Err(Error::InvalidDiffusion(self.d));
        }
        if self.eps == 0.0 && self.d == 0.0 {
            return Err(Error::DegenerateOperator);
        }
        let (a, b) = self.domain;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidDomain(a, b));
        }
        // Drift must evaluate finite across the closed domain.
        let n = 64;
        for j in 0..=n {
            let x = a + (b - a) * (j as f64) / (n as f64);
            if !self.drift.eval(x).is_finite() {
                return Err(Error::NonFiniteDrift(x));
            }
        }
        Ok(())
    }

    /// Validate and pass the problem through unchanged.
    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    /// The space-reflected problem `x -> -x`: domain `(-b, -a)`, drift
    /// `-f(-x)`, and escape targets swapped.
    pub fn reflected(&self) -> ProblemSpec {
        let kind = match self.kind {
            ProblemKind::ExitTime => ProblemKind::ExitTime,
            ProblemKind::EscapeRight => ProblemKind::EscapeLeft,
            ProblemKind::EscapeLeft => ProblemKind::EscapeRight,
        };
        ProblemSpec {
            alpha: self.alpha,
            eps: self.eps,
            d: self.d,
            drift: self.drift.reflected(),
            domain: (-self.domain.1, -self.domain.0),
            kind,
        }
    }
}
