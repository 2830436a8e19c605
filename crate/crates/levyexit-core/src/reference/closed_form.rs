//! Closed-form references for the pure-jump unit-intensity case.

use crate::error::{Error, Result};
use crate::reference::quad::adaptive_simpson;
use crate::special::{c_alpha, gamma};

/// Generator applied to the test profile `u(x) = 1 - x^2` on `(-1, 1)` with
/// `d = 0`, `f = 0`, `eps = 1` and `u = 0` outside:
///
/// ```text
/// LHS = -C_a [ (1+x)^(1-a) ((1-x)/a - 2x/(1-a) + (1+x)/(2-a))
///            + (1-x)^(1-a) ((1+x)/a + 2x/(1-a) + (1-x)/(2-a)) ]   (a != 1)
/// LHS = -C_1 (4 + 2x ln((1-x)/(1+x)))                             (a  = 1)
/// ```
pub fn lhs_closed_form(alpha: f64, x: f64) -> Result<f64> {
    let ca = c_alpha(alpha)?;
    if x.abs() >= 1.0 {
        return Err(Error::OutsideDomain {
            x,
            lo: -1.0,
            hi: 1.0,
        });
    }
    if (alpha - 1.0).abs() < 1e-12 {
        return Ok(-ca * (4.0 + 2.0 * x * ((1.0 - x) / (1.0 + x)).ln()));
    }
    let a = alpha;
    let left = (1.0 + x).powf(1.0 - a)
        * ((1.0 - x) / a - 2.0 * x / (1.0 - a) + (1.0 + x) / (2.0 - a));
    let right = (1.0 - x).powf(1.0 - a)
        * ((1.0 + x) / a + 2.0 * x / (1.0 - a) + (1.0 - x) / (2.0 - a));
    Ok(-ca * (left + right))
}

/// Mean exit time of the symmetric alpha-stable process (unit intensity,
/// no drift, no Gaussian part) from `(-b, b)`:
///
/// `u(x) = sqrt(pi) (b^2 - x^2)^(a/2) / (2^a Gamma(1 + a/2) Gamma(1/2 + a/2))`
///
/// Valid for `alpha` in `(0, 2]`; `alpha = 2` reproduces the Brownian
/// parabola `(b^2 - x^2) / 2`.
pub fn getoor_exit_time(alpha: f64, b: f64, x: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if !(b > 0.0) || x.abs() > b {
        return Err(Error::OutsideDomain { x, lo: -b, hi: b });
    }
    if x.abs() == b {
        return Ok(0.0);
    }
    let num = std::f64::consts::PI.sqrt() * (b * b - x * x).powf(alpha / 2.0);
    let den = 2.0_f64.powf(alpha) * gamma(1.0 + alpha / 2.0)? * gamma(0.5 + alpha / 2.0)?;
    Ok(num / den)
}

/// Escape probability of the symmetric alpha-stable process from `(-b, b)`
/// into `[b, inf)`:
///
/// `P(x) = (2b)^(1-a) Gamma(a) / Gamma(a/2)^2 int_{-b}^x (b^2-y^2)^(a/2-1) dy`
///
/// Evaluated through the substitution `y = b sin(theta)` as one half plus an
/// odd part, which makes `P(x) + P(-x) = 1` hold identically and keeps the
/// quadrature away from the endpoint singularity except for `|x| -> b`.
pub fn escape_prob_closed_form(alpha: f64, b: f64, x: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if !(b > 0.0) || x.abs() > b {
        return Err(Error::OutsideDomain { x, lo: -b, hi: b });
    }
    if x == b {
        return Ok(1.0);
    }
    if x == -b {
        return Ok(0.0);
    }
    let pref = (2.0 * b).powf(1.0 - alpha) * gamma(alpha)? / gamma(alpha / 2.0)?.powi(2);
    let theta = (x.abs() / b).asin();
    let odd = pref
        * adaptive_simpson(
            |t| b.powf(alpha - 1.0) * t.cos().powf(alpha - 1.0),
            0.0,
            theta,
            1e-12,
        );
    Ok(0.5 + x.signum() * odd)
}
