//! Small-jump asymptotic expansion of the mean exit time.
//!
//! Writing `u = u0 + eps u1 + O(eps^2)`, the orders solve
//!
//! ```text
//! (d/2) u0'' + f u0' = -1,      u0(a) = u0(b) = 0
//! (d/2) u1'' + f u1' = -g,      u1(a) = u1(b) = 0
//! ```
//!
//! where `g` is the jump functional of the zero-extended `u0`:
//!
//! `g(x) = C_a int [u0(x+y) - u0(x) - 1_{|y|<delta} y u0'(x)] / |y|^(1+a) dy`
//!
//! Both linear problems are solved by integrating factors. With
//! `F(x) = (2/d) int_a^x f` and `phi(x) = int_a^x e^-F`, variation of
//! parameters gives
//!
//! `u(x) = (2/d) [ phi(x)/phi(b) * int_a^b r e^F (phi(b) - phi(s)) ds
//!                 - int_a^x r e^F (phi(x) - phi(s)) ds ]`
//!
//! for right-hand side `r`. The boundary conditions fix the two integration
//! constants per order; they are imposed numerically here rather than
//! carried symbolically.
//!
//! `g` behaves like `(x - a)^(1-a)` at the left boundary (and mirrored at
//! the right), so the `u1` integrals run through the power-substitution
//! quadrature of [`crate::reference::quad`]; the singular inner window of
//! `g` itself is symmetrized into second differences with the leading
//! Taylor term handled analytically.

use crate::error::{Error, Result};
use crate::problem::{DriftSpec, ProblemSpec};
use crate::reference::quad::{adaptive_simpson, power_singular_hi, power_singular_lo};
use crate::special::c_alpha;

const TOL_G: f64 = 1e-11;
const TOL_U1: f64 = 1e-9;
const TABLE_PANELS: usize = 400;

/// Five-point Gauss-Legendre rule on [-1, 1].
const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

fn gauss5<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> f64 {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut sum = 0.0;
    for (x, w) in GL_NODES.iter().zip(&GL_WEIGHTS) {
        sum += w * f(mid + half * x);
    }
    sum * half
}

/// Integrating-factor tables for a general drift: cumulative integrals of
/// `e^F`, `e^-F` and `e^F phi` on a fine uniform mesh, refined inside a
/// panel by the same Gauss rule.
struct OdeTables {
    a: f64,
    b: f64,
    d: f64,
    drift: DriftSpec,
    hp: f64,
    cum_gexp: Vec<f64>,
    cum_phi: Vec<f64>,
    cum_j: Vec<f64>,
    /// u0' integration constant.
    c0: f64,
}

impl OdeTables {
    fn build(a: f64, b: f64, d: f64, drift: DriftSpec) -> OdeTables {
        let hp = (b - a) / TABLE_PANELS as f64;
        let mut t = OdeTables {
            a,
            b,
            d,
            drift,
            hp,
            cum_gexp: vec![0.0; TABLE_PANELS + 1],
            cum_phi: vec![0.0; TABLE_PANELS + 1],
            cum_j: vec![0.0; TABLE_PANELS + 1],
            c0: 0.0,
        };
        for p in 0..TABLE_PANELS {
            let lo = a + p as f64 * hp;
            let hi = lo + hp;
            t.cum_gexp[p + 1] = t.cum_gexp[p] + gauss5(&|s| t.exp_f(s), lo, hi);
            t.cum_phi[p + 1] = t.cum_phi[p] + gauss5(&|s| t.exp_f_neg(s), lo, hi);
        }
        for p in 0..TABLE_PANELS {
            let lo = a + p as f64 * hp;
            let hi = lo + hp;
            t.cum_j[p + 1] = t.cum_j[p] + gauss5(&|s| t.exp_f(s) * t.phi(s), lo, hi);
        }
        let phi_b = t.cum_phi[TABLE_PANELS];
        let gexp_b = t.cum_gexp[TABLE_PANELS];
        let j_b = t.cum_j[TABLE_PANELS];
        t.c0 = (2.0 / d) * (phi_b * gexp_b - j_b) / phi_b;
        t
    }

    fn big_f(&self, x: f64) -> f64 {
        (2.0 / self.d) * (self.drift.antiderivative(x) - self.drift.antiderivative(self.a))
    }

    fn exp_f(&self, x: f64) -> f64 {
        self.big_f(x).exp()
    }

    fn exp_f_neg(&self, x: f64) -> f64 {
        (-self.big_f(x)).exp()
    }

    fn cum_eval<F: Fn(f64) -> f64>(&self, table: &[f64], f: F, x: f64) -> f64 {
        let x = x.clamp(self.a, self.b);
        let pos = (x - self.a) / self.hp;
        let p = (pos.floor() as usize).min(TABLE_PANELS - 1);
        let start = self.a + p as f64 * self.hp;
        table[p] + gauss5(&f, start, x)
    }

    fn gexp(&self, x: f64) -> f64 {
        self.cum_eval(&self.cum_gexp, |s| self.exp_f(s), x)
    }

    fn phi(&self, x: f64) -> f64 {
        self.cum_eval(&self.cum_phi, |s| self.exp_f_neg(s), x)
    }

    fn jtab(&self, x: f64) -> f64 {
        self.cum_eval(&self.cum_j, |s| self.exp_f(s) * self.phi(s), x)
    }

    fn u0(&self, x: f64) -> f64 {
        if x <= self.a || x >= self.b {
            return 0.0;
        }
        // u0 = C phi(x) - (2/d) int_a^x e^-F(t) Gexp(t) dt, with the inner
        // double integral flattened to phi(x) Gexp(x) - J(x).
        self.c0 * self.phi(x) - (2.0 / self.d) * (self.phi(x) * self.gexp(x) - self.jtab(x))
    }

    fn du0(&self, x: f64) -> f64 {
        self.exp_f_neg(x) * (self.c0 - (2.0 / self.d) * self.gexp(x))
    }
}

/// `u0` plus the integrating-factor machinery behind it.
enum Background {
    /// Zero drift: everything in closed form.
    Quadratic { a: f64, b: f64, d: f64 },
    General(Box<OdeTables>),
}

impl Background {
    fn bounds(&self) -> (f64, f64) {
        match self {
            Background::Quadratic { a, b, .. } => (*a, *b),
            Background::General(t) => (t.a, t.b),
        }
    }

    fn u0(&self, x: f64) -> f64 {
        match self {
            Background::Quadratic { a, b, d } => {
                if x <= *a || x >= *b {
                    0.0
                } else {
                    (x - a) * (b - x) / d
                }
            }
            Background::General(t) => t.u0(x),
        }
    }

    fn du0(&self, x: f64) -> f64 {
        match self {
            Background::Quadratic { a, b, d } => (a + b - 2.0 * x) / d,
            Background::General(t) => t.du0(x),
        }
    }

    /// u0'' straight from the order-0 equation, no differencing involved.
    fn ddu0(&self, x: f64, drift: &DriftSpec, d: f64) -> f64 {
        match self {
            Background::Quadratic { d, .. } => -2.0 / d,
            Background::General(_) => -(2.0 / d) * (1.0 + drift.eval(x) * self.du0(x)),
        }
    }

    fn phi(&self, x: f64) -> f64 {
        match self {
            Background::Quadratic { a, .. } => x - a,
            Background::General(t) => t.phi(x),
        }
    }

    fn phi_total(&self) -> f64 {
        match self {
            Background::Quadratic { a, b, .. } => b - a,
            Background::General(t) => t.cum_phi[TABLE_PANELS],
        }
    }

    fn exp_f(&self, x: f64) -> f64 {
        match self {
            Background::Quadratic { .. } => 1.0,
            Background::General(t) => t.exp_f(x),
        }
    }
}

/// The jump functional `g` of the zero-extended `u0`, evaluated through the
/// same local-absorption decomposition the assembly uses: analytic exterior
/// tails, a symmetrized singular inner window `|y| < delta` (with the
/// leading Taylor term below `y0` done in closed form), and the leftover
/// one-sided window split off at `delta = min(x - a, b - x)`.
fn jump_functional(
    bg: &Background,
    drift: &DriftSpec,
    d: f64,
    alpha: f64,
    ca: f64,
    x: f64,
) -> f64 {
    let (a, b) = bg.bounds();
    let dl = x - a;
    let dr = b - x;
    let delta = dl.min(dr);
    let u0x = bg.u0(x);
    let absorb = -u0x * (dl.powf(-alpha) + dr.powf(-alpha)) / alpha;

    let y0 = delta.min(1e-3 * (b - a));
    let mut inner = bg.ddu0(x, drift, d) * y0.powf(2.0 - alpha) / (2.0 - alpha);
    if delta > y0 {
        inner += adaptive_simpson(
            |y| (bg.u0(x + y) + bg.u0(x - y) - 2.0 * u0x) / y.powf(1.0 + alpha),
            y0,
            delta,
            TOL_G,
        );
    }

    let outer = if dl > delta {
        adaptive_simpson(
            |y| (bg.u0(x + y) - u0x) / (-y).powf(1.0 + alpha),
            -dl,
            -delta,
            TOL_G,
        )
    } else if dr > delta {
        adaptive_simpson(
            |y| (bg.u0(x + y) - u0x) / y.powf(1.0 + alpha),
            delta,
            dr,
            TOL_G,
        )
    } else {
        0.0
    };

    ca * (absorb + inner + outer)
}

enum FirstRoute {
    /// Closed forms, valid for zero drift on (-1, 1); scales as 1/d^2.
    ClosedUnit,
    /// Green-function quadrature with the total integral precomputed.
    Quadrature { ib: f64 },
}

/// Asymptotic solution `u0 + eps u1` with the boundary constants resolved.
pub struct AsymptoticSolution {
    pub eps: f64,
    pub order: u8,
    alpha: f64,
    ca: f64,
    d: f64,
    drift: DriftSpec,
    background: Background,
    first: Option<FirstRoute>,
}

impl AsymptoticSolution {
    /// Zero-order profile (the pure-diffusion exit time).
    pub fn u0(&self, x: f64) -> f64 {
        self.background.u0(x)
    }

    /// First-order correction profile; `None` for an order-0 expansion.
    pub fn u1(&self, x: f64) -> Option<f64> {
        let route = self.first.as_ref()?;
        let (a, b) = self.background.bounds();
        if x <= a || x >= b {
            return Some(0.0);
        }
        Some(match route {
            FirstRoute::ClosedUnit => u1_closed_form(self.alpha, x) / (self.d * self.d),
            FirstRoute::Quadrature { ib } => {
                let beta = 1.0 - self.alpha;
                let mid = 0.5 * (a + b);
                let phi_x = self.background.phi(x);
                let weighted = |s: f64| {
                    jump_functional(&self.background, &self.drift, self.d, self.alpha, self.ca, s)
                        * self.background.exp_f(s)
                        * (phi_x - self.background.phi(s))
                };
                let ix = if x <= mid {
                    power_singular_lo(weighted, a, x, beta, TOL_U1)
                } else {
                    power_singular_lo(&weighted, a, mid, beta, TOL_U1)
                        + adaptive_simpson(&weighted, mid, x, TOL_U1)
                };
                (2.0 / self.d) * (phi_x / self.background.phi_total() * ib - ix)
            }
        })
    }

    /// `u0 + eps u1` (or just `u0` at order 0).
    pub fn eval(&self, x: f64) -> f64 {
        let mut v = self.u0(x);
        if let Some(u1) = self.u1(x) {
            v += self.eps * u1;
        }
        v
    }
}

fn build(problem: &ProblemSpec, order: u8, force_quadrature: bool) -> Result<AsymptoticSolution> {
    problem.validate()?;
    if problem.d <= 0.0 {
        return Err(Error::RequiresDiffusion);
    }
    if order > 1 {
        return Err(Error::InvalidOptions(format!(
            "expansion order must be 0 or 1, got {order}"
        )));
    }
    let (a, b) = problem.domain;
    let background = if problem.drift.is_zero() {
        Background::Quadratic {
            a,
            b,
            d: problem.d,
        }
    } else {
        Background::General(Box::new(OdeTables::build(
            a,
            b,
            problem.d,
            problem.drift.clone(),
        )))
    };
    let ca = c_alpha(problem.alpha)?;
    let first = if order == 1 {
        let closed_form_applies =
            problem.drift.is_zero() && problem.domain == (-1.0, 1.0) && !force_quadrature;
        if closed_form_applies {
            Some(FirstRoute::ClosedUnit)
        } else {
            // Precompute the full-interval integral of the Green formula.
            let beta = 1.0 - problem.alpha;
            let mid = 0.5 * (a + b);
            let phi_total = background.phi_total();
            let drift = problem.drift.clone();
            let weighted = |s: f64| {
                jump_functional(&background, &drift, problem.d, problem.alpha, ca, s)
                    * background.exp_f(s)
                    * (phi_total - background.phi(s))
            };
            // g ~ (s-a)^(1-alpha) at the left end; at the right end the
            // (phi(b) - phi(s)) weight adds one extra power.
            let ib = power_singular_lo(&weighted, a, mid, beta, TOL_U1)
                + power_singular_hi(&weighted, mid, b, beta + 1.0, TOL_U1);
            Some(FirstRoute::Quadrature { ib })
        }
    } else {
        None
    };
    Ok(AsymptoticSolution {
        eps: problem.eps,
        order,
        alpha: problem.alpha,
        ca,
        d: problem.d,
        drift: problem.drift.clone(),
        background,
        first,
    })
}

/// Asymptotic expansion of the exit time, order 0 or 1. Uses the closed
/// forms when the problem is the zero-drift case on (-1, 1) and quadrature
/// otherwise.
pub fn asymptotic_exit_time(problem: &ProblemSpec, order: u8) -> Result<AsymptoticSolution> {
    build(problem, order, false)
}

/// Same expansion but forcing the quadrature route for `u1`, so it can be
/// checked against the closed form independently.
pub fn asymptotic_exit_time_quadrature(
    problem: &ProblemSpec,
    order: u8,
) -> Result<AsymptoticSolution> {
    build(problem, order, true)
}

/// Closed-form first-order correction for zero drift and unit diffusion on
/// (-1, 1):
///
/// ```text
/// u1 = 2 C_a / (a(1-a)(2-a)(3-a)(4-a)) [ (2-a)(1+x)^(4-a)
///      + (4-a)(1+x)^(3-a)(1-x) + (4-a)(1+x)(1-x)^(3-a)
///      + (2-a)(1-x)^(4-a) - 2^(4-a)(2-a) ]                 (a != 1)
/// u1 = (2 C_1 / 3) [ 2x^2 - 2 - 4 ln 2 + (2+x)(1-x)^2 ln(1-x)
///      + (2-x)(1+x)^2 ln(1+x) ]                            (a  = 1)
/// ```
pub fn u1_closed_form(alpha: f64, x: f64) -> f64 {
    let ca = c_alpha(alpha).expect("alpha validated upstream");
    if x <= -1.0 || x >= 1.0 {
        return 0.0;
    }
    if (alpha - 1.0).abs() < 1e-12 {
        let ln2 = std::f64::consts::LN_2;
        let t1 = (2.0 + x) * (1.0 - x) * (1.0 - x) * (1.0 - x).ln();
        let t2 = (2.0 - x) * (1.0 + x) * (1.0 + x) * (1.0 + x).ln();
        return 2.0 * ca / 3.0 * (2.0 * x * x - 2.0 - 4.0 * ln2 + t1 + t2);
    }
    let a = alpha;
    let pref = 2.0 * ca / (a * (1.0 - a) * (2.0 - a) * (3.0 - a) * (4.0 - a));
    pref * ((2.0 - a) * (1.0 + x).powf(4.0 - a)
        + (4.0 - a) * (1.0 + x).powf(3.0 - a) * (1.0 - x)
        + (4.0 - a) * (1.0 + x) * (1.0 - x).powf(3.0 - a)
        + (2.0 - a) * (1.0 - x).powf(4.0 - a)
        - 2.0_f64.powf(4.0 - a) * (2.0 - a))
}
