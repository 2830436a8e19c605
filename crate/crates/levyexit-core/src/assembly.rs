//! Assembly of the dense linear systems discretizing the nonlocal generator
//!
//! For an interior node `x_j` the discrete equation combines
//!
//! - the second difference `C_h (U_{j-1} - 2 U_j + U_{j+1}) / h^2`,
//! - the drift term `f(x_j) (U_{j+1} - U_{j-1}) / (2h)` (optionally a
//!   second-order one-sided stencil at the first/last interior node),
//! - the local absorption
//!   `-(eps C_a / a) [(x_j - a)^-a + (b - x_j)^-a] U_j` collecting the jump
//!   mass landing outside the domain,
//! - and the punched-hole trapezoidal sum
//!   `eps C_a h sum''_{k != 0} (U_{j+k} - U_j) / |k h|^(1+a)` over the
//!   window of offsets staying inside `[a, b]`, where `sum''` halves the
//!   two end summation indices.
//!
//! Scheme variants differ in two places. [`Scheme::PunchedHole`] leaves
//! `C_h = d/2`; the other two fold the leading quadrature error of the
//! singular kernel (Navot's analysis) into
//! `C_h = d/2 - eps C_a zeta(a-1) h^(2-a)`. [`Scheme::PunchedHole`] and
//! [`Scheme::Corrected`] additionally carry the two-branch form with an
//! explicit desingularizing term `-(U_{j+1} - U_{j-1}) k / 2` inside the
//! symmetric window `|y| < delta`, `delta = min(x_j - a, b - x_j)`, while
//! [`Scheme::PrincipalValue`] drops it (its symmetric discrete sum cancels
//! pairwise) and uses a single sum over the whole window.
//!
//! Exterior data never needs ghost nodes: exit-time contributions outside
//! the domain are zero, and the escape problem's known value 1 right of `b`
//! is folded into the right-hand side.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linsolve::SolverStats;
use crate::matrix::DenseMatrix;
use crate::problem::{ProblemKind, ProblemSpec};
use crate::special::{c_alpha, riemann_zeta};

/// Discretization variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Two-branch punched-hole trapezoidal rule, no quadrature correction.
    PunchedHole,
    /// Two-branch rule with the Navot correction folded into `C_h`.
    Corrected,
    /// Single-equation principal-value form, with correction.
    PrincipalValue,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::PunchedHole => "punched-hole",
            Scheme::Corrected => "corrected",
            Scheme::PrincipalValue => "principal-value",
        }
    }
}

/// Dense system over the interior unknowns `U_1 .. U_{N-1}`.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: DenseMatrix,
    pub rhs: Vec<f64>,
    /// Interior row index -> grid node index (row `i` describes node
    /// `node_map[i]`).
    pub node_map: Vec<usize>,
}

/// Solved profile over all grid nodes, boundary values included.
#[derive(Debug, Clone)]
pub struct SolutionProfile {
    pub problem: ProblemSpec,
    pub grid: Grid,
    pub scheme: Scheme,
    pub one_sided: bool,
    /// Values at `x_0 .. x_N`; the two boundary entries carry the exterior
    /// data (0/0 for exit time, 0/1 for escape to the right).
    pub values: Vec<f64>,
    pub stats: SolverStats,
}

impl SolutionProfile {
    /// Value at the grid node equal to `x`, if there is one.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        self.grid.node_index_of(x).map(|j| self.values[j])
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Exterior data carried by the two boundary nodes for each problem kind.
fn boundary_values(kind: ProblemKind) -> (f64, f64) {
    match kind {
        ProblemKind::ExitTime => (0.0, 0.0),
        ProblemKind::EscapeRight => (0.0, 1.0),
        // Reduced to EscapeRight by reflection before assembly.
        ProblemKind::EscapeLeft => (0.0, 1.0),
    }
}

/// Per-assembly constants shared by every row.
struct Stencil<'a> {
    problem: &'a ProblemSpec,
    grid: &'a Grid,
    scheme: Scheme,
    one_sided: bool,
    /// `eps C_alpha / alpha`, the absorption prefactor.
    absorb_pref: f64,
    /// Diffusion coefficient of the second difference, divided by `h^2`.
    c_h_over_h2: f64,
    /// `kernel[k] = eps C_alpha h / (k h)^(1+alpha)` for `k >= 1`.
    kernel: Vec<f64>,
}

impl<'a> Stencil<'a> {
    fn new(
        problem: &'a ProblemSpec,
        grid: &'a Grid,
        scheme: Scheme,
        one_sided: bool,
    ) -> Result<Stencil<'a>> {
        problem.validate()?;
        if grid.a() != problem.domain.0 || grid.b() != problem.domain.1 {
            return Err(Error::DomainMismatch {
                grid_a: grid.a(),
                grid_b: grid.b(),
                a: problem.domain.0,
                b: problem.domain.1,
            });
        }
        let alpha = problem.alpha;
        let eps = problem.eps;
        let h = grid.h();
        let ca = c_alpha(alpha)?;
        let c_h = match scheme {
            Scheme::PunchedHole => problem.d / 2.0,
            Scheme::Corrected | Scheme::PrincipalValue => {
                problem.d / 2.0 - eps * ca * riemann_zeta(alpha - 1.0)? * h.powf(2.0 - alpha)
            }
        };
        let n = grid.n_cells();
        let kernel = (0..n)
            .map(|k| {
                if k == 0 {
                    0.0
                } else {
                    eps * ca * h / (k as f64 * h).powf(1.0 + alpha)
                }
            })
            .collect();
        Ok(Stencil {
            problem,
            grid,
            scheme,
            one_sided,
            absorb_pref: eps * ca / alpha,
            c_h_over_h2: c_h / (h * h),
            kernel,
        })
    }

    /// Local absorption coefficient at interior node `i`.
    fn absorption(&self, i: usize) -> f64 {
        let alpha = self.problem.alpha;
        self.absorb_pref
            * (self.grid.dist_left(i).powf(-alpha) + self.grid.dist_right(i).powf(-alpha))
    }

    /// Accumulate the full-width coefficients of row `i` into `row`
    /// (length `N + 1`, one slot per grid node).
    fn fill_row(&self, i: usize, row: &mut [f64]) {
        let n = self.grid.n_cells();
        let h = self.grid.h();
        row.fill(0.0);

        row[i - 1] += self.c_h_over_h2;
        row[i] -= 2.0 * self.c_h_over_h2;
        row[i + 1] += self.c_h_over_h2;

        let fx = self.problem.drift.eval(self.grid.node(i));
        if self.one_sided && i == 1 {
            // Forward stencil: u' ~ (-3 U_1 + 4 U_2 - U_3) / (2h).
            row[1] -= 1.5 * fx / h;
            row[2] += 2.0 * fx / h;
            row[3] -= 0.5 * fx / h;
        } else if self.one_sided && i == n - 1 {
            // Backward stencil: u' ~ (3 U_{N-1} - 4 U_{N-2} + U_{N-3}) / (2h).
            row[n - 1] += 1.5 * fx / h;
            row[n - 2] -= 2.0 * fx / h;
            row[n - 3] += 0.5 * fx / h;
        } else {
            row[i + 1] += fx / (2.0 * h);
            row[i - 1] -= fx / (2.0 * h);
        }

        row[i] -= self.absorption(i);

        if self.problem.eps > 0.0 {
            match self.scheme {
                Scheme::PrincipalValue => self.principal_value_sum(i, row),
                Scheme::PunchedHole | Scheme::Corrected => self.two_branch_sum(i, row),
            }
        }
    }

    /// Single modified-trapezoid sum over the full in-domain window.
    fn principal_value_sum(&self, i: usize, row: &mut [f64]) {
        let m_left = i as isize;
        let m_right = (self.grid.n_cells() - i) as isize;
        for k in -m_left..=m_right {
            if k == 0 {
                continue;
            }
            let w = if k == -m_left || k == m_right { 0.5 } else { 1.0 };
            let c = w * self.kernel[k.unsigned_abs()];
            row[(i as isize + k) as usize] += c;
            row[i] -= c;
        }
    }

    /// Two-branch form: desingularized symmetric window plus the leftover
    /// one-sided piece, each with its own halved end indices.
    fn two_branch_sum(&self, i: usize, row: &mut [f64]) {
        let m_left = i as isize;
        let m_right = (self.grid.n_cells() - i) as isize;
        let dm = m_left.min(m_right);
        for k in -dm..=dm {
            if k == 0 {
                continue;
            }
            let w = if k.abs() == dm { 0.5 } else { 1.0 };
            let c = w * self.kernel[k.unsigned_abs()];
            row[(i as isize + k) as usize] += c;
            row[i] -= c;
            // Desingularizing term -(U_{i+1} - U_{i-1}) k / 2; its discrete
            // symmetric sum cancels pairwise, which is why the
            // principal-value form can drop it.
            let half_k = 0.5 * k as f64;
            row[i + 1] -= c * half_k;
            row[i - 1] += c * half_k;
        }
        let (lo, hi) = if m_left > dm {
            (-m_left, -dm)
        } else if m_right > dm {
            (dm, m_right)
        } else {
            return; // centered node: no leftover window
        };
        for k in lo..=hi {
            let w = if k == lo || k == hi { 0.5 } else { 1.0 };
            let c = w * self.kernel[k.unsigned_abs()];
            row[(i as isize + k) as usize] += c;
            row[i] -= c;
        }
    }

    /// Apply row `i` to a full node-value vector without storing it,
    /// using value differences directly so that constants annihilate the
    /// nonlocal and derivative parts exactly.
    fn apply_row(&self, i: usize, values: &[f64]) -> f64 {
        let n = self.grid.n_cells();
        let h = self.grid.h();
        let mut acc =
            self.c_h_over_h2 * (values[i - 1] - 2.0 * values[i] + values[i + 1]);

        let fx = self.problem.drift.eval(self.grid.node(i));
        let central_diff = values[i + 1] - values[i - 1];
        if self.one_sided && i == 1 {
            acc += fx * (-3.0 * values[1] + 4.0 * values[2] - values[3]) / (2.0 * h);
        } else if self.one_sided && i == n - 1 {
            acc += fx * (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h);
        } else {
            acc += fx * central_diff / (2.0 * h);
        }

        acc -= self.absorption(i) * values[i];

        if self.problem.eps > 0.0 {
            let m_left = i as isize;
            let m_right = (self.grid.n_cells() - i) as isize;
            match self.scheme {
                Scheme::PrincipalValue => {
                    for k in -m_left..=m_right {
                        if k == 0 {
                            continue;
                        }
                        let w = if k == -m_left || k == m_right { 0.5 } else { 1.0 };
                        acc += w
                            * self.kernel[k.unsigned_abs()]
                            * (values[(i as isize + k) as usize] - values[i]);
                    }
                }
                Scheme::PunchedHole | Scheme::Corrected => {
                    let dm = m_left.min(m_right);
                    for k in -dm..=dm {
                        if k == 0 {
                            continue;
                        }
                        let w = if k.abs() == dm { 0.5 } else { 1.0 };
                        acc += w
                            * self.kernel[k.unsigned_abs()]
                            * (values[(i as isize + k) as usize]
                                - values[i]
                                - central_diff * 0.5 * k as f64);
                    }
                    let bounds = if m_left > dm {
                        Some((-m_left, -dm))
                    } else if m_right > dm {
                        Some((dm, m_right))
                    } else {
                        None
                    };
                    if let Some((lo, hi)) = bounds {
                        for k in lo..=hi {
                            let w = if k == lo || k == hi { 0.5 } else { 1.0 };
                            acc += w
                                * self.kernel[k.unsigned_abs()]
                                * (values[(i as isize + k) as usize] - values[i]);
                        }
                    }
                }
            }
        }
        acc
    }
}

fn assemble(stencil: &Stencil<'_>, rhs_kind: ProblemKind) -> LinearSystem {
    let n = stencil.grid.n_cells();
    let (u_a, u_b) = boundary_values(rhs_kind);
    let mut matrix = DenseMatrix::zeros(n - 1);
    let mut rhs = vec![0.0; n - 1];
    let alpha = stencil.problem.alpha;
    let absorb_pref = stencil.absorb_pref;
    let grid = stencil.grid;

    // Row-parallel fill; every row only reads shared immutable state, so the
    // result is bit-identical for any thread count.
    matrix
        .rows_mut()
        .collect::<Vec<_>>()
        .into_par_iter()
        .zip(rhs.par_iter_mut())
        .enumerate()
        .for_each(|(idx, (mrow, rhs_i))| {
            let i = idx + 1;
            let mut full = vec![0.0; n + 1];
            stencil.fill_row(i, &mut full);
            mrow.copy_from_slice(&full[1..n]);
            let base = match rhs_kind {
                ProblemKind::ExitTime => -1.0,
                _ => -absorb_pref * grid.dist_right(i).powf(-alpha),
            };
            // Fold the known boundary-node values into the right-hand side.
            *rhs_i = base - full[0] * u_a - full[n] * u_b;
        });

    LinearSystem {
        matrix,
        rhs,
        node_map: (1..n).collect(),
    }
}

/// Assemble the exit-time system `A U = -1` with zero exterior data.
pub fn assemble_exit_time(
    problem: &ProblemSpec,
    grid: &Grid,
    scheme: Scheme,
    one_sided_drift: bool,
) -> Result<LinearSystem> {
    if problem.kind != ProblemKind::ExitTime {
        return Err(Error::KindMismatch {
            expected: "exit-time",
            got: problem.kind.name(),
        });
    }
    let stencil = Stencil::new(problem, grid, scheme, one_sided_drift)?;
    Ok(assemble(&stencil, ProblemKind::ExitTime))
}

/// Assemble the escape-probability system for the target `[b, inf)`:
/// same operator, right-hand side `-(eps C_a / a)(b - x_j)^-a`, and the
/// known value `U_N = 1` moved to the right-hand side.
pub fn assemble_escape(
    problem: &ProblemSpec,
    grid: &Grid,
    scheme: Scheme,
    one_sided_drift: bool,
) -> Result<LinearSystem> {
    if problem.kind != ProblemKind::EscapeRight {
        return Err(Error::KindMismatch {
            expected: "escape-right",
            got: problem.kind.name(),
        });
    }
    let stencil = Stencil::new(problem, grid, scheme, one_sided_drift)?;
    Ok(assemble(&stencil, ProblemKind::EscapeRight))
}

/// Apply the discrete generator to a full vector of node values (exterior
/// condition already embedded in the two boundary entries) and return the
/// result at the interior nodes, without forming the matrix.
pub fn operator_apply(
    problem: &ProblemSpec,
    grid: &Grid,
    values: &[f64],
    scheme: Scheme,
) -> Result<Vec<f64>> {
    if values.len() != grid.n_cells() + 1 {
        return Err(Error::LengthMismatch {
            expected: grid.n_cells() + 1,
            got: values.len(),
        });
    }
    let stencil = Stencil::new(problem, grid, scheme, false)?;
    Ok((1..grid.n_cells())
        .map(|i| stencil.apply_row(i, values))
        .collect())
}

/// Attach the exterior boundary values for `kind` to an interior solution.
pub fn attach_boundary(kind: ProblemKind, interior: &[f64]) -> Vec<f64> {
    let (u_a, u_b) = boundary_values(kind);
    let mut values = Vec::with_capacity(interior.len() + 2);
    values.push(u_a);
    values.extend_from_slice(interior);
    values.push(u_b);
    values
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::DriftSpec;

    fn pure_jump(alpha: f64) -> ProblemSpec {
        ProblemSpec {
            alpha,
            eps: 1.0,
            d: 0.0,
            drift: DriftSpec::Zero,
            domain: (-1.0, 1.0),
            kind: ProblemKind::ExitTime,
        }
    }

    #[test]
    fn operator_on_constant_reduces_to_absorption() {
        for &scheme in &[Scheme::PunchedHole, Scheme::Corrected, Scheme::PrincipalValue] {
            for &alpha in &[0.5, 1.0, 1.5] {
                let p = pure_jump(alpha);
                let grid = Grid::build(p.domain, 16).unwrap();
                let ones = vec![1.0; 17];
                let out = operator_apply(&p, &grid, &ones, scheme).unwrap();
                let stencil = Stencil::new(&p, &grid, scheme, false).unwrap();
                for (idx, &v) in out.iter().enumerate() {
                    let want = -stencil.absorption(idx + 1);
                    assert_eq!(v, want, "scheme {scheme:?} alpha {alpha} row {idx}");
                }
            }
        }
    }

    #[test]
    fn operator_on_zero_is_zero() {
        let p = pure_jump(1.0);
        let grid = Grid::build(p.domain, 16).unwrap();
        let out = operator_apply(&p, &grid, &vec![0.0; 17], Scheme::PrincipalValue).unwrap();
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn operator_is_linear() {
        let p = ProblemSpec {
            alpha: 1.3,
            eps: 0.7,
            d: 0.4,
            drift: DriftSpec::Linear(-1.0),
            domain: (-1.0, 1.0),
            kind: ProblemKind::ExitTime,
        };
        let grid = Grid::build(p.domain, 40).unwrap();
        let u: Vec<f64> = grid.nodes().iter().map(|x| (1.0 - x * x).max(0.0)).collect();
        let v: Vec<f64> = grid.nodes().iter().map(|x| (2.0 * x).sin()).collect();
        let sum: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        let au = operator_apply(&p, &grid, &u, Scheme::Corrected).unwrap();
        let av = operator_apply(&p, &grid, &v, Scheme::Corrected).unwrap();
        let asum = operator_apply(&p, &grid, &sum, Scheme::Corrected).unwrap();
        let scale: f64 = au.iter().fold(1.0, |m, x| m.max(x.abs()));
        for i in 0..au.len() {
            assert!((asum[i] - au[i] - av[i]).abs() < 1e-11 * scale);
        }
    }

    /// Closed form of the generator applied to u(x) = 1 - x^2 on (-1, 1)
    /// for the pure-jump unit-intensity case, alpha = 1 branch.
    fn lhs_alpha_one(x: f64) -> f64 {
        let c1 = std::f64::consts::FRAC_1_PI;
        -c1 * (4.0 + 2.0 * x * ((1.0 - x) / (1.0 + x)).ln())
    }

    #[test]
    fn operator_matches_closed_form_at_probe() {
        // J = 320 on (-1, 1) => 640 cells; probe x = -0.5.
        let p = pure_jump(1.0);
        let grid = Grid::build(p.domain, 640).unwrap();
        let u: Vec<f64> = grid.nodes().iter().map(|x| 1.0 - x * x).collect();
        let out = operator_apply(&p, &grid, &u, Scheme::PrincipalValue).unwrap();
        let i = grid.node_index_of(-0.5).unwrap();
        let got = out[i - 1];
        assert!(
            (got - lhs_alpha_one(-0.5)).abs() < 5e-6,
            "got {got}, want {}",
            lhs_alpha_one(-0.5)
        );
    }

    #[test]
    fn one_sided_flag_touches_only_edge_rows() {
        let p = ProblemSpec {
            alpha: 0.5,
            eps: 1.0,
            d: 0.0,
            drift: DriftSpec::Linear(-1.0),
            domain: (-1.0, 1.0),
            kind: ProblemKind::ExitTime,
        };
        let grid = Grid::build(p.domain, 20).unwrap();
        let central = assemble_exit_time(&p, &grid, Scheme::PrincipalValue, false).unwrap();
        let one_sided = assemble_exit_time(&p, &grid, Scheme::PrincipalValue, true).unwrap();
        let n = grid.n_cells();
        for i in 0..n - 1 {
            let same = central.matrix.row(i) == one_sided.matrix.row(i);
            if i == 0 || i == n - 2 {
                assert!(!same, "edge row {i} should use the biased stencil");
            } else {
                assert!(same, "interior row {i} must be untouched");
            }
        }
    }

    #[test]
    fn matrix_is_dense_and_finite() {
        let p = pure_jump(1.5);
        let grid = Grid::build(p.domain, 16).unwrap();
        let sys = assemble_exit_time(&p, &grid, Scheme::PrincipalValue, false).unwrap();
        assert!(sys.matrix.is_finite());
        assert!(sys.rhs.iter().all(|v| v.is_finite()));
        for i in 0..sys.matrix.n() {
            for j in 0..sys.matrix.n() {
                assert!(
                    sys.matrix.get(i, j) != 0.0,
                    "nonlocal coupling missing at ({i}, {j})"
                );
            }
        }
        assert_eq!(sys.node_map, (1..16).collect::<Vec<_>>());
    }

    #[test]
    fn rejects_mismatched_grid_and_kind() {
        let p = pure_jump(1.0);
        let wrong_grid = Grid::build((-2.0, 2.0), 16).unwrap();
        assert!(matches!(
            assemble_exit_time(&p, &wrong_grid, Scheme::Corrected, false),
            Err(Error::DomainMismatch { .. })
        ));
        let grid = Grid::build(p.domain, 16).unwrap();
        assert!(matches!(
            assemble_escape(&p, &grid, Scheme::Corrected, false),
            Err(Error::KindMismatch { .. })
        ));
        let bad = operator_apply(&p, &grid, &vec![0.0; 5], Scheme::Corrected);
        assert!(matches!(bad, Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn escape_rhs_carries_target_mass() {
        let mut p = pure_jump(1.0);
        p.kind = ProblemKind::EscapeRight;
        let grid = Grid::build(p.domain, 16).unwrap();
        let sys = assemble_escape(&p, &grid, Scheme::PrincipalValue, false).unwrap();
        // Every right-hand side entry must be strictly negative: the target
        // absorption plus the folded U_N = 1 couplings all push the same way.
        assert!(sys.rhs.iter().all(|&r| r < 0.0));
    }
}
