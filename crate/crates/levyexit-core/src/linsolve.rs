//! Direct and iterative solvers for the assembled dense systems: LU with
//! partial pivoting, and restarted GMRES with modified Gram-Schmidt plus one
//! reorthogonalization pass.

use crate::assembly::LinearSystem;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Lu,
    Gmres,
}

impl SolveMethod {
    pub fn name(&self) -> &'static str {
        match self {
            SolveMethod::Lu => "lu",
            SolveMethod::Gmres => "gmres",
        }
    }
}

/// Solver configuration.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub method: SolveMethod,
    /// Krylov subspace dimension between restarts.
    pub gmres_restart: usize,
    /// Relative-residual stopping tolerance.
    pub rel_tol: f64,
    /// Cap on total GMRES iterations; 0 means `10 n`.
    pub max_iter: usize,
    /// Right-side Jacobi (diagonal) preconditioning. Off by default; the
    /// absorption term already keeps diagonals dominant at moderate alpha.
    pub jacobi: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            method: SolveMethod::Lu,
            gmres_restart: 30,
            rel_tol: 1e-10,
            max_iter: 0,
            jacobi: false,
        }
    }
}

/// What the solve did, attached to every solution profile.
#[derive(Debug, Clone)]
pub struct SolverStats {
    pub method: &'static str,
    pub iterations: usize,
    /// Scaled infinity-norm residual of the returned solution.
    pub residual: f64,
}

/// Result of a GMRES solve.
#[derive(Debug, Clone)]
pub struct GmresSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Achieved true relative residual ||b - Ax||_2 / ||b||_2.
    pub residual: f64,
    /// Relative-residual estimate after each inner iteration; within one
    /// restart cycle this sequence is non-increasing.
    pub history: Vec<f64>,
}

/// Scaled residual `||Mx - r||_inf / (||M||_inf ||x||_inf + ||r||_inf)`.
pub fn relative_residual_inf(system: &LinearSystem, x: &[f64]) -> f64 {
    let n = system.matrix.n();
    let mut ax = vec![0.0; n];
    system.matrix.matvec(x, &mut ax);
    let num = ax
        .iter()
        .zip(&system.rhs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let xn = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let rn = system.rhs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    num / (system.matrix.norm_inf() * xn + rn)
}

/// Solve by LU factorization with partial pivoting.
pub fn lu_solve(system: &LinearSystem) -> Result<Vec<f64>> {
    let n = system.matrix.n();
    if system.rhs.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: system.rhs.len(),
        });
    }
    let mut lu = system.matrix.clone();
    let mut x = system.rhs.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    for col in 0..n {
        // Partial pivoting: largest magnitude in the column at or below the
        // diagonal.
        let mut pivot_row = col;
        let mut pivot_mag = lu.get(col, col).abs();
        for r in col + 1..n {
            let mag = lu.get(r, col).abs();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag == 0.0 {
            return Err(Error::SingularMatrix(col));
        }
        if pivot_row != col {
            perm.swap(col, pivot_row);
            for j in 0..n {
                let tmp = lu.get(col, j);
                lu.set(col, j, lu.get(pivot_row, j));
                lu.set(pivot_row, j, tmp);
            }
            x.swap(col, pivot_row);
        }
        let inv_pivot = 1.0 / lu.get(col, col);
        for r in col + 1..n {
            let factor = lu.get(r, col) * inv_pivot;
            if factor != 0.0 {
                lu.set(r, col, factor);
                for j in col + 1..n {
                    let v = lu.get(r, j) - factor * lu.get(col, j);
                    lu.set(r, j, v);
                }
                x[r] -= factor * x[col];
            }
        }
    }

    // Back substitution.
    for i in (0..n).rev() {
        let mut sum = x[i];
        for j in i + 1..n {
            sum -= lu.get(i, j) * x[j];
        }
        x[i] = sum / lu.get(i, i);
    }
    Ok(x)
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Restarted GMRES(m) from a zero initial guess.
///
/// Terminates when the relative residual drops below `opts.rel_tol` or the
/// iteration cap is reached; the achieved residual is recomputed from the
/// returned iterate, never trusted from the recurrence.
pub fn gmres_solve(system: &LinearSystem, opts: &SolveOptions) -> Result<GmresSolution> {
    if !(opts.rel_tol > 0.0 && opts.rel_tol <= 1e-2) {
        return Err(Error::InvalidOptions(format!(
            "rel_tol must lie in (0, 1e-2], got {}",
            opts.rel_tol
        )));
    }
    if opts.gmres_restart < 5 {
        return Err(Error::InvalidOptions(format!(
            "gmres_restart must be >= 5, got {}",
            opts.gmres_restart
        )));
    }
    let a = &system.matrix;
    let b = &system.rhs;
    let n = a.n();
    if b.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: b.len(),
        });
    }
    let max_iter = if opts.max_iter == 0 {
        10 * n
    } else {
        opts.max_iter
    };

    // Right Jacobi preconditioning: solve A D^-1 y = b, then x = D^-1 y.
    let scale: Vec<f64> = if opts.jacobi {
        (0..n)
            .map(|i| {
                let d = a.get(i, i);
                if d != 0.0 {
                    1.0 / d
                } else {
                    1.0
                }
            })
            .collect()
    } else {
        vec![1.0; n]
    };
    let apply = |v: &[f64], out: &mut [f64], tmp: &mut [f64]| {
        for i in 0..n {
            tmp[i] = v[i] * scale[i];
        }
        a.matvec(tmp, out);
    };

    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return Ok(GmresSolution {
            x: vec![0.0; n],
            iterations: 0,
            residual: 0.0,
            history: Vec::new(),
        });
    }

    let m = opts.gmres_restart.min(n);
    let mut y_full = vec![0.0; n]; // preconditioned unknown
    let mut total_iter = 0;
    let mut history = Vec::new();
    let mut tmp = vec![0.0; n];

    loop {
        // r = b - A D^-1 y
        let mut r = vec![0.0; n];
        apply(&y_full, &mut r, &mut tmp);
        for i in 0..n {
            r[i] = b[i] - r[i];
        }
        let r_norm = norm2(&r);
        if r_norm / b_norm < opts.rel_tol || total_iter >= max_iter {
            let x: Vec<f64> = y_full.iter().zip(&scale).map(|(y, s)| y * s).collect();
            let mut ax = vec![0.0; n];
            a.matvec(&x, &mut ax);
            let true_res = norm2(
                &ax.iter()
                    .zip(b)
                    .map(|(p, q)| q - p)
                    .collect::<Vec<f64>>(),
            ) / b_norm;
            if true_res < opts.rel_tol {
                return Ok(GmresSolution {
                    x,
                    iterations: total_iter,
                    residual: true_res,
                    history,
                });
            }
            return Err(Error::NoConvergence {
                iterations: total_iter,
                residual: true_res,
                best: x,
            });
        }

        // Arnoldi with modified Gram-Schmidt + one reorthogonalization pass.
        let mut v: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        let mut h = vec![vec![0.0; m]; m + 1]; // h[row][col]
        let mut cs = vec![0.0; m];
        let mut sn = vec![0.0; m];
        let mut g = vec![0.0; m + 1];
        g[0] = r_norm;
        v.push(r.iter().map(|x| x / r_norm).collect());

        let mut k_used = 0;
        for k in 0..m {
            total_iter += 1;
            let mut w = vec![0.0; n];
            apply(&v[k], &mut w, &mut tmp);
            for j in 0..=k {
                let hjk = dot(&v[j], &w);
                h[j][k] = hjk;
                for i in 0..n {
                    w[i] -= hjk * v[j][i];
                }
            }
            for j in 0..=k {
                let correction = dot(&v[j], &w);
                h[j][k] += correction;
                for i in 0..n {
                    w[i] -= correction * v[j][i];
                }
            }
            let w_norm = norm2(&w);
            h[k + 1][k] = w_norm;

            // Apply stored Givens rotations, then a new one for this column.
            for j in 0..k {
                let t = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
                h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
                h[j][k] = t;
            }
            let denom = (h[k][k] * h[k][k] + w_norm * w_norm).sqrt();
            if denom == 0.0 {
                k_used = k + 1;
                break;
            }
            cs[k] = h[k][k] / denom;
            sn[k] = w_norm / denom;
            h[k][k] = denom;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];

            let rel_est = g[k + 1].abs() / b_norm;
            history.push(rel_est);
            k_used = k + 1;

            if w_norm == 0.0 || rel_est < opts.rel_tol || total_iter >= max_iter {
                break;
            }
            v.push(w.iter().map(|x| x / w_norm).collect());
        }

        // Solve the small triangular system and update the iterate.
        let mut coeff = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let mut sum = g[i];
            for j in i + 1..k_used {
                sum -= h[i][j] * coeff[j];
            }
            coeff[i] = sum / h[i][i];
        }
        for (j, &cj) in coeff.iter().enumerate() {
            for i in 0..n {
                y_full[i] += cj * v[j][i];
            }
        }
    }
}

/// Dispatch on the configured method; returns the solution together with
/// uniform stats (scaled infinity-norm residual for both methods).
pub fn solve_with(system: &LinearSystem, opts: &SolveOptions) -> Result<(Vec<f64>, SolverStats)> {
    match opts.method {
        SolveMethod::Lu => {
            let x = lu_solve(system)?;
            let residual = relative_residual_inf(system, &x);
            Ok((
                x,
                SolverStats {
                    method: "lu",
                    iterations: 0,
                    residual,
                },
            ))
        }
        SolveMethod::Gmres => {
            let sol = gmres_solve(system, opts)?;
            let residual = relative_residual_inf(system, &sol.x);
            Ok((
                sol.x,
                SolverStats {
                    method: "gmres",
                    iterations: sol.iterations,
                    residual,
                },
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::DenseMatrix;

    fn system_from(rows: &[&[f64]], rhs: &[f64]) -> LinearSystem {
        let n = rows.len();
        let mut m = DenseMatrix::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        LinearSystem {
            matrix: m,
            rhs: rhs.to_vec(),
            node_map: (1..=n).collect(),
        }
    }

    #[test]
    fn lu_identity_returns_rhs() {
        let sys = system_from(&[&[1.0, 0.0], &[0.0, 1.0]], &[3.5, -2.0]);
        assert_eq!(lu_solve(&sys).unwrap(), vec![3.5, -2.0]);
    }

    #[test]
    fn lu_two_by_two_hand_elimination() {
        // Eliminating by hand: x2 = (2*5 - 3) / (2*3 - 1) = 1.4,
        // x1 = (3 - 1.4) / 2 = 0.8.
        let sys = system_from(&[&[2.0, 1.0], &[1.0, 3.0]], &[3.0, 5.0]);
        let x = lu_solve(&sys).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15);
        assert!((x[1] - 1.4).abs() < 1e-15);
    }

    #[test]
    fn lu_detects_singularity() {
        let sys = system_from(&[&[1.0, 1.0], &[1.0, 1.0]], &[1.0, 2.0]);
        assert!(matches!(lu_solve(&sys), Err(Error::SingularMatrix(_))));
    }

    #[test]
    fn lu_pivots_on_zero_diagonal() {
        let sys = system_from(&[&[0.0, 1.0], &[1.0, 0.0]], &[2.0, 7.0]);
        let x = lu_solve(&sys).unwrap();
        assert_eq!(x, vec![7.0, 2.0]);
    }

    #[test]
    fn lu_residual_is_small_on_random_system() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        let n = 60;
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, rng.gen_range(-1.0..1.0));
            }
            // Keep it comfortably nonsingular.
            m.set(i, i, m.get(i, i) + n as f64);
        }
        let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sys = LinearSystem {
            matrix: m,
            rhs,
            node_map: (0..n).collect(),
        };
        let x = lu_solve(&sys).unwrap();
        assert!(relative_residual_inf(&sys, &x) < 1e-10);
    }

    #[test]
    fn gmres_identity_converges_in_one_iteration() {
        let sys = system_from(&[&[1.0, 0.0], &[0.0, 1.0]], &[1.0, 2.0]);
        let opts = SolveOptions {
            method: SolveMethod::Gmres,
            ..Default::default()
        };
        let sol = gmres_solve(&sys, &opts).unwrap();
        assert_eq!(sol.iterations, 1);
        assert!((sol.x[0] - 1.0).abs() < 1e-12);
        assert!((sol.x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gmres_residual_monotone_within_cycle() {
        let n = 12;
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, (i + 1) as f64);
        }
        let sys = LinearSystem {
            matrix: m,
            rhs: vec![1.0; n],
            node_map: (0..n).collect(),
        };
        let opts = SolveOptions {
            method: SolveMethod::Gmres,
            gmres_restart: 5,
            rel_tol: 1e-12,
            ..Default::default()
        };
        let sol = gmres_solve(&sys, &opts).unwrap();
        for cycle in sol.history.chunks(5) {
            for pair in cycle.windows(2) {
                assert!(
                    pair[1] <= pair[0] * (1.0 + 1e-12),
                    "residual grew within a cycle: {pair:?}"
                );
            }
        }
    }

    #[test]
    fn gmres_matches_lu_on_random_system() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        let n = 40;
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, rng.gen_range(-1.0..1.0));
            }
            m.set(i, i, m.get(i, i) + 8.0);
        }
        let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sys = LinearSystem {
            matrix: m,
            rhs,
            node_map: (0..n).collect(),
        };
        let x_lu = lu_solve(&sys).unwrap();
        let opts = SolveOptions {
            method: SolveMethod::Gmres,
            rel_tol: 1e-12,
            ..Default::default()
        };
        let sol = gmres_solve(&sys, &opts).unwrap();
        let scale = 1.0 + x_lu.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        for i in 0..n {
            assert!((x_lu[i] - sol.x[i]).abs() < 1e-8 * scale);
        }
    }

    #[test]
    fn gmres_rejects_bad_options() {
        let sys = system_from(&[&[1.0]], &[1.0]);
        let mut opts = SolveOptions {
            method: SolveMethod::Gmres,
            ..Default::default()
        };
        opts.rel_tol = 0.5;
        assert!(matches!(
            gmres_solve(&sys, &opts),
            Err(Error::InvalidOptions(_))
        ));
        opts.rel_tol = 1e-10;
        opts.gmres_restart = 2;
        assert!(matches!(
            gmres_solve(&sys, &opts),
            Err(Error::InvalidOptions(_))
        ));
    }

    #[test]
    fn gmres_reports_nonconvergence_honestly() {
        let n = 30;
        let mut m = DenseMatrix::zeros(n);
        // Badly scaled diagonal starves a 5-dim Krylov space at 3 iterations.
        for i in 0..n {
            m.set(i, i, 10.0_f64.powi(-(i as i32 % 7)));
            if i + 1 < n {
                m.set(i, i + 1, 0.9);
            }
        }
        let sys = LinearSystem {
            matrix: m,
            rhs: vec![1.0; n],
            node_map: (0..n).collect(),
        };
        let opts = SolveOptions {
            method: SolveMethod::Gmres,
            gmres_restart: 5,
            rel_tol: 1e-12,
            max_iter: 3,
            ..Default::default()
        };
        match gmres_solve(&sys, &opts) {
            Err(Error::NoConvergence {
                iterations,
                residual,
                best,
            }) => {
                assert_eq!(iterations, 3);
                assert!(residual > 1e-12);
                assert_eq!(best.len(), n);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn solves_are_deterministic() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        let n = 25;
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, rng.gen_range(-1.0..1.0));
            }
            m.set(i, i, 6.0);
        }
        let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sys = LinearSystem {
            matrix: m,
            rhs,
            node_map: (0..n).collect(),
        };
        assert_eq!(lu_solve(&sys).unwrap(), lu_solve(&sys).unwrap());
        let opts = SolveOptions {
            method: SolveMethod::Gmres,
            rel_tol: 1e-11,
            ..Default::default()
        };
        assert_eq!(
            gmres_solve(&sys, &opts).unwrap().x,
            gmres_solve(&sys, &opts).unwrap().x
        );
    }
}
