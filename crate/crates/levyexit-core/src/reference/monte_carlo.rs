//! Monte Carlo oracle: Euler-Maruyama paths of the jump-diffusion with
//! first-passage detection at step granularity.
//!
//! Exit is detected when a discrete step lands outside the open domain, so
//! the estimate carries a small positive bias of order dt (paths that leave
//! and return within one step are missed); the tolerances used against this
//! oracle absorb it.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::problem::ProblemSpec;

/// Hard per-path step cap; paths still inside the domain at the cap are
/// counted at the capped time and reported in `truncated_fraction`.
const MAX_STEPS_PER_PATH: usize = 2_000_000;

/// Monte Carlo estimate of the mean exit time.
#[derive(Debug, Clone, PartialEq)]
pub struct MCEstimate {
    pub mean: f64,
    /// `sample standard deviation / sqrt(n_paths)`.
    pub std_error: f64,
    pub n_paths: usize,
    pub dt: f64,
    pub seed: u64,
    /// Fraction of paths that hit the step cap before exiting.
    pub truncated_fraction: f64,
}

/// Uniform draw in the open interval (0, 1).
#[inline]
fn uniform_open<R: RngCore>(rng: &mut R) -> f64 {
    loop {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        if u > 0.0 {
            return u;
        }
    }
}

/// One standardized symmetric alpha-stable variate with characteristic
/// function `exp(-|lambda|^alpha)`, via the Chambers-Mallows-Stuck
/// transform. The `alpha = 2` limit returns a Gaussian with variance 2.
pub fn sample_alpha_stable<R: Rng>(alpha: f64, rng: &mut R) -> f64 {
    debug_assert!(alpha > 0.0 && alpha <= 2.0);
    if alpha == 2.0 {
        // Box-Muller; variance 2 matches exp(-lambda^2).
        let u1 = uniform_open(rng);
        let u2 = uniform_open(rng);
        let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
        return std::f64::consts::SQRT_2 * z;
    }
    let v = std::f64::consts::PI * (uniform_open(rng) - 0.5);
    if alpha == 1.0 {
        // Symmetric 1-stable is Cauchy.
        return v.tan();
    }
    let w = -uniform_open(rng).ln();
    let av = alpha * v;
    (av.sin() / v.cos().powf(1.0 / alpha))
        * (((v - av).cos() / w).powf((1.0 - alpha) / alpha))
}

/// Estimate the mean exit time from `problem.domain` started at `x0` by
/// simulating `X_{n+1} = X_n + f(X_n) dt + sqrt(d dt) Z + (eps dt)^(1/alpha) S`.
///
/// Per-path generators are derived deterministically from `(seed, path
/// index)`, so the estimate is reproducible bit-for-bit and independent of
/// scheduling.
pub fn mc_exit_time(
    problem: &ProblemSpec,
    x0: f64,
    dt: f64,
    n_paths: usize,
    seed: u64,
) -> Result<MCEstimate> {
    problem.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidOptions(format!("dt must be > 0, got {dt}")));
    }
    if n_paths == 0 {
        return Err(Error::InvalidOptions("n_paths must be >= 1".into()));
    }
    let (a, b) = problem.domain;
    if !(a..=b).contains(&x0) {
        return Err(Error::OutsideDomain { x: x0, lo: a, hi: b });
    }

    let alpha = problem.alpha;
    let gauss_scale = (problem.d * dt).sqrt();
    let jump_scale = if problem.eps > 0.0 {
        (problem.eps * dt).powf(1.0 / alpha)
    } else {
        0.0
    };
    let has_gauss = problem.d > 0.0;
    let has_jump = problem.eps > 0.0;
    let drift = &problem.drift;

    let times: Vec<(f64, bool)> = (0..n_paths)
        .into_par_iter()
        .map(|path| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(path as u64 + 1);
            let mut x = x0;
            let mut steps = 0usize;
            while x > a && x < b && steps < MAX_STEPS_PER_PATH {
                let mut dx = drift.eval(x) * dt;
                if has_gauss {
                    let u1 = uniform_open(&mut rng);
                    let u2 = uniform_open(&mut rng);
                    dx += gauss_scale
                        * (-2.0 * u1.ln()).sqrt()
                        * (std::f64::consts::TAU * u2).cos();
                }
                if has_jump {
                    dx += jump_scale * sample_alpha_stable(alpha, &mut rng);
                }
                x += dx;
                steps += 1;
            }
            (steps as f64 * dt, steps >= MAX_STEPS_PER_PATH)
        })
        .collect();

    let n = n_paths as f64;
    let mean = times.iter().map(|(t, _)| t).sum::<f64>() / n;
    let variance = if n_paths > 1 {
        times.iter().map(|(t, _)| (t - mean) * (t - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let truncated = times.iter().filter(|(_, trunc)| *trunc).count();
    let estimate = MCEstimate {
        mean,
        std_error: (variance / n).sqrt(),
        n_paths,
        dt,
        seed,
        truncated_fraction: truncated as f64 / n,
    };
    if estimate.truncated_fraction > 0.1 {
        return Err(Error::PathBudgetExhausted {
            fraction: estimate.truncated_fraction,
            estimate: Box::new(estimate),
        });
    }
    Ok(estimate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{DriftSpec, ProblemKind};

    fn sampler_rng() -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(42)
    }

    #[test]
    fn characteristic_function_at_unit_frequency() {
        // E cos(S) = exp(-1) for every alpha under this normalization.
        let want = (-1.0_f64).exp();
        for &alpha in &[0.5, 1.0, 1.5, 2.0] {
            let mut rng = sampler_rng();
            let n = 1_000_000;
            let mut sum = 0.0;
            for _ in 0..n {
                sum += sample_alpha_stable(alpha, &mut rng).cos();
            }
            let got = sum / n as f64;
            assert!(
                (got - want).abs() < 5e-3,
                "alpha {alpha}: chf {got}, want {want}"
            );
        }
    }

    #[test]
    fn gaussian_limit_has_variance_two() {
        let mut rng = sampler_rng();
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let s = sample_alpha_stable(2.0, &mut rng);
            sum += s;
            sumsq += s * s;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        assert!((var - 2.0).abs() < 0.02, "variance {var}");
    }

    #[test]
    fn samples_are_symmetric() {
        for &alpha in &[0.7, 1.0, 1.6] {
            let mut rng = sampler_rng();
            let n = 1_000_000;
            let mut sum = 0.0;
            for _ in 0..n {
                sum += sample_alpha_stable(alpha, &mut rng).sin();
            }
            assert!(
                (sum / n as f64).abs() < 5e-3,
                "asymmetry at alpha {alpha}"
            );
        }
    }

    fn pure_jump_problem() -> ProblemSpec {
        ProblemSpec {
            alpha: 1.0,
            eps: 1.0,
            d: 0.0,
            drift: DriftSpec::Zero,
            domain: (-1.0, 1.0),
            kind: ProblemKind::ExitTime,
        }
    }

    #[test]
    fn boundary_start_exits_immediately() {
        let est = mc_exit_time(&pure_jump_problem(), 1.0, 1e-3, 100, 7).unwrap();
        assert_eq!(est.mean, 0.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn fixed_seed_reproduces_bitwise() {
        let p = pure_jump_problem();
        let a = mc_exit_time(&p, 0.0, 1e-2, 2000, 123).unwrap();
        let b = mc_exit_time(&p, 0.0, 1e-2, 2000, 123).unwrap();
        assert_eq!(a, b);
        let c = mc_exit_time(&p, 0.0, 1e-2, 2000, 124).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn coarse_estimate_tracks_the_closed_form() {
        // Cheap version of the full cross-check: 2e4 paths, dt = 1e-3.
        let p = pure_jump_problem();
        let est = mc_exit_time(&p, 0.0, 1e-3, 20_000, 99).unwrap();
        assert!(
            (est.mean - 1.0).abs() < 3.0 * est.std_error + 0.05,
            "mean {} +- {}",
            est.mean,
            est.std_error
        );
        assert_eq!(est.truncated_fraction, 0.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let p = pure_jump_problem();
        assert!(matches!(
            mc_exit_time(&p, 3.0, 1e-3, 10, 1),
            Err(Error::OutsideDomain { .. })
        ));
        assert!(matches!(
            mc_exit_time(&p, 0.0, 0.0, 10, 1),
            Err(Error::InvalidOptions(_))
        ));
        assert!(matches!(
            mc_exit_time(&p, 0.0, 1e-3, 0, 1),
            Err(Error::InvalidOptions(_))
        ));
    }

    #[test]
    fn reports_path_budget_exhaustion() {
        // A huge domain with pure slow diffusion cannot exit within the cap.
        let p = ProblemSpec {
            alpha: 1.0,
            eps: 0.0,
            d: 1e-6,
            drift: DriftSpec::Zero,
            domain: (-1e9, 1e9),
            kind: ProblemKind::ExitTime,
        };
        match mc_exit_time(&p, 0.0, 1e-4, 4, 5) {
            Err(Error::PathBudgetExhausted { fraction, estimate }) => {
                assert_eq!(fraction, 1.0);
                assert_eq!(estimate.n_paths, 4);
            }
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }
}
