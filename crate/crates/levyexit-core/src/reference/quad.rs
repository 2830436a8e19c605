//! Adaptive Simpson quadrature, plus substitution wrappers that tame known
//! endpoint power singularities.

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson with Richardson refinement. `tol` is absolute.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Integrate `f` over `[lo, hi]` where `f(s) ~ (s - lo)^beta` as `s -> lo`
/// with `beta > -1`. The substitution `s = lo + (hi - lo) t^p`,
/// `p = 2 / (1 + beta)`, turns the integrand into one that vanishes
/// linearly at `t = 0`.
pub fn power_singular_lo<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, beta: f64, tol: f64) -> f64 {
    debug_assert!(beta > -1.0);
    let width = hi - lo;
    if width <= 0.0 {
        return 0.0;
    }
    let p = 2.0 / (1.0 + beta);
    adaptive_simpson(
        |t| {
            if t <= 0.0 {
                return 0.0;
            }
            let s = lo + width * t.powf(p);
            if s <= lo {
                return 0.0; // rounded onto the singular endpoint: limit is 0
            }
            f(s) * width * p * t.powf(p - 1.0)
        },
        0.0,
        1.0,
        tol,
    )
}

/// Mirror image of [`power_singular_lo`] for a singularity at `hi`.
pub fn power_singular_hi<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, beta: f64, tol: f64) -> f64 {
    debug_assert!(beta > -1.0);
    let width = hi - lo;
    if width <= 0.0 {
        return 0.0;
    }
    let p = 2.0 / (1.0 + beta);
    adaptive_simpson(
        |t| {
            if t <= 0.0 {
                return 0.0;
            }
            let s = hi - width * t.powf(p);
            if s >= hi {
                return 0.0;
            }
            f(s) * width * p * t.powf(p - 1.0)
        },
        0.0,
        1.0,
        tol,
    )
}
