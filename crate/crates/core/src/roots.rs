//! Derivative-free scalar root finding and minimization.

use crate::error::ensure;
use crate::Result;

const MAX_ITER: usize = 200;
const RTOL: f64 = 1e-12;

/// Root of `f` in `[lo, hi]` by bisection; `f(lo)` and `f(hi)` must differ
/// in sign. Stops once the bracket is narrower than `1e-12` of its midpoint.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    ensure!(
        flo.signum() != fhi.signum() && !flo.is_nan() && !fhi.is_nan(),
        Bracket,
        "no sign change on [{lo}, {hi}]: f = {flo}, {fhi}"
    );
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= RTOL * mid.abs() {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// First sign change of `f` on a uniform grid over `(lo, hi)`, refined by
/// [`bisect`].
pub fn first_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, grid: usize) -> Result<f64> {
    let step = (hi - lo) / grid as f64;
    let mut x0 = lo;
    let mut f0 = f(lo);
    for i in 1..=grid {
        let x1 = if i == grid { hi } else { lo + step * i as f64 };
        let f1 = f(x1);
        if f1 == 0.0 || f0.signum() != f1.signum() {
            return bisect(&f, x0, x1);
        }
        x0 = x1;
        f0 = f1;
    }
    Err(crate::Error::Bracket(format!(
        "no sign change on a {grid}-point grid over ({lo}, {hi})"
    )))
}

/// Minimum `(x, f(x))` of a unimodal `f` on `[lo, hi]` by golden-section
/// search, to relative width `1e-12`.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..MAX_ITER {
        if hi - lo <= RTOL * (x1.abs() + x2.abs()) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Grid scan followed by a golden-section refinement around the best grid
/// point. Non-finite values of `f` are treated as excluded points.
pub fn grid_then_golden<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, grid: usize) -> Option<(f64, f64)> {
    let step = (hi - lo) / (grid + 1) as f64;
    let xs: Vec<f64> = (1..=grid).map(|i| lo + step * i as f64).collect();
    let (best, fbest) = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| (i, f(x)))
        .filter(|(_, y)| y.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    let a = if best == 0 { lo } else { xs[best - 1] };
    let b = if best + 1 == xs.len() { hi } else { xs[best + 1] };
    let guarded = |x: f64| {
        let y = f(x);
        if y.is_finite() {
            y
        } else {
            f64::INFINITY
        }
    };
    let (x, y) = golden_min(guarded, a, b);
    Some(if y <= fbest { (x, y) } else { (xs[best], fbest) })
}
