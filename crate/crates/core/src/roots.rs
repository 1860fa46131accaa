//! Derivative-free scalar root finding and maximisation.

use crate::error::{Error, Result};

const MAX_BISECTIONS: usize = 4000;

/// Bisection on a bracket `[lo, hi]` with `f(lo)` and `f(hi)` of opposite sign.
///
/// Runs until the bracket cannot be split any further in `f64`, so the result
/// is the floating-point neighbour of the root (or an exact zero of `f` if one
/// is hit on the way).
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<f64> {
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() {
        return Err(Error::Convergence {
            lo,
            hi,
            residual: flo.abs().min(fhi.abs()),
        });
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            let fh = f(hi);
            return Ok(if flo.abs() <= fh.abs() { lo } else { hi });
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if !fm.is_finite() {
            return Err(Error::Convergence { lo, hi, residual: fm });
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Err(Error::Convergence {
        lo,
        hi,
        residual: flo.abs(),
    })
}

/// Bisection in log space, for brackets spanning several decades of a positive variable.
pub fn bisect_log<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<f64> {
    if !(lo > 0.0 && hi > 0.0) {
        return Err(Error::Convergence {
            lo,
            hi,
            residual: f64::NAN,
        });
    }
    // A coarse pass in log space narrows the bracket; the linear pass finishes it.
    let g = |t: f64| f(t.exp());
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut fa = g(a);
    if fa == 0.0 {
        return Ok(lo);
    }
    for _ in 0..60 {
        let mid = 0.5 * (a + b);
        let fm = g(mid);
        if fm == 0.0 {
            return Ok(mid.exp());
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    bisect(f, a.exp().max(lo), b.exp().min(hi))
}

/// Golden-section search for the maximum of a unimodal function on `[lo, hi]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    // The endpoints are candidates too: the maximum may sit on the boundary.
    let mut best = (0.5 * (a + b), f(0.5 * (a + b)));
    for x in [lo, hi, c, d] {
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Brackets of sign changes of `f` on a grid of `n + 1` points spaced evenly in `[lo, hi]`.
pub fn sign_changes<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let n = n.max(1);
    let step = (hi - lo) / n as f64;
    let mut out = Vec::new();
    let mut x0 = lo;
    let mut f0 = f(x0);
    for i in 1..=n {
        let x1 = if i == n { hi } else { lo + step * i as f64 };
        let f1 = f(x1);
        if f0 == 0.0 || f0.signum() != f1.signum() && f1 != 0.0 {
            out.push((x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    out
}
