//! Independent numerical check of the `γ` bound.
//!
//! Conditioning a site on a neighbour's spin `t` turns a free-boundary marginal
//! `p` into `p^t`. `γ` is the worst total-variation distance between `p^{s}`
//! and `p^{t}`, and the four functions `K₁…K₄` are that distance written in
//! the variables `p(s)`, `p(t)` and the mass `u` of the other class. This
//! module maximises them over the simplex on a grid and compares the maxima
//! with the closed-form bounds.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{PottsParams, TisgmSolution};
use crate::roots::golden_max;

/// Slack allowed above a bound before a grid point counts as a violation.
pub const GAMMA_TOL: f64 = 1e-9;

/// `K₁…K₄` at fixed `(θ, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KFunctions {
    pub theta: f64,
    pub z: f64,
}

impl KFunctions {
    pub fn new(theta: f64, z: f64) -> Self {
        Self { theta, z }
    }

    /// Both spins in the `z` block.
    pub fn k1(&self, p1: f64, p2: f64, u: f64) -> f64 {
        let (t, z) = (self.theta, self.z);
        t * z * p1 / ((t - 1.0) * z * p1 + (1.0 - z) * u + z)
            - z * p1 / ((t - 1.0) * z * p2 + (1.0 - z) * u + z)
    }

    /// First spin in the `z` block, second outside.
    pub fn k2(&self, p1: f64, p2: f64, u: f64) -> f64 {
        let (t, z) = (self.theta, self.z);
        t * z * p1 / ((t - 1.0) * z * p1 + (1.0 - z) * u + z)
            - z * p1 / ((t - 1.0) * p2 + (1.0 - z) * u + z)
    }

    /// First spin outside the `z` block, second inside.
    pub fn k3(&self, p1: f64, p2: f64, u: f64) -> f64 {
        let (t, z) = (self.theta, self.z);
        t * p1 / ((t - z) * p1 + (1.0 - z) * u + z)
            - p1 / ((t - 1.0) * z * p2 + (1.0 - z) * (u + p1) + z)
    }

    /// Both spins outside the `z` block.
    pub fn k4(&self, p1: f64, p2: f64, u: f64) -> f64 {
        let (t, z) = (self.theta, self.z);
        t * p1 / ((t - z) * p1 + (1.0 - z) * u + z)
            - p1 / ((t - 1.0) * p2 + (1.0 - z) * (u + p1) + z)
    }

    /// `K_{i+1}` for `i` in `0..4`.
    pub fn eval(&self, i: usize, p1: f64, p2: f64, u: f64) -> f64 {
        match i {
            0 => self.k1(p1, p2, u),
            1 => self.k2(p1, p2, u),
            2 => self.k3(p1, p2, u),
            _ => self.k4(p1, p2, u),
        }
    }

    /// Bounds for `K₁…K₄`: `(θ−1)/(θ+1)` for `K₁`, `K₃`; for `K₂`, `K₄` the same
    /// when `z ≥ 1` (they are dominated by `K₁`, `K₃` there) and `(θ−1)/(θ+1) + 1 − z`
    /// when `z < 1`.
    pub fn bounds(&self) -> [f64; 4] {
        let base = (self.theta - 1.0) / (self.theta + 1.0);
        let mixed = if self.z < 1.0 { base + 1.0 - self.z } else { base };
        [base, mixed, base, mixed]
    }
}

/// Outcome of a grid maximisation of `K₁…K₄`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaCheck {
    pub theta: f64,
    pub z: f64,
    pub resolution: usize,
    pub grid_points: usize,
    pub maxima: [f64; 4],
    /// Maximisers as `(p1, p2, u)`.
    pub argmax: [[f64; 3]; 4],
    pub bounds: [f64; 4],
    /// Indices `1..=4` of the functions whose maximum exceeds its bound by more than [`GAMMA_TOL`].
    pub violations: Vec<usize>,
}

impl GammaCheck {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    /// Violations against arbitrary bounds, for negative controls.
    pub fn violations_against(&self, bounds: [f64; 4]) -> Vec<usize> {
        (0..4)
            .filter(|&i| self.maxima[i] > bounds[i] + GAMMA_TOL)
            .map(|i| i + 1)
            .collect()
    }
}

/// Maximises `K₁…K₄` at the solution's `(θ, z)` on a simplex grid, then refines.
pub fn verify_gamma_bounds(params: &PottsParams, sol: &TisgmSolution, resolution: usize) -> Result<GammaCheck> {
    check_k_bounds(params.theta(), sol.z, resolution)
}

/// Same as [`verify_gamma_bounds`] for raw `(θ, z)`.
pub fn check_k_bounds(theta: f64, z: f64, resolution: usize) -> Result<GammaCheck> {
    if resolution < 2 {
        return Err(Error::InvalidConfig("grid resolution must be at least 2".into()));
    }
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::NonPositiveZ(z));
    }
    let kf = KFunctions::new(theta, z);
    let n = resolution;
    let h = 1.0 / n as f64;

    // Per-slice maxima, reduced in index order so the result is deterministic.
    let slices: Vec<[(f64, [f64; 3]); 4]> = (0..=n)
        .into_par_iter()
        .map(|i| {
            let p1 = i as f64 * h;
            let mut best = [(f64::NEG_INFINITY, [0.0; 3]); 4];
            for j in 0..=(n - i) {
                let p2 = j as f64 * h;
                for l in 0..=(n - i - j) {
                    let u = l as f64 * h;
                    for (f, slot) in best.iter_mut().enumerate() {
                        let v = kf.eval(f, p1, p2, u);
                        if v > slot.0 {
                            *slot = (v, [p1, p2, u]);
                        }
                    }
                }
            }
            best
        })
        .collect();
    let mut best = [(f64::NEG_INFINITY, [0.0; 3]); 4];
    for s in &slices {
        for f in 0..4 {
            if s[f].0 > best[f].0 {
                best[f] = s[f];
            }
        }
    }
    for (f, slot) in best.iter_mut().enumerate() {
        *slot = refine(&kf, f, slot.1, h);
    }
    let bounds = kf.bounds();
    let maxima = best.map(|b| b.0);
    let violations = (0..4)
        .filter(|&i| maxima[i] > bounds[i] + GAMMA_TOL)
        .map(|i| i + 1)
        .collect();
    Ok(GammaCheck {
        theta,
        z,
        resolution: n,
        grid_points: (n + 1) * (n + 2) * (n + 3) / 6,
        maxima,
        argmax: best.map(|b| b.1),
        bounds,
        violations,
    })
}

/// Coordinate-wise golden-section sweeps inside the simplex, starting at a grid maximiser.
fn refine(kf: &KFunctions, f: usize, start: [f64; 3], h: f64) -> (f64, [f64; 3]) {
    let mut x = start;
    let mut fx = kf.eval(f, x[0], x[1], x[2]);
    for _ in 0..4 {
        for c in 0..3 {
            let others: f64 = (0..3).filter(|&d| d != c).map(|d| x[d]).sum();
            let hi = (1.0 - others).max(0.0).min(x[c] + h);
            let lo = (x[c] - h).max(0.0);
            if hi <= lo {
                continue;
            }
            let eval = |v: f64| {
                let mut y = x;
                y[c] = v;
                kf.eval(f, y[0], y[1], y[2])
            };
            let (v, fv) = golden_max(eval, lo, hi, 1e-13);
            if fv > fx {
                x[c] = v;
                fx = fv;
            }
        }
    }
    (fx, x)
}

/// Mass of the non-`z` block excluding spin `s` (0-based; the block is `0..m`).
pub fn other_mass(p: &[f64], m: usize, s: usize) -> f64 {
    p.iter()
        .enumerate()
        .filter(|&(j, _)| j >= m && j != s)
        .map(|(_, v)| v)
        .sum()
}

/// `p^t(s)` from the definition: reweight `p` by the boundary law and by `θ` at `t`.
pub fn conditioned_marginals(theta: f64, z: f64, m: usize, p: &[f64], t: usize) -> Vec<f64> {
    let w: Vec<f64> = p
        .iter()
        .enumerate()
        .map(|(s, &ps)| {
            let field = if s < m { z } else { 1.0 };
            let bond = if s == t { theta } else { 1.0 };
            field * bond * ps
        })
        .collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

/// `p^t(s)` from the four-case table in `p(s)`, `p(t)` and `u(t)`.
pub fn conditioned_marginal_table(theta: f64, z: f64, m: usize, p: &[f64], t: usize, s: usize) -> f64 {
    let u = other_mass(p, m, t);
    let bond = if s == t { theta } else { 1.0 };
    let field = if s < m { z } else { 1.0 };
    let den = if t < m {
        (theta - 1.0) * z * p[t] + (1.0 - z) * u + z
    } else {
        (theta - z) * p[t] + (1.0 - z) * u + z
    };
    bond * field * p[s] / den
}

/// `p^s(s) − p^t(s)` through the matching `K` function evaluated at `(p(s), p(t), u(s))`.
pub fn gap_via_k(theta: f64, z: f64, m: usize, p: &[f64], s: usize, t: usize) -> f64 {
    let kf = KFunctions::new(theta, z);
    let u = other_mass(p, m, s);
    let idx = match (s < m, t < m) {
        (true, true) => 0,
        (true, false) => 1,
        (false, true) => 2,
        (false, false) => 3,
    };
    kf.eval(idx, p[s], p[t], u)
}

/// `max{p^{s₁}(s₁) − p^{s₂}(s₁), p^{s₂}(s₂) − p^{s₁}(s₂)}`.
pub fn disagreement_kernel(theta: f64, z: f64, m: usize, p: &[f64], s1: usize, s2: usize) -> f64 {
    let a = conditioned_marginals(theta, z, m, p, s1);
    let b = conditioned_marginals(theta, z, m, p, s2);
    (a[s1] - b[s1]).max(b[s2] - a[s2])
}
