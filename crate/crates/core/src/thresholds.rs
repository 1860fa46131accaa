//! Critical temperatures and the polynomial boundaries between verdict regions.
//!
//! Everything past `θ_m` and `θ_c` is specific to the binary tree; those
//! fields are left empty for `k ≠ 2` or when a value's preconditions on `q`
//! and `m` fail.

use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::PottsParams;
use crate::roots::{bisect, golden_max, sign_changes};

/// Grid used to locate the first sign change of an inequality before bisecting.
const SCAN_POINTS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalThresholds {
    pub q: usize,
    pub k: usize,
    pub m: usize,
    /// Fold of block size `m`.
    pub theta_m: f64,
    pub theta_c: f64,
    /// `θ_m = θ_c`: the fold sits on the critical temperature.
    pub fold_meets_critical: bool,
    /// `1 + q + 2√(2m(q−m))`: the Martin bound for the coarse-grained free chain.
    pub theta_0: Option<f64>,
    /// `1 + (√2+1)q`: the Kesten-Stigum bound for the free chain.
    pub theta_hat_0: Option<f64>,
    /// `(√2−1)q + 2m + 1`: `2a² = 1` on either branch.
    pub theta_hat: Option<f64>,
    /// `1 + (√2+1)q − 2m`: `2b² = 1` on the lower branch.
    pub theta_star: Option<f64>,
    /// Ends of the window where the coarse-grained lower branch is Kesten-Stigum unstable.
    pub theta_bar: Option<f64>,
    pub theta_barbar: Option<f64>,
    /// Upper end of the MSW interval of the lower branch, `m = 1`.
    pub theta_double_star: Option<f64>,
    /// Upper end of the MSW interval of the lower branch, `m = 2`, `4 ≤ q ≤ 13`.
    pub theta_breve: Option<f64>,
    /// Upper end of the MSW interval of the upper branch, `m = 2`, `4 ≤ q ≤ 8`.
    pub theta_grave: Option<f64>,
    /// Lower end of the MSW interval of the lower branch, `m = 2`, `9 ≤ q ≤ 13`.
    pub theta_acute: Option<f64>,
}

/// All thresholds of block size `m` (see the field docs for when each is present).
pub fn critical_thresholds(params: &PottsParams, m: usize) -> Result<CriticalThresholds> {
    thresholds_inner(params, m, true)
}

/// Thresholds without the cubic window, which is the only costly field.
pub(crate) fn region_thresholds(params: &PottsParams, m: usize) -> Result<CriticalThresholds> {
    thresholds_inner(params, m, false)
}

fn thresholds_inner(params: &PottsParams, m: usize, with_cubic: bool) -> Result<CriticalThresholds> {
    params.check_block(m)?;
    let (q, k) = (params.q(), params.k());
    let theta_c = params
        .theta_c()
        .ok_or(Error::InvalidParams("critical temperature needs k >= 2".into()))?;
    let theta_m = params.fold_theta(m)?.expect("k >= 2 has a fold");
    let fold_meets_critical = if k == 2 {
        (q as f64) * (q as f64) == (4 * m * (q - m)) as f64
    } else {
        (theta_m - theta_c).abs() <= 1e-12 * theta_c
    };
    let mut out = CriticalThresholds {
        q,
        k,
        m,
        theta_m,
        theta_c,
        fold_meets_critical,
        theta_0: None,
        theta_hat_0: None,
        theta_hat: None,
        theta_star: None,
        theta_bar: None,
        theta_barbar: None,
        theta_double_star: None,
        theta_breve: None,
        theta_grave: None,
        theta_acute: None,
    };
    if k != 2 {
        return Ok(out);
    }
    let (qf, mf) = (q as f64, m as f64);
    let star = theta_star(q, m);
    out.theta_0 = Some(1.0 + qf + 2.0 * (2.0 * mf * (qf - mf)).sqrt());
    out.theta_hat_0 = Some(1.0 + (SQRT_2 + 1.0) * qf);
    out.theta_hat = Some(theta_hat(q, m));
    out.theta_star = Some(star);

    if with_cubic {
        if let Some((lo, hi)) = cubic_window(q, m)? {
            out.theta_bar = Some(lo);
            out.theta_barbar = Some(hi);
        }
    }
    if m == 1 {
        out.theta_double_star = Some(bisect(|t| s_poly(q, t), qf + 1.0, star)?);
    }
    if m == 2 && (4..=13).contains(&q) {
        out.theta_breve = Some(bisect(|t| big_theta(q, t), theta_c, star)?);
    }
    if m == 2 && (4..=8).contains(&q) {
        // The condition holds just above the fold; find where it first fails.
        out.theta_grave = first_crossing(|t| upper_branch_condition(q, m, t), theta_m, star)?;
    }
    if m == 2 && (9..=13).contains(&q) {
        out.theta_acute = first_crossing(|t| lower_branch_condition(q, m, t), theta_m, qf + 1.0)?;
    }
    Ok(out)
}

pub fn theta_hat(q: usize, m: usize) -> f64 {
    (SQRT_2 - 1.0) * q as f64 + 2.0 * m as f64 + 1.0
}

pub fn theta_star(q: usize, m: usize) -> f64 {
    1.0 + (SQRT_2 + 1.0) * q as f64 - 2.0 * m as f64
}

fn first_crossing<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<Option<f64>> {
    match sign_changes(&f, lo, hi, SCAN_POINTS).first() {
        Some(&(a, b)) => Ok(Some(bisect(&f, a, b)?)),
        None => Ok(None),
    }
}

/// Lower and upper `z` of block `m` on the binary tree at `θ`, if they exist.
fn binary_branches(q: usize, m: usize, theta: f64) -> Option<(f64, f64)> {
    let t = theta - 1.0;
    let d = t * t - (4 * m * (q - m)) as f64;
    if d < 0.0 {
        return None;
    }
    let r = d.sqrt();
    let x1 = 2.0 * (q - m) as f64 / (t + r);
    let x2 = (t + r) / (2.0 * m as f64);
    Some((x1 * x1, x2 * x2))
}

fn norm_upper(q: usize, m: usize, theta: f64, z: f64) -> f64 {
    (theta + m as f64 - 1.0) * z + (q - m) as f64
}

/// `√2·a − 1` on the lower branch of the binary tree; decreasing on `[θ_m, q+1]`.
pub fn gamma_lower(q: usize, m: usize, theta: f64) -> Option<f64> {
    let (z, _) = binary_branches(q, m, theta)?;
    Some(SQRT_2 * (theta - 1.0) * z / norm_upper(q, m, theta, z) - 1.0)
}

/// `√2·a − 1` on the upper branch; increasing.
pub fn gamma_upper(q: usize, m: usize, theta: f64) -> Option<f64> {
    let (_, z) = binary_branches(q, m, theta)?;
    Some(SQRT_2 * (theta - 1.0) * z / norm_upper(q, m, theta, z) - 1.0)
}

/// `√2·b − 1` on the lower branch; increasing.
pub fn xi_lower(q: usize, m: usize, theta: f64) -> Option<f64> {
    let (z, _) = binary_branches(q, m, theta)?;
    Some(SQRT_2 * (theta - 1.0) * z.sqrt() / norm_upper(q, m, theta, z) - 1.0)
}

/// `√2·b − 1` on the upper branch; decreasing for `m = 1`.
pub fn xi_upper(q: usize, m: usize, theta: f64) -> Option<f64> {
    let (_, z) = binary_branches(q, m, theta)?;
    Some(SQRT_2 * (theta - 1.0) * z.sqrt() / norm_upper(q, m, theta, z) - 1.0)
}

/// `√2·λ₂ − 1` for the coarse-grained lower branch.
pub fn eta_lower(q: usize, m: usize, theta: f64) -> Option<f64> {
    let (z, _) = binary_branches(q, m, theta)?;
    let lambda2 = (theta - 1.0 - (z.sqrt() - 1.0) * m as f64) * z / norm_upper(q, m, theta, z);
    Some(SQRT_2 * lambda2 - 1.0)
}

/// `(θ−1)³ − (√2−1)q(θ−1)² − 2(2√2−1)m(q−m)(θ−1) + 2qm(q−m)`; negative exactly where `eta_lower > 0`.
pub fn fuzzy_ks_cubic(q: usize, m: usize, theta: f64) -> f64 {
    let t = theta - 1.0;
    let (qf, mqm) = (q as f64, (m * (q - m)) as f64);
    t * t * t - (SQRT_2 - 1.0) * qf * t * t - 2.0 * (2.0 * SQRT_2 - 1.0) * mqm * t + 2.0 * qf * mqm
}

/// Maximum of `eta_lower` over `[θ_m, q+1]` as `(θ, value)`.
///
/// Positive iff the coarse-grained lower branch has a Kesten-Stigum window;
/// scanning `q` for the sign change recovers the smallest alphabet with one.
pub fn fuzzy_ks_peak(q: usize, m: usize) -> Result<(f64, f64)> {
    if m == 0 || m >= q || 2 * m > q {
        return Err(Error::BlockSize { m, max: q / 2 });
    }
    let lo = 1.0 + 2.0 * ((m * (q - m)) as f64).sqrt();
    let hi = q as f64 + 1.0;
    let f = |t: f64| eta_lower(q, m, t).unwrap_or(f64::NEG_INFINITY);
    // Coarse grid first so a boundary maximum is not mistaken for an interior one.
    let n = 400;
    let step = (hi - lo) / n as f64;
    let best = (0..=n)
        .map(|i| lo + step * i as f64)
        .max_by(|a, b| f(*a).total_cmp(&f(*b)))
        .unwrap_or(lo);
    Ok(golden_max(f, (best - step).max(lo), (best + step).min(hi), 1e-12))
}

/// The two roots of the cubic in `(θ_m, q+1)`, when both exist and are distinct.
fn cubic_window(q: usize, m: usize) -> Result<Option<(f64, f64)>> {
    if 2 * m >= q {
        return Ok(None);
    }
    let lo = 1.0 + 2.0 * ((m * (q - m)) as f64).sqrt();
    let hi = q as f64 + 1.0;
    let (peak, value) = fuzzy_ks_peak(q, m)?;
    if value <= 0.0 {
        return Ok(None);
    }
    let c = |t: f64| fuzzy_ks_cubic(q, m, t);
    let left = bisect(c, lo, peak)?;
    let right = bisect(c, peak, hi)?;
    Ok((left < right).then_some((left, right)))
}

/// `6θ⁴ − (2q+3)θ³ − (4q²+7q+3)θ² − (8q²−8q−11)θ − (4q²−13q+11)`.
pub fn s_poly(q: usize, t: f64) -> f64 {
    let q = q as f64;
    (((6.0 * t - (2.0 * q + 3.0)) * t - (4.0 * q * q + 7.0 * q + 3.0)) * t
        - (8.0 * q * q - 8.0 * q - 11.0))
        * t
        - (4.0 * q * q - 13.0 * q + 11.0)
}

/// `θ³ − (q−1)θ² − (2q−3)θ + (4q²−13q+11)`.
pub fn u_poly(q: usize, t: f64) -> f64 {
    let q = q as f64;
    ((t - (q - 1.0)) * t - (2.0 * q - 3.0)) * t + (4.0 * q * q - 13.0 * q + 11.0)
}

/// `(θ−1)(θ²−θ+6−4q) ∓ (θ²−θ+4−2q)√((θ−1)²−4(q−1))`: `lower = true` takes the minus sign.
pub fn psi(q: usize, t: f64, lower: bool) -> f64 {
    let q = q as f64;
    let r = ((t - 1.0) * (t - 1.0) - 4.0 * (q - 1.0)).max(0.0).sqrt();
    let sign = if lower { -1.0 } else { 1.0 };
    (t - 1.0) * (t * t - t + 6.0 - 4.0 * q) + sign * (t * t - t + 4.0 - 2.0 * q) * r
}

/// The `m = 2` lower-branch boundary above `θ_c`; positive where the MSW bound holds.
pub fn big_theta(q: usize, t: f64) -> f64 {
    let q = q as f64;
    let r = ((t - 1.0) * (t - 1.0) - 8.0 * (q - 2.0)).max(0.0).sqrt();
    let poly = (((t - 1.0) * t - (6.0 * q - 5.0)) * t - (4.0 * q - 17.0)) * t + 2.0 * q - 6.0;
    poly - ((t * t - (2.0 * q + 3.0)) * t - 2.0 * q + 6.0) * r
}

fn branch_condition(q: usize, m: usize, t: f64, sign: f64) -> f64 {
    let mf = m as f64;
    let r = ((t - 1.0) * (t - 1.0) - (4 * m * (q - m)) as f64).max(0.0).sqrt();
    t * t - (2.0 * mf + 4.0) * t - 2.0 * mf + 3.0 + sign * (t - 3.0) * r
}

/// Negative where `2a(θ−1)/(θ+1) < 1` on the lower branch with `z ≥ 1`.
pub fn lower_branch_condition(q: usize, m: usize, t: f64) -> f64 {
    branch_condition(q, m, t, -1.0)
}

/// Negative where `2a(θ−1)/(θ+1) < 1` on the upper branch.
pub fn upper_branch_condition(q: usize, m: usize, t: f64) -> f64 {
    branch_condition(q, m, t, 1.0)
}

/// Largest `q` (for given `m ≥ 2`) at which the double root at the fold is MSW-extreme.
pub fn fold_extreme_q_limit(m: usize) -> f64 {
    let mf = m as f64;
    (mf + 1.0) / (2.0 * mf) * (3.0 * mf + 1.0 + (mf * mf + 6.0 * mf + 1.0).sqrt())
}
