//! Extremality criteria for TISGMs.
//!
//! * Kesten-Stigum: `k·λ̂² > 1` makes reconstruction solvable, so the measure is
//!   not extreme. The same test on the coarse-grained chain uses `λ₂(P̂)`.
//! * Martin: `k(√(P̂₁₁P̂₂₂) − √(P̂₁₂P̂₂₁))² ≤ 1` makes the coarse-grained chain
//!   extreme. That says nothing about the measure itself, so it is only ever an
//!   annotation.
//! * MSW: `k·κ·γ < 1` makes reconstruction impossible, so the measure is
//!   extreme. `κ` is the largest total-variation distance between two rows of
//!   `P`; `γ` is bounded by `(θ−1)/(θ+1)`, plus `1 − z` when `z < 1`.

pub mod gamma;
pub mod region;

use nalgebra::Matrix2;
use serde::Serialize;

use crate::chains::{build_chain, ChainMatrices};
use crate::error::Result;
use crate::model::{enumerate_tisgms, solution_for, Branch, PottsParams, TisgmSolution};

pub use region::Region;

/// Whether `γ` may exceed one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaMode {
    /// `γ` is a total-variation distance, so the bound is clipped at one.
    #[default]
    Capped,
    /// The additive bound as is, even above one.
    PaperExact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaKind {
    /// `(θ−1)/(θ+1)`.
    ZAtLeastOne,
    /// `(θ−1)/(θ+1) + 1 − z`.
    ZBelowOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Kesten-Stigum fires: reconstruction is solvable.
    NonExtremeKs,
    /// MSW fires: reconstruction is impossible.
    ExtremeMsw,
    Undecided,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::NonExtremeKs => "non_extreme_ks",
            Verdict::ExtremeMsw => "extreme_msw",
            Verdict::Undecided => "undecided",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsValues {
    /// `k·λ̂²` for the full chain.
    pub full: f64,
    /// `k·λ₂(P̂)²` for the coarse-grained chain.
    pub fuzzy: f64,
    pub fires: bool,
}

pub fn kesten_stigum(chain: &ChainMatrices, k: usize) -> KsValues {
    let kf = k as f64;
    let full = kf * chain.lambda_hat().powi(2);
    KsValues {
        full,
        fuzzy: kf * chain.spectrum.lambda2_hat.powi(2),
        fires: full > 1.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MartinValue {
    pub value: f64,
    pub holds: bool,
}

/// Martin's condition on a positive 2 × 2 stochastic matrix.
pub fn martin_condition(p_hat: &Matrix2<f64>, k: usize) -> MartinValue {
    let d = (p_hat[(0, 0)] * p_hat[(1, 1)]).sqrt() - (p_hat[(0, 1)] * p_hat[(1, 0)]).sqrt();
    let value = k as f64 * d * d;
    MartinValue {
        value,
        holds: value <= 1.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MswBound {
    /// Row distance inside the `z` block; present when `m ≥ 2`.
    pub a: Option<f64>,
    /// Row distance inside the other block; present when `q − m ≥ 2`.
    pub b: Option<f64>,
    /// Row distance across the blocks.
    pub c: f64,
    pub kappa: f64,
    pub gamma_kind: GammaKind,
    /// The bound as used (after the cap in capped mode).
    pub gamma_bound: f64,
    /// The bound before capping.
    pub gamma_raw: f64,
    pub gamma_capped: bool,
    /// `k·κ·γ`.
    pub value: f64,
    pub fires: bool,
}

/// Cross-block row distance `(z|θ−w| + |1−θw| + (z(m−1)+q−m−1)|1−w|) / (2Z₁)`, `w = z^{1/k}`.
pub fn cross_distance(params: &PottsParams, chain: &ChainMatrices) -> f64 {
    let (t, z) = (params.theta(), chain.z);
    let (q, m) = (chain.q as f64, chain.m as f64);
    let w = z.powf(1.0 / params.k() as f64);
    (z * (t - w).abs() + (1.0 - t * w).abs() + (z * (m - 1.0) + q - m - 1.0) * (1.0 - w).abs())
        / (2.0 * chain.norm_upper)
}

/// `γ` bound at `(θ, z)` before any cap.
pub fn gamma_bound(theta: f64, z: f64) -> (GammaKind, f64) {
    let base = (theta - 1.0) / (theta + 1.0);
    if z >= 1.0 {
        (GammaKind::ZAtLeastOne, base)
    } else {
        (GammaKind::ZBelowOne, base + 1.0 - z)
    }
}

/// The MSW quantities for a solution and its chain.
pub fn msw_bound(
    params: &PottsParams,
    sol: &TisgmSolution,
    chain: &ChainMatrices,
    mode: GammaMode,
) -> Result<MswBound> {
    params.check_block(sol.m)?;
    let q = params.q();
    let a = (sol.m >= 2).then_some(chain.spectrum.a);
    let b = (q - sol.m >= 2).then_some(chain.spectrum.b);
    let c = cross_distance(params, chain);
    let kappa = [a, b, Some(c)].into_iter().flatten().fold(f64::MIN, f64::max);
    let (gamma_kind, gamma_raw) = gamma_bound(params.theta(), sol.z);
    let gamma_capped = mode == GammaMode::Capped && gamma_raw > 1.0;
    let gamma = if gamma_capped { 1.0 } else { gamma_raw };
    let value = params.k() as f64 * kappa * gamma;
    Ok(MswBound {
        a,
        b,
        c,
        kappa,
        gamma_kind,
        gamma_bound: gamma,
        gamma_raw,
        gamma_capped,
        value,
        fires: value < 1.0,
    })
}

/// Distance of each criterion from its threshold; positive means it fired.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Margins {
    pub ks: f64,
    pub ks_fuzzy: f64,
    pub martin: f64,
    pub msw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalityVerdict {
    pub m: usize,
    pub branch: Branch,
    pub z: f64,
    /// The same measure with the block size folded into `1..=q/2`.
    pub canonical_m: usize,
    pub canonical_branch: Branch,
    pub canonical_z: f64,
    pub ks: KsValues,
    pub martin: MartinValue,
    pub msw: MswBound,
    pub margins: Margins,
    pub verdict: Verdict,
    /// Martin's condition holds: the coarse-grained measure is extreme.
    pub fuzzy_extreme: bool,
    /// Kesten-Stigum fires on the coarse-grained chain.
    pub fuzzy_non_extreme: bool,
    /// Binary-tree region this point belongs to, if any statement covers it.
    pub region: Option<Region>,
}

/// The same measure written with block size `q − m` when `m > q/2`.
///
/// Swapping the classes maps `(m, z)` to `(q − m, 1/z)` and the lower branch to
/// the upper one.
pub fn canonical_form(params: &PottsParams, sol: &TisgmSolution) -> Result<TisgmSolution> {
    if !sol.exceeds_half() {
        return Ok(*sol);
    }
    let m = params.q() - sol.m;
    if sol.branch == Branch::Free {
        return Ok(TisgmSolution::free(params.q(), m));
    }
    let mut out = solution_for(params, m, sol.branch.swapped())?;
    out.degenerate = sol.degenerate;
    Ok(out)
}

/// Classifies one solution: Kesten-Stigum first, then MSW, otherwise undecided.
pub fn classify(params: &PottsParams, sol: &TisgmSolution, mode: GammaMode) -> Result<ExtremalityVerdict> {
    let canon = canonical_form(params, sol)?;
    let chain = build_chain(params, &canon)?;
    let k = params.k();
    let ks = kesten_stigum(&chain, k);
    let martin = martin_condition(&chain.p_hat, k);
    let msw = msw_bound(params, &canon, &chain, mode)?;
    let verdict = if ks.fires {
        Verdict::NonExtremeKs
    } else if msw.fires {
        Verdict::ExtremeMsw
    } else {
        Verdict::Undecided
    };
    let region = if k == 2 { Region::locate(params, &canon)? } else { None };
    Ok(ExtremalityVerdict {
        m: sol.m,
        branch: sol.branch,
        z: sol.z,
        canonical_m: canon.m,
        canonical_branch: canon.branch,
        canonical_z: canon.z,
        ks,
        martin,
        msw,
        margins: Margins {
            ks: ks.full - 1.0,
            ks_fuzzy: ks.fuzzy - 1.0,
            martin: 1.0 - martin.value,
            msw: 1.0 - msw.value,
        },
        verdict,
        fuzzy_extreme: martin.holds,
        fuzzy_non_extreme: ks.fuzzy > 1.0,
        region,
    })
}

/// Census of MSW-extreme TISGMs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExtremalCount {
    /// Measures certified extreme.
    pub extreme: u128,
    /// All TISGMs at this temperature.
    pub total: u128,
    /// `2^{q−1} + q`.
    pub required: u128,
    /// Every lower-branch measure and every singleton upper-branch measure is certified.
    pub premise_holds: bool,
}

/// Counts the TISGMs certified extreme by MSW.
pub fn count_extremal_lower_bound(params: &PottsParams, mode: GammaMode) -> Result<ExtremalCount> {
    let census = enumerate_tisgms(params)?;
    let q = params.q();
    let mut extreme = 0u128;
    let mut premise_holds = true;
    for fam in &census.families {
        let v = classify(params, &fam.solution, mode)?;
        let certified = v.verdict == Verdict::ExtremeMsw;
        if certified {
            extreme += fam.multiplicity;
        }
        let in_premise = v.canonical_branch == Branch::Z1
            || (v.canonical_branch == Branch::Z2 && v.canonical_m == 1);
        if in_premise && !certified {
            premise_holds = false;
        }
    }
    Ok(ExtremalCount {
        extreme,
        total: census.total,
        required: (1u128 << (q - 1)) + q as u128,
        premise_holds,
    })
}

/// Criterion whose crossing of one is located along a branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    KestenStigum,
    Msw,
}

/// Temperatures in `[lo, hi]` where the chosen criterion crosses one along a branch.
///
/// Scans `n` cells for sign changes of `value − 1` and bisects each one.
/// Points where the branch does not exist count as no crossing.
pub fn criterion_crossings(
    params: &PottsParams,
    m: usize,
    branch: Branch,
    criterion: Criterion,
    mode: GammaMode,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<Vec<f64>> {
    let eval = |t: f64| -> f64 {
        let value = || -> Result<f64> {
            let p = params.with_theta(t)?;
            let sol = solution_for(&p, m, branch)?;
            let canon = canonical_form(&p, &sol)?;
            let chain = build_chain(&p, &canon)?;
            Ok(match criterion {
                Criterion::KestenStigum => kesten_stigum(&chain, p.k()).full - 1.0,
                Criterion::Msw => msw_bound(&p, &canon, &chain, mode)?.value - 1.0,
            })
        };
        value().unwrap_or(f64::NAN)
    };
    let mut out = Vec::new();
    let step = (hi - lo) / n.max(1) as f64;
    let mut x0 = lo;
    let mut f0 = eval(x0);
    for i in 1..=n.max(1) {
        let x1 = if i == n { hi } else { lo + step * i as f64 };
        let f1 = eval(x1);
        if f0.is_finite() && f1.is_finite() && f0 != 0.0 && f0.signum() != f1.signum() {
            out.push(crate::roots::bisect(eval, x0, x1)?);
        }
        x0 = x1;
        f0 = f1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn verdict_at(q: usize, t: f64, m: usize, b: Branch) -> ExtremalityVerdict {
        let p = PottsParams::new(q, 2, t).unwrap();
        classify(&p, &solution_for(&p, m, b).unwrap(), GammaMode::PaperExact).unwrap()
    }

    #[test]
    fn ks_at_theta_star_is_one() {
        let v = verdict_at(3, 3.0 * SQRT_2 + 2.0, 1, Branch::Z1);
        assert!((v.ks.full - 1.0).abs() < 1e-12, "{}", v.ks.full);
    }

    #[test]
    fn ks_at_theta_hat_upper_is_one() {
        let v = verdict_at(6, 6.0 * SQRT_2 - 1.0, 2, Branch::Z2);
        assert!((v.ks.full - 1.0).abs() < 1e-12, "{}", v.ks.full);
    }

    #[test]
    fn free_chain_ks_value() {
        let v = verdict_at(3, 3.0, 1, Branch::Free);
        assert!((v.ks.full - 0.32).abs() < 1e-15);
        assert!(!v.ks.fires);
    }

    #[test]
    fn martin_limits() {
        let p = PottsParams::new(3, 2, 8.0).unwrap();
        let c = build_chain(&p, &TisgmSolution::free(3, 1)).unwrap();
        assert!((martin_condition(&c.p_hat, 2).value - 1.0).abs() < 1e-12);
        let p = PottsParams::new(3, 2, 1e6).unwrap();
        let c = build_chain(&p, &TisgmSolution::free(3, 1)).unwrap();
        assert!(!martin_condition(&c.p_hat, 2).holds);
        let p = PottsParams::new(3, 2, 1.0 + 1e-6).unwrap();
        let c = build_chain(&p, &TisgmSolution::free(3, 1)).unwrap();
        assert!(martin_condition(&c.p_hat, 2).value < 1e-10);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(verdict_at(3, 7.0, 1, Branch::Z1).verdict, Verdict::NonExtremeKs);
        assert_eq!(verdict_at(3, 4.0, 1, Branch::Z1).verdict, Verdict::ExtremeMsw);
        assert_eq!(verdict_at(3, 5.0, 1, Branch::Z1).verdict, Verdict::Undecided);
        let t2 = 1.0 + 2.0 * 28f64.sqrt();
        assert_eq!(verdict_at(16, t2 + 0.1, 2, Branch::Z2).verdict, Verdict::NonExtremeKs);
    }

    #[test]
    fn upper_singleton_extreme_from_fold() {
        let v = verdict_at(3, 1.0 + 2.0 * SQRT_2, 1, Branch::Z2);
        assert_eq!(v.verdict, Verdict::ExtremeMsw);
    }

    #[test]
    fn grave_boundary_q6() {
        let v = verdict_at(6, 7.0, 2, Branch::Z2);
        assert!((v.msw.value - 1.0).abs() < 1e-12, "{}", v.msw.value);
    }

    #[test]
    fn relabelled_block_matches() {
        let p = PottsParams::new(5, 2, 9.0).unwrap();
        let hi = classify(&p, &solution_for(&p, 4, Branch::Z1).unwrap(), GammaMode::Capped).unwrap();
        let lo = classify(&p, &solution_for(&p, 1, Branch::Z2).unwrap(), GammaMode::Capped).unwrap();
        assert_eq!(hi.canonical_m, 1);
        assert_eq!(hi.canonical_branch, Branch::Z2);
        assert!((hi.canonical_z - lo.z).abs() / lo.z < 1e-12);
        assert!((hi.ks.full - lo.ks.full).abs() < 1e-12);
        assert_eq!(hi.verdict, lo.verdict);
    }

    #[test]
    fn cross_distance_simplifies_for_singleton_above_one() {
        // For k = 2, m = 1, z ≥ 1: c = ((θ+q−2)√z − (q−1))/Z₁ and b < c.
        for t in [4.0, 5.0, 9.0] {
            let p = PottsParams::new(3, 2, t).unwrap();
            let s = solution_for(&p, 1, Branch::Z2).unwrap();
            let c = build_chain(&p, &s).unwrap();
            let want = ((t + 1.0) * s.z.sqrt() - 2.0) / c.norm_upper;
            assert!((cross_distance(&p, &c) - want).abs() < 1e-13);
            assert!(c.spectrum.b < want);
        }
    }

    #[test]
    fn gamma_cap_only_in_capped_mode() {
        let p = PottsParams::new(3, 2, 40.0).unwrap();
        let s = solution_for(&p, 1, Branch::Z1).unwrap();
        assert!(s.z < 0.05);
        let c = build_chain(&p, &s).unwrap();
        let capped = msw_bound(&p, &s, &c, GammaMode::Capped).unwrap();
        let exact = msw_bound(&p, &s, &c, GammaMode::PaperExact).unwrap();
        assert!(capped.gamma_capped && capped.gamma_bound == 1.0);
        assert!(exact.gamma_bound > 1.0 && !exact.gamma_capped);
    }

    #[test]
    fn extremal_census_near_critical() {
        for (q, d) in [(3usize, 0.05), (5, 0.02)] {
            for s in [-1.0, 1.0] {
                let p = PottsParams::new(q, 2, q as f64 + 1.0 + s * d).unwrap();
                let c = count_extremal_lower_bound(&p, GammaMode::PaperExact).unwrap();
                assert!(c.premise_holds, "q={q} side={s}");
                assert!(c.extreme >= c.required, "q={q} {c:?}");
            }
        }
        let p = PottsParams::new(3, 2, 1.0 + 2.0 * SQRT_2 - 0.5).unwrap();
        assert_eq!(count_extremal_lower_bound(&p, GammaMode::PaperExact).unwrap().extreme, 1);
    }
}
