//! Named regions of the binary-tree phase diagram with a known outcome.
//!
//! A region pairs a measure family and a temperature interval with the verdict
//! that the analytic bounds predict there. Points outside every region carry
//! no prediction.

use serde::Serialize;

use super::Verdict;
use crate::error::Result;
use crate::model::{Branch, PottsParams, TisgmSolution};
use crate::thresholds::{fold_extreme_q_limit, region_thresholds};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// Free measure above `1 + (√2+1)q`.
    FreeKsTail,
    /// Free measure at or below `1 + (√2+1)q`.
    FreeBelowKs,
    /// Lower branch, `m = 1`, `θ ∈ [θ₁, θ**)`.
    SingletonLowerMsw,
    /// Lower branch, `m = 1`, `θ ∈ [θ**, θ*]`: neither bound applies.
    SingletonLowerGap,
    /// Upper branch, `m = 1`: extreme wherever it exists.
    SingletonUpperMsw,
    /// Lower branch, `2m < q`, `θ > θ*`.
    LowerKsTail,
    /// Lower branch, `2 ≤ m`, `7m ≤ q`, `θ ∈ [θ_m, θ̂)`.
    LowerSmallBlockKs,
    /// Upper branch, `2 ≤ m`, `7m ≤ q`, any `θ ≥ θ_m`.
    UpperSmallBlockKs,
    /// Upper branch, `2 ≤ m`, `2m < q < 7m`, `θ > θ̂`.
    UpperKsTail,
    /// Lower branch, `m = 2`, below `θ̆` (from `θ₂` for `q ≤ 8`, from `θ́` for `9 ≤ q ≤ 13`).
    PairLowerMsw,
    /// Upper branch, `m = 2`, `4 ≤ q ≤ 8`, `θ ∈ [θ₂, θ̀)`.
    PairUpperMsw,
    /// The double root at the fold, `m ≥ 2`, for `q` below the fold limit.
    FoldMsw,
}

impl Region {
    /// Verdict predicted for every point of the region.
    pub fn expected(&self) -> Option<Verdict> {
        use Region::*;
        match self {
            FreeKsTail | LowerKsTail | LowerSmallBlockKs | UpperSmallBlockKs | UpperKsTail => {
                Some(Verdict::NonExtremeKs)
            }
            SingletonLowerMsw | SingletonUpperMsw | PairLowerMsw | PairUpperMsw | FoldMsw => {
                Some(Verdict::ExtremeMsw)
            }
            SingletonLowerGap => Some(Verdict::Undecided),
            FreeBelowKs => None,
        }
    }

    pub fn describe(&self) -> &'static str {
        use Region::*;
        match self {
            FreeKsTail => "free measure above 1+(sqrt2+1)q: reconstruction solvable",
            FreeBelowKs => "free measure below the Kesten-Stigum threshold",
            SingletonLowerMsw => "m=1 lower branch below theta**: MSW bound holds",
            SingletonLowerGap => "m=1 lower branch between theta** and theta*: gap",
            SingletonUpperMsw => "m=1 upper branch: MSW bound holds everywhere",
            LowerKsTail => "lower branch above theta*: Kesten-Stigum",
            LowerSmallBlockKs => "lower branch, 7m<=q, below theta-hat: Kesten-Stigum",
            UpperSmallBlockKs => "upper branch, 7m<=q: Kesten-Stigum from the fold on",
            UpperKsTail => "upper branch, q<7m, above theta-hat: Kesten-Stigum",
            PairLowerMsw => "m=2 lower branch below theta-breve: MSW bound holds",
            PairUpperMsw => "m=2 upper branch below theta-grave: MSW bound holds",
            FoldMsw => "double root at the fold: MSW bound holds",
        }
    }

    pub fn as_str(&self) -> &'static str {
        use Region::*;
        match self {
            FreeKsTail => "free_ks_tail",
            FreeBelowKs => "free_below_ks",
            SingletonLowerMsw => "singleton_lower_msw",
            SingletonLowerGap => "singleton_lower_gap",
            SingletonUpperMsw => "singleton_upper_msw",
            LowerKsTail => "lower_ks_tail",
            LowerSmallBlockKs => "lower_small_block_ks",
            UpperSmallBlockKs => "upper_small_block_ks",
            UpperKsTail => "upper_ks_tail",
            PairLowerMsw => "pair_lower_msw",
            PairUpperMsw => "pair_upper_msw",
            FoldMsw => "fold_msw",
        }
    }

    /// Region of a binary-tree solution already in canonical form (`m ≤ q/2`).
    pub fn locate(params: &PottsParams, sol: &TisgmSolution) -> Result<Option<Region>> {
        if params.k() != 2 || sol.exceeds_half() {
            return Ok(None);
        }
        let (q, m, t) = (params.q(), sol.m, params.theta());
        let th = region_thresholds(params, m)?;
        let hat = th.theta_hat.unwrap_or(f64::INFINITY);
        let star = th.theta_star.unwrap_or(f64::INFINITY);
        let small_block = m >= 2 && 7 * m <= q;
        let below_half = 2 * m < q;

        if sol.branch == Branch::Free {
            let tail = th.theta_hat_0.unwrap_or(f64::INFINITY);
            return Ok(Some(if t > tail {
                Region::FreeKsTail
            } else {
                Region::FreeBelowKs
            }));
        }
        if sol.degenerate && sol.z != 1.0 && m >= 2 && (q as f64) < fold_extreme_q_limit(m) {
            return Ok(Some(Region::FoldMsw));
        }
        let region = match (sol.branch, m) {
            (Branch::Z1, 1) => {
                let ds = th.theta_double_star.unwrap_or(f64::INFINITY);
                if t < ds {
                    Some(Region::SingletonLowerMsw)
                } else if t <= star {
                    Some(Region::SingletonLowerGap)
                } else if below_half {
                    Some(Region::LowerKsTail)
                } else {
                    None
                }
            }
            (Branch::Z2, 1) => Some(Region::SingletonUpperMsw),
            (Branch::Z1, _) => {
                if below_half && t > star {
                    Some(Region::LowerKsTail)
                } else if small_block && t < hat {
                    Some(Region::LowerSmallBlockKs)
                } else if m == 2 {
                    let start = if q <= 8 { Some(th.theta_m) } else { th.theta_acute };
                    match (start, th.theta_breve) {
                        (Some(s), Some(e)) if t >= s && t < e => Some(Region::PairLowerMsw),
                        _ => None,
                    }
                } else {
                    None
                }
            }
            (Branch::Z2, _) => {
                if small_block {
                    Some(Region::UpperSmallBlockKs)
                } else if below_half && t > hat {
                    Some(Region::UpperKsTail)
                } else if m == 2 && th.theta_grave.is_some_and(|g| t < g) {
                    Some(Region::PairUpperMsw)
                } else {
                    None
                }
            }
            (Branch::Free, _) => unreachable!(),
        };
        Ok(region)
    }
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}
