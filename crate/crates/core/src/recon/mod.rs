//! Reconstruction probe: how much of the root spin survives at depth `n`.
//!
//! The chain of a TISGM is broadcast down a complete `k`-ary tree and the
//! statistic measures how well the depth-`n` spins separate root spins. With
//! [`Estimator::LeafTv`] it is the total-variation distance between the leaf
//! laws under two root spins, averaged over pairs; exact by density evolution
//! while the support is small, Monte Carlo beyond that. Simulation cannot prove
//! extremality; it only checks the direction of the analytic verdicts.

pub mod exact;
pub mod mc;
pub mod tree;

use serde::Serialize;

use crate::chains::ChainMatrices;
use crate::error::{Error, Result};

pub use exact::{exact_leaf_tv, ExactProfile};
pub use tree::{broadcast_sample, sample_stream};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;
pub const DEFAULT_EXACT_BUDGET: u128 = 200_000_000;
pub const MIN_SAMPLES: usize = 100;

/// Weights of the root spins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootPrior {
    /// Stationary law of the chain, the single-site marginal of the measure.
    Stationary,
    Uniform,
    /// Only pairs involving this spin (0-based).
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    LeafTv,
    MajorityAgreement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Exact where the budget allows, Monte Carlo for the remaining depths.
    Auto,
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    SignalPersists,
    SignalDecays,
    Inconclusive,
}

impl Decision {
    pub fn as_str(&self) -> &'static str {
        match self {
            Decision::SignalPersists => "signal_persists",
            Decision::SignalDecays => "signal_decays",
            Decision::Inconclusive => "inconclusive",
        }
    }
}

/// Thresholds of the persistence decision.
///
/// With `S_n`, `σ_n` the statistic and standard error at the deepest level and
/// `S_{n−2}`, `σ_{n−2}` two levels up, and `E = S_n + c(σ_n + σ_{n−2})`:
/// decays if `S_n < c·σ_n` or `E < decay_ratio²·S_{n−2}`; persists if
/// `S_n > c·σ_n` and `E ≥ persist_ratio²·S_{n−2}`; otherwise inconclusive.
/// The ratios are per-level contraction factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecisionRule {
    pub sigma_multiple: f64,
    pub decay_ratio: f64,
    pub persist_ratio: f64,
}

impl Default for DecisionRule {
    fn default() -> Self {
        Self { sigma_multiple: 3.0, decay_ratio: 0.8, persist_ratio: 0.9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub depth: usize,
    /// Samples per root spin.
    pub samples: usize,
    pub seed: u64,
    pub root_prior: RootPrior,
    pub estimator: Estimator,
    /// Tree arity `k`.
    pub arity: usize,
    pub method: Method,
    /// Cap on `depth · k^depth`.
    pub node_budget: u64,
    /// Cap on the multisets enumerated by the exact recursion at one level.
    pub exact_budget: u128,
    pub bootstrap: usize,
    pub rule: DecisionRule,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            depth: 8,
            samples: 2000,
            seed: 1,
            root_prior: RootPrior::Stationary,
            estimator: Estimator::LeafTv,
            arity: 2,
            method: Method::Auto,
            node_budget: DEFAULT_NODE_BUDGET,
            exact_budget: DEFAULT_EXACT_BUDGET,
            bootstrap: 200,
            rule: DecisionRule::default(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self, q: usize) -> Result<()> {
        if self.depth == 0 {
            return Err(Error::InvalidConfig("depth must be at least 1".into()));
        }
        if self.arity == 0 {
            return Err(Error::InvalidConfig("arity must be positive".into()));
        }
        if self.samples < MIN_SAMPLES {
            return Err(Error::InvalidConfig(format!("need at least {MIN_SAMPLES} samples, got {}", self.samples)));
        }
        if let RootPrior::Fixed(s) = self.root_prior {
            if s >= q {
                return Err(Error::InvalidConfig(format!("fixed root spin {s} outside 0..{q}")));
            }
        }
        let nodes = (self.arity as u128)
            .checked_pow(self.depth as u32)
            .and_then(|n| n.checked_mul(self.depth as u128));
        match nodes {
            Some(n) if n <= self.node_budget as u128 => Ok(()),
            _ => Err(Error::Budget(format!(
                "depth {} at arity {} exceeds the node budget {}",
                self.depth, self.arity, self.node_budget
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowMethod {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DepthRow {
    pub depth: usize,
    pub statistic: f64,
    /// Zero for exact rows.
    pub stderr: f64,
    pub method: RowMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconEstimate {
    pub q: usize,
    pub estimator: Estimator,
    pub rows: Vec<DepthRow>,
    pub decision: Decision,
}

impl ReconEstimate {
    pub fn last(&self) -> &DepthRow {
        self.rows.last().expect("at least one depth")
    }
}

fn pair_weights(chain: &ChainMatrices, prior: RootPrior) -> Vec<f64> {
    let q = chain.q;
    let mut w = vec![0.0; q * q];
    for i in 0..q {
        for j in (i + 1)..q {
            let v = match prior {
                RootPrior::Stationary => chain.pi[i] * chain.pi[j],
                RootPrior::Uniform => 1.0,
                RootPrior::Fixed(s) => f64::from(u8::from(i == s || j == s)),
            };
            w[i * q + j] = v;
            w[j * q + i] = v;
        }
    }
    w
}

fn root_weights(chain: &ChainMatrices, prior: RootPrior) -> Vec<f64> {
    (0..chain.q)
        .map(|i| match prior {
            RootPrior::Stationary => chain.pi[i],
            RootPrior::Uniform => 1.0,
            RootPrior::Fixed(s) => f64::from(u8::from(i == s)),
        })
        .collect()
}

/// Pair-weighted average of an exact profile at `depth`.
pub fn weighted_exact(profile: &ExactProfile, depth: usize, chain: &ChainMatrices, prior: RootPrior) -> f64 {
    let q = chain.q;
    let w = pair_weights(chain, prior);
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..q {
        for j in (i + 1)..q {
            num += w[i * q + j] * profile.tv(depth, i, j);
            den += w[i * q + j];
        }
    }
    (num / den).clamp(0.0, 1.0)
}

/// Monte Carlo rows for depths `1..=config.depth`, ignoring `config.method`.
pub fn monte_carlo_rows(chain: &ChainMatrices, config: &SimConfig) -> Result<Vec<DepthRow>> {
    config.validate(chain.q)?;
    let per_sample = mc::sample_statistics(
        chain,
        config.arity,
        config.depth,
        config.samples,
        config.seed,
        config.estimator,
        &pair_weights(chain, config.root_prior),
        &root_weights(chain, config.root_prior),
    );
    Ok((1..=config.depth)
        .map(|d| {
            let values: Vec<f64> = per_sample.iter().map(|s| s[d - 1]).collect();
            let (mean, se) = mc::bootstrap(&values, config.bootstrap, config.seed, d as u64);
            DepthRow { depth: d, statistic: mean.clamp(0.0, 1.0), stderr: se, method: RowMethod::MonteCarlo }
        })
        .collect())
}

/// Statistic per depth `1..=config.depth` and the persistence decision.
pub fn estimate_reconstruction(chain: &ChainMatrices, config: &SimConfig) -> Result<ReconEstimate> {
    config.validate(chain.q)?;
    let exact_allowed = config.estimator == Estimator::LeafTv && config.method != Method::MonteCarlo;
    let profile = if exact_allowed {
        Some(exact_leaf_tv(chain, config.arity, config.depth, config.exact_budget))
    } else {
        None
    };
    let reached = profile.as_ref().map_or(0, |p| p.reached());
    if config.method == Method::Exact && reached < config.depth {
        return Err(Error::Budget(format!(
            "exact recursion stops at depth {reached} of {} within {} multisets",
            config.depth, config.exact_budget
        )));
    }
    let mc_rows = if reached < config.depth { Some(monte_carlo_rows(chain, config)?) } else { None };
    let rows: Vec<DepthRow> = (1..=config.depth)
        .map(|d| match &profile {
            Some(p) if d <= reached => DepthRow {
                depth: d,
                statistic: weighted_exact(p, d, chain, config.root_prior),
                stderr: 0.0,
                method: RowMethod::Exact,
            },
            _ => mc_rows.as_ref().expect("monte carlo rows")[d - 1],
        })
        .collect();
    let decision = decide(&rows, &config.rule);
    Ok(ReconEstimate { q: chain.q, estimator: config.estimator, rows, decision })
}

/// Applies the [`DecisionRule`]. Depth 0 counts as statistic 1 with no error.
pub fn decide(rows: &[DepthRow], rule: &DecisionRule) -> Decision {
    let Some(last) = rows.last() else {
        return Decision::Inconclusive;
    };
    let back = last.depth.min(2);
    let (s_prev, e_prev) = if last.depth == back {
        (1.0, 0.0)
    } else {
        rows.iter()
            .find(|r| r.depth == last.depth - back)
            .map_or((1.0, 0.0), |r| (r.statistic, r.stderr))
    };
    let c = rule.sigma_multiple;
    let (s, e) = (last.statistic, last.stderr);
    let optimistic = s + c * (e + e_prev);
    let decay = rule.decay_ratio.powi(back as i32);
    let persist = rule.persist_ratio.powi(back as i32);
    let resolved = s > c * e;
    if !resolved && e > 0.0 || s == 0.0 || optimistic < decay * s_prev {
        Decision::SignalDecays
    } else if resolved && optimistic >= persist * s_prev {
        Decision::SignalPersists
    } else {
        Decision::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::build_chain;
    use crate::model::{PottsParams, TisgmSolution};

    fn free(q: usize, theta: f64) -> ChainMatrices {
        build_chain(&PottsParams::new(q, 2, theta).unwrap(), &TisgmSolution::free(q, 1)).unwrap()
    }

    fn row(depth: usize, s: f64, e: f64) -> DepthRow {
        DepthRow { depth, statistic: s, stderr: e, method: RowMethod::MonteCarlo }
    }

    #[test]
    fn config_checks() {
        let c = SimConfig::default();
        assert!(c.validate(3).is_ok());
        assert!(SimConfig { samples: 99, ..c.clone() }.validate(3).is_err());
        assert!(SimConfig { depth: 0, ..c.clone() }.validate(3).is_err());
        assert!(matches!(SimConfig { depth: 24, ..c.clone() }.validate(3), Err(Error::Budget(_))));
        assert!(SimConfig { root_prior: RootPrior::Fixed(3), ..c }.validate(3).is_err());
    }

    #[test]
    fn decision_rule_cases() {
        let rule = DecisionRule::default();
        let flat = [row(1, 0.6, 0.01), row(2, 0.58, 0.01), row(3, 0.57, 0.01)];
        assert_eq!(decide(&flat, &rule), Decision::SignalPersists);
        let falling = [row(1, 0.4, 0.001), row(2, 0.2, 0.001), row(3, 0.1, 0.001)];
        assert_eq!(decide(&falling, &rule), Decision::SignalDecays);
        let noise = [row(1, 0.01, 0.01), row(2, 0.01, 0.01), row(3, 0.02, 0.01)];
        assert_eq!(decide(&noise, &rule), Decision::SignalDecays);
        let between = [row(1, 0.5, 0.0), row(2, 0.5, 0.0), row(3, 0.35, 0.0)];
        assert_eq!(decide(&between, &rule), Decision::Inconclusive);
    }

    #[test]
    fn exact_rows_when_affordable() {
        let c = free(3, 3.0);
        let cfg = SimConfig { depth: 3, ..SimConfig::default() };
        let est = estimate_reconstruction(&c, &cfg).unwrap();
        assert!(est.rows.iter().all(|r| r.method == RowMethod::Exact && r.stderr == 0.0));
        let s: Vec<f64> = est.rows.iter().map(|r| r.statistic).collect();
        assert!(s[0] > s[1] && s[1] > s[2]);
    }

    #[test]
    fn exact_method_errors_past_budget() {
        let c = free(3, 3.0);
        let cfg = SimConfig { depth: 6, method: Method::Exact, exact_budget: 10_000, ..SimConfig::default() };
        assert!(matches!(estimate_reconstruction(&c, &cfg), Err(Error::Budget(_))));
    }

    #[test]
    fn weak_channel_has_no_signal() {
        let c = free(3, 1.0 + 1e-9);
        let cfg = SimConfig { depth: 3, method: Method::MonteCarlo, samples: 200, ..SimConfig::default() };
        let est = estimate_reconstruction(&c, &cfg).unwrap();
        assert!(est.rows.iter().all(|r| r.statistic < 1e-6));
    }
}
