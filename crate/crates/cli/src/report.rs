//! Single-point reports: classification, census counts and thresholds.

use std::fmt::Write as _;

use potts_tisgm::thresholds::fuzzy_ks_peak;
use potts_tisgm::{
    classify, critical_thresholds, enumerate_tisgms, solution_for, Branch, CriticalThresholds,
    ExtremalityVerdict, GammaMode, PottsParams, Regime,
};
use serde::Serialize;

use crate::error::Result;
use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyReport {
    pub q: usize,
    pub k: usize,
    pub theta: f64,
    pub gamma_mode: GammaMode,
    #[serde(flatten)]
    pub verdict: ExtremalityVerdict,
    pub region_description: Option<&'static str>,
    pub schema_version: u32,
}

pub fn classify_point(q: usize, k: usize, theta: f64, m: usize, branch: Branch, mode: GammaMode) -> Result<ClassifyReport> {
    let params = PottsParams::new(q, k, theta)?;
    let sol = solution_for(&params, m, branch)?;
    let verdict = classify(&params, &sol, mode)?;
    Ok(ClassifyReport {
        q,
        k,
        theta,
        gamma_mode: mode,
        region_description: verdict.region.map(|r| r.describe()),
        verdict,
        schema_version: SCHEMA_VERSION,
    })
}

impl ClassifyReport {
    pub fn human(&self) -> String {
        let v = &self.verdict;
        let mut s = String::new();
        let _ = writeln!(s, "q={} k={} theta={} m={} branch={} z={}", self.q, self.k, self.theta, v.m, v.branch, v.z);
        if v.canonical_m != v.m {
            let _ = writeln!(s, "same measure as m={} branch={} z={}", v.canonical_m, v.canonical_branch, v.canonical_z);
        }
        let _ = writeln!(s, "verdict: {}", v.verdict);
        match (v.region, self.region_description) {
            (Some(r), Some(d)) => {
                let _ = writeln!(s, "region: {r} ({d})");
            }
            _ => {
                let _ = writeln!(s, "region: none");
            }
        }
        let _ = writeln!(s, "kesten-stigum: k*lambda^2 = {:.10} (coarse-grained {:.10})", v.ks.full, v.ks.fuzzy);
        let cap = if v.msw.gamma_capped { ", capped at 1" } else { "" };
        let _ = writeln!(
            s,
            "msw: k*kappa*gamma = {:.10} (kappa {:.10}, gamma bound {:.10}{cap})",
            v.msw.value, v.msw.kappa, v.msw.gamma_bound
        );
        let fuzzy = if v.martin.holds { "coarse-grained chain extreme" } else { "no conclusion" };
        let _ = writeln!(s, "martin: {:.10} ({fuzzy})", v.martin.value);
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyLine {
    pub m: usize,
    pub branch: Branch,
    pub z: f64,
    pub degenerate: bool,
    pub multiplicity: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport {
    pub q: usize,
    pub k: usize,
    pub theta: f64,
    pub regime: Option<Regime>,
    pub regime_description: Option<String>,
    pub total: u128,
    /// Count predicted by the regime formula; `None` off the binary tree.
    pub expected: Option<u128>,
    pub families: Vec<FamilyLine>,
    pub schema_version: u32,
}

pub fn count_tisgms(q: usize, k: usize, theta: f64) -> Result<CountReport> {
    let params = PottsParams::new(q, k, theta)?;
    let census = enumerate_tisgms(&params)?;
    Ok(CountReport {
        q,
        k,
        theta,
        regime: census.regime,
        regime_description: census.regime.map(|r| r.describe()),
        total: census.total,
        expected: census.regime.map(|r| r.expected_count(q)),
        families: census
            .families
            .iter()
            .map(|f| FamilyLine {
                m: f.solution.m,
                branch: f.solution.branch,
                z: f.solution.z,
                degenerate: f.solution.degenerate,
                multiplicity: f.multiplicity,
            })
            .collect(),
        schema_version: SCHEMA_VERSION,
    })
}

impl CountReport {
    pub fn human(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "q={} k={} theta={}", self.q, self.k, self.theta);
        if let Some(d) = &self.regime_description {
            let _ = writeln!(s, "regime: {d}");
        }
        let _ = writeln!(s, "tisgms: {}", self.total);
        for f in &self.families {
            let _ = writeln!(s, "  m={:<3} {:<4} z={:<24} x{}", f.m, f.branch.to_string(), f.z.to_string(), f.multiplicity);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdLine {
    #[serde(flatten)]
    pub thresholds: CriticalThresholds,
    /// Location and value of the maximum of the coarse-grained lower-branch margin.
    pub fuzzy_ks_peak: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub lines: Vec<ThresholdLine>,
    pub schema_version: u32,
}

pub fn threshold_table(q: usize, k: usize, m: Option<usize>) -> Result<ThresholdReport> {
    let params = PottsParams::new(q, k, 2.0)?;
    let blocks: Vec<usize> = match m {
        Some(m) => vec![m],
        None => (1..=q / 2).collect(),
    };
    let mut lines = Vec::new();
    for m in blocks {
        let thresholds = critical_thresholds(&params, m)?;
        let peak = if k == 2 { fuzzy_ks_peak(q, m).ok() } else { None };
        lines.push(ThresholdLine { thresholds, fuzzy_ks_peak: peak });
    }
    Ok(ThresholdReport { lines, schema_version: SCHEMA_VERSION })
}

impl ThresholdReport {
    pub fn human(&self) -> String {
        let mut s = String::new();
        for l in &self.lines {
            let t = &l.thresholds;
            let _ = writeln!(s, "q={} k={} m={}", t.q, t.k, t.m);
            let named = [
                ("theta_m", Some(t.theta_m)),
                ("theta_c", Some(t.theta_c)),
                ("theta_0", t.theta_0),
                ("theta_hat_0", t.theta_hat_0),
                ("theta_hat", t.theta_hat),
                ("theta_star", t.theta_star),
                ("theta_bar", t.theta_bar),
                ("theta_barbar", t.theta_barbar),
                ("theta_double_star", t.theta_double_star),
                ("theta_breve", t.theta_breve),
                ("theta_grave", t.theta_grave),
                ("theta_acute", t.theta_acute),
            ];
            for (name, v) in named {
                if let Some(v) = v {
                    let _ = writeln!(s, "  {name:<18} {v:.12}");
                }
            }
        }
        s
    }
}
