//! Per-depth reconstruction tables.

use std::io::Write;

use potts_tisgm::recon::RowMethod;
use potts_tisgm::{
    build_chain, estimate_reconstruction, solution_for, Branch, Decision, Estimator, PottsParams,
    SimConfig,
};
use serde::Serialize;

use crate::error::Result;
use crate::point::{dec, Format};
use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimRow {
    pub q: usize,
    pub k: usize,
    pub m: usize,
    pub branch: Branch,
    pub theta: f64,
    pub z: f64,
    pub depth: usize,
    pub statistic: f64,
    pub stderr: f64,
    /// `root` for depth 0, otherwise `exact` or `monte_carlo`.
    pub method: &'static str,
    pub estimator: Estimator,
    pub decision: Decision,
    pub schema_version: u32,
}

pub const SIM_HEADER: [&str; 13] = [
    "q", "k", "m", "branch", "theta", "z", "depth", "statistic", "stderr", "method", "estimator",
    "decision", "schema_version",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub rows: Vec<SimRow>,
    pub decision: Decision,
}

/// Runs the probe on one measure. Depth 0 is answered directly: the root is observed.
///
/// `config.arity` is overwritten with `k`.
pub fn simulate(q: usize, k: usize, theta: f64, m: usize, branch: Branch, config: &SimConfig) -> Result<SimReport> {
    let params = PottsParams::new(q, k, theta)?;
    let sol = solution_for(&params, m, branch)?;
    let chain = build_chain(&params, &sol)?;
    let config = SimConfig { arity: k, ..config.clone() };
    let mut rows: Vec<(usize, f64, f64, &'static str)> = vec![(0, 1.0, 0.0, "root")];
    let decision = if config.depth == 0 {
        Decision::Inconclusive
    } else {
        let est = estimate_reconstruction(&chain, &config)?;
        rows.extend(est.rows.iter().map(|r| {
            let method = match r.method {
                RowMethod::Exact => "exact",
                RowMethod::MonteCarlo => "monte_carlo",
            };
            (r.depth, r.statistic, r.stderr, method)
        }));
        est.decision
    };
    let rows = rows
        .into_iter()
        .map(|(depth, statistic, stderr, method)| SimRow {
            q,
            k,
            m,
            branch,
            theta,
            z: sol.z,
            depth,
            statistic,
            stderr,
            method,
            estimator: config.estimator,
            decision,
            schema_version: SCHEMA_VERSION,
        })
        .collect();
    Ok(SimReport { rows, decision })
}

impl SimRow {
    fn record(&self) -> Vec<String> {
        vec![
            self.q.to_string(),
            self.k.to_string(),
            self.m.to_string(),
            self.branch.as_str().into(),
            dec(Some(self.theta)),
            dec(Some(self.z)),
            self.depth.to_string(),
            dec(Some(self.statistic)),
            dec(Some(self.stderr)),
            self.method.into(),
            match self.estimator {
                Estimator::LeafTv => "leaf_tv".into(),
                Estimator::MajorityAgreement => "majority_agreement".into(),
            },
            self.decision.as_str().into(),
            self.schema_version.to_string(),
        ]
    }
}

pub fn write_sim_rows<W: Write>(rows: &[SimRow], format: Format, out: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(out);
            w.write_record(SIM_HEADER)?;
            for r in rows {
                w.write_record(r.record())?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            let mut out = std::io::BufWriter::new(out);
            for r in rows {
                serde_json::to_writer(&mut out, r)?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
    }
    Ok(())
}
