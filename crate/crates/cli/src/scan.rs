//! Temperature scans: one row per `(θ, m, branch)` grid point plus threshold markers.

use std::cmp::Ordering;
use std::io::Write;

use potts_tisgm::extremality::canonical_form;
use potts_tisgm::{
    build_chain, classify, critical_thresholds, solve_boundary_laws, Branch, ChainMatrices,
    ExtremalityVerdict, GammaMode, PottsParams, TisgmSolution, Verdict,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::point::{dec, Format};
use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    Point,
    Threshold,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub q: usize,
    pub k: usize,
    pub m: usize,
    pub branch: Option<Branch>,
    pub theta: f64,
    pub z: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub lambda2_hat: Option<f64>,
    pub lambda_hat: Option<f64>,
    pub ks_value: Option<f64>,
    pub martin_value: Option<f64>,
    pub kappa: Option<f64>,
    pub gamma_bound: Option<f64>,
    pub msw_value: Option<f64>,
    pub verdict: Option<Verdict>,
    /// Region name for a point, threshold name for a marker.
    pub region_annotation: String,
    pub row_kind: RowKind,
    pub schema_version: u32,
}

pub const HEADER: [&str; 19] = [
    "q", "k", "m", "branch", "theta", "z", "a", "b", "lambda2_hat", "lambda_hat", "ks_value",
    "martin_value", "kappa", "gamma_bound", "msw_value", "verdict", "region_annotation",
    "row_kind", "schema_version",
];

impl ScanRow {
    /// Row of a classified point; `chain` is the chain of the canonical form of `sol`.
    pub fn point(params: &PottsParams, sol: &TisgmSolution, v: &ExtremalityVerdict, chain: &ChainMatrices) -> Self {
        let s = &chain.spectrum;
        ScanRow {
            q: params.q(),
            k: params.k(),
            m: sol.m,
            branch: Some(sol.branch),
            theta: params.theta(),
            z: Some(sol.z),
            a: (s.a_multiplicity > 0).then_some(s.a),
            b: (s.b_multiplicity > 0).then_some(s.b),
            lambda2_hat: Some(s.lambda2_hat),
            lambda_hat: Some(chain.lambda_hat()),
            ks_value: Some(v.ks.full),
            martin_value: Some(v.martin.value),
            kappa: Some(v.msw.kappa),
            gamma_bound: Some(v.msw.gamma_bound),
            msw_value: Some(v.msw.value),
            verdict: Some(v.verdict),
            region_annotation: v.region.map(|r| r.as_str().to_string()).unwrap_or_default(),
            row_kind: RowKind::Point,
            schema_version: SCHEMA_VERSION,
        }
    }

    fn marker(q: usize, k: usize, m: usize, name: &str, theta: f64, z: Option<f64>) -> Self {
        ScanRow {
            q,
            k,
            m,
            branch: None,
            theta,
            z,
            a: None,
            b: None,
            lambda2_hat: None,
            lambda_hat: None,
            ks_value: None,
            martin_value: None,
            kappa: None,
            gamma_bound: None,
            msw_value: None,
            verdict: None,
            region_annotation: name.to_string(),
            row_kind: RowKind::Threshold,
            schema_version: SCHEMA_VERSION,
        }
    }

    pub fn record(&self) -> Vec<String> {
        vec![
            self.q.to_string(),
            self.k.to_string(),
            self.m.to_string(),
            self.branch.map(|b| b.as_str().to_string()).unwrap_or_default(),
            dec(Some(self.theta)),
            dec(self.z),
            dec(self.a),
            dec(self.b),
            dec(self.lambda2_hat),
            dec(self.lambda_hat),
            dec(self.ks_value),
            dec(self.martin_value),
            dec(self.kappa),
            dec(self.gamma_bound),
            dec(self.msw_value),
            self.verdict.map(|v| v.as_str().to_string()).unwrap_or_default(),
            self.region_annotation.clone(),
            match self.row_kind {
                RowKind::Point => "point".into(),
                RowKind::Threshold => "threshold".into(),
            },
            self.schema_version.to_string(),
        ]
    }

    fn sort_key(&self) -> (usize, u8) {
        let rank = match (self.row_kind, self.branch) {
            (RowKind::Threshold, _) | (_, None) => 3,
            (_, Some(Branch::Free)) => 0,
            (_, Some(Branch::Z1)) => 1,
            (_, Some(Branch::Z2)) => 2,
        };
        (self.m, rank)
    }
}

fn row_order(x: &ScanRow, y: &ScanRow) -> Ordering {
    x.sort_key()
        .cmp(&y.sort_key())
        .then(x.theta.total_cmp(&y.theta))
        .then_with(|| x.region_annotation.cmp(&y.region_annotation))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub q: usize,
    pub k: usize,
    pub theta_min: f64,
    pub theta_max: f64,
    /// Number of intervals; the grid has `steps + 1` points including both ends.
    pub steps: usize,
    /// Restrict to one block size.
    pub m: Option<usize>,
    /// Include `m > q/2`, which repeat the measures of `q − m` with the classes swapped.
    pub all_blocks: bool,
    pub markers: bool,
    pub mode: GammaMode,
}

impl ScanSpec {
    pub fn new(q: usize, k: usize, theta_min: f64, theta_max: f64, steps: usize) -> Self {
        ScanSpec {
            q,
            k,
            theta_min,
            theta_max,
            steps,
            m: None,
            all_blocks: false,
            markers: true,
            mode: GammaMode::Capped,
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        let span = self.theta_max - self.theta_min;
        (0..=self.steps)
            .map(|i| {
                if i == self.steps {
                    self.theta_max
                } else {
                    self.theta_min + span * i as f64 / self.steps as f64
                }
            })
            .collect()
    }

    fn blocks(&self) -> Vec<usize> {
        match self.m {
            Some(m) => vec![m],
            None if self.all_blocks => (1..self.q).collect(),
            None => (1..=self.q / 2).collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.theta_min > 1.0 && self.theta_max >= self.theta_min && self.theta_max.is_finite()) {
            return Err(CliError::Usage(format!(
                "need 1 < theta_min <= theta_max, got [{}, {}]",
                self.theta_min, self.theta_max
            )));
        }
        if self.steps == 0 {
            return Err(CliError::Usage("steps must be positive".into()));
        }
        PottsParams::new(self.q, self.k, self.theta_min)?;
        if let Some(m) = self.m {
            PottsParams::new(self.q, self.k, self.theta_min)?.check_block(m)?;
        }
        Ok(())
    }
}

/// Classified rows of one temperature, every block size and branch.
pub fn rows_at(params: &PottsParams, blocks: &[usize], mode: GammaMode) -> Result<Vec<ScanRow>> {
    let mut out = Vec::new();
    for &m in blocks {
        for sol in solve_boundary_laws(params, m)? {
            out.push(classified_row(params, &sol, mode)?);
        }
    }
    Ok(out)
}

/// One row, computed exactly as `classify` does for the same point.
pub fn classified_row(params: &PottsParams, sol: &TisgmSolution, mode: GammaMode) -> Result<ScanRow> {
    let v = classify(params, sol, mode)?;
    let chain = build_chain(params, &canonical_form(params, sol)?)?;
    Ok(ScanRow::point(params, sol, &v, &chain))
}

fn markers(spec: &ScanSpec) -> Result<Vec<ScanRow>> {
    let (q, k) = (spec.q, spec.k);
    let params = PottsParams::new(q, k, spec.theta_min)?;
    let inside = |t: f64| t >= spec.theta_min && t <= spec.theta_max;
    let mut out = Vec::new();
    for m in spec.blocks() {
        let th = critical_thresholds(&params, m)?;
        let fold_z = (k == 2).then(|| (q - m) as f64 / m as f64);
        let named = [
            ("theta_m", Some(th.theta_m), fold_z),
            ("theta_c", Some(th.theta_c), None),
            ("theta_0", th.theta_0, None),
            ("theta_hat_0", th.theta_hat_0, None),
            ("theta_hat", th.theta_hat, None),
            ("theta_star", th.theta_star, None),
            ("theta_bar", th.theta_bar, None),
            ("theta_barbar", th.theta_barbar, None),
            ("theta_double_star", th.theta_double_star, None),
            ("theta_breve", th.theta_breve, None),
            ("theta_grave", th.theta_grave, None),
            ("theta_acute", th.theta_acute, None),
        ];
        for (name, t, z) in named {
            if let Some(t) = t.filter(|&t| inside(t)) {
                out.push(ScanRow::marker(q, k, m, name, t, z));
            }
        }
    }
    Ok(out)
}

/// All rows of a scan, sorted by `(m, branch, θ)` with markers after the branches.
pub fn scan_rows(spec: &ScanSpec) -> Result<Vec<ScanRow>> {
    spec.validate()?;
    let blocks = spec.blocks();
    let per_theta: Vec<Result<Vec<ScanRow>>> = spec
        .grid()
        .into_par_iter()
        .map(|t| rows_at(&PottsParams::new(spec.q, spec.k, t)?, &blocks, spec.mode))
        .collect();
    let mut rows = Vec::new();
    for r in per_theta {
        rows.extend(r?);
    }
    if spec.markers {
        rows.extend(markers(spec)?);
    }
    rows.sort_by(row_order);
    Ok(rows)
}

pub fn write_rows<W: Write>(rows: &[ScanRow], format: Format, out: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(out);
            w.write_record(HEADER)?;
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
