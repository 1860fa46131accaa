//! Parsing of temperatures and branch labels, and decimal formatting.

use std::str::FromStr;

use clap::ValueEnum;
use potts_tisgm::{Branch, PottsParams};

use crate::error::{CliError, Result};

/// A temperature given as a number or as a named point of the phase diagram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaSpec {
    Value(f64),
    /// `fold:M`, the fold of block size `M`.
    Fold(usize),
    /// `critical`, the temperature where the lower branch crosses the free solution.
    Critical,
}

impl FromStr for ThetaSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("critical") {
            return Ok(ThetaSpec::Critical);
        }
        if let Some(m) = s.strip_prefix("fold:") {
            return m
                .parse()
                .map(ThetaSpec::Fold)
                .map_err(|_| format!("bad block size in '{s}'"));
        }
        s.parse()
            .map(ThetaSpec::Value)
            .map_err(|_| format!("expected a number, 'fold:M' or 'critical', got '{s}'"))
    }
}

impl ThetaSpec {
    pub fn resolve(&self, q: usize, k: usize) -> Result<f64> {
        match *self {
            ThetaSpec::Value(t) => Ok(t),
            ThetaSpec::Fold(m) => {
                // Any valid temperature will do; the fold does not depend on it.
                let p = PottsParams::new(q, k, 2.0)?;
                p.fold_theta(m)?
                    .ok_or_else(|| CliError::Usage(format!("no fold for k={k}")))
            }
            ThetaSpec::Critical => PottsParams::new(q, k, 2.0)?
                .theta_c()
                .ok_or_else(|| CliError::Usage(format!("no critical temperature for k={k}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    Free,
    Z1,
    Z2,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Free => Branch::Free,
            BranchArg::Z1 => Branch::Z1,
            BranchArg::Z2 => Branch::Z2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

/// 17 significant digits in scientific notation; empty for a missing value.
pub fn dec(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v:.16e}"),
        Some(v) if v.is_nan() => "nan".into(),
        Some(v) if v > 0.0 => "inf".into(),
        Some(_) => "-inf".into(),
        None => String::new(),
    }
}
