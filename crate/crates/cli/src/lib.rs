//! Command-line front end for the Potts TISGM library.
//!
//! `classify` prints the verdict for one measure, `scan` writes every measure
//! along a temperature grid together with threshold markers, `simulate` runs
//! the reconstruction probe, `counts` and `thresholds` print the census and
//! the critical temperatures. Tabular output is CSV with 17 significant digits
//! or JSON lines; rows are sorted before writing, so the worker count never
//! shows in the output.

pub mod args;
pub mod error;
pub mod point;
pub mod report;
pub mod scan;
pub mod simulate;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use potts_tisgm::recon::{DEFAULT_EXACT_BUDGET, DEFAULT_NODE_BUDGET};
use potts_tisgm::{Estimator, GammaMode, Method, RootPrior, SimConfig};

pub use args::{Cli, Command};
pub use error::{CliError, Result};
pub use point::{Format, ThetaSpec};
pub use report::{classify_point, count_tisgms, threshold_table};
pub use scan::{scan_rows, write_rows, ScanRow, ScanSpec};
pub use simulate::{simulate, write_sim_rows, SimReport, SimRow};

/// Stamped on every row; bumped whenever a column changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

fn mode(paper_exact: bool) -> GammaMode {
    if paper_exact {
        GammaMode::PaperExact
    } else {
        GammaMode::Capped
    }
}

fn with_sink<F>(path: Option<&Path>, stdout: &mut dyn Write, f: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|source| CliError::Create { path: p.to_path_buf(), source })?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => f(stdout),
    }
}

/// Runs one parsed command, writing to `stdout` unless `--out` redirects it.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build()?;
    let mut buf = Vec::new();
    pool.install(|| run(&cli.command, &mut buf))?;
    stdout.write_all(&buf)?;
    Ok(())
}

fn run(command: &Command, stdout: &mut Vec<u8>) -> Result<()> {
    match command {
        Command::Classify(a) => {
            let (q, k) = (a.model.q, a.model.k);
            let theta = a.measure.theta.resolve(q, k)?;
            let r = classify_point(q, k, theta, a.measure.m, a.measure.branch.into(), mode(a.paper_exact))?;
            if a.json {
                serde_json::to_writer(&mut *stdout, &r)?;
                writeln!(stdout)?;
            } else {
                write!(stdout, "{}", r.human())?;
            }
        }
        Command::Scan(a) => {
            let spec = ScanSpec {
                m: a.m,
                all_blocks: a.all_blocks,
                markers: !a.no_markers,
                mode: mode(a.paper_exact),
                ..ScanSpec::new(a.model.q, a.model.k, a.theta_min, a.theta_max, a.steps)
            };
            let rows = scan_rows(&spec)?;
            with_sink(a.output.out.as_deref(), stdout, |w| write_rows(&rows, a.output.format, w))?;
        }
        Command::Simulate(a) => {
            let (q, k) = (a.model.q, a.model.k);
            let theta = a.measure.theta.resolve(q, k)?;
            let root_prior = match (a.root_spin, a.root_prior) {
                (Some(s), _) if (1..=q).contains(&s) => RootPrior::Fixed(s - 1),
                (Some(s), _) => return Err(CliError::Usage(format!("root spin {s} outside 1..={q}"))),
                (None, args::PriorArg::Stationary) => RootPrior::Stationary,
                (None, args::PriorArg::Uniform) => RootPrior::Uniform,
            };
            let config = SimConfig {
                depth: a.depth,
                samples: a.samples,
                seed: a.seed,
                root_prior,
                estimator: match a.estimator {
                    args::EstimatorArg::LeafTv => Estimator::LeafTv,
                    args::EstimatorArg::Majority => Estimator::MajorityAgreement,
                },
                arity: k,
                method: match a.method {
                    args::MethodArg::Auto => Method::Auto,
                    args::MethodArg::Exact => Method::Exact,
                    args::MethodArg::Mc => Method::MonteCarlo,
                },
                node_budget: a.node_budget.unwrap_or(DEFAULT_NODE_BUDGET),
                exact_budget: a.exact_budget.unwrap_or(DEFAULT_EXACT_BUDGET),
                bootstrap: a.bootstrap,
                ..SimConfig::default()
            };
            let report = simulate(q, k, theta, a.measure.m, a.measure.branch.into(), &config)?;
            match &a.output.out {
                Some(p) => {
                    with_sink(Some(p), stdout, |w| write_sim_rows(&report.rows, a.output.format, w))?;
                    writeln!(stdout, "decision: {}", report.decision.as_str())?;
                }
                None => write_sim_rows(&report.rows, a.output.format, &mut *stdout)?,
            }
        }
        Command::Counts(a) => {
            let (q, k) = (a.model.q, a.model.k);
            let r = count_tisgms(q, k, a.theta.resolve(q, k)?)?;
            if a.json {
                serde_json::to_writer(&mut *stdout, &r)?;
                writeln!(stdout)?;
            } else {
                write!(stdout, "{}", r.human())?;
            }
        }
        Command::Thresholds(a) => {
            let r = threshold_table(a.model.q, a.model.k, a.m)?;
            if a.json {
                serde_json::to_writer(&mut *stdout, &r)?;
                writeln!(stdout)?;
            } else {
                write!(stdout, "{}", r.human())?;
            }
        }
    }
    Ok(())
}
