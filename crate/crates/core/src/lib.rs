//! Translation-invariant splitting Gibbs measures (TISGMs) of the ferromagnetic
//! q-state Potts model on a Cayley tree.
//!
//! The crate solves the boundary-law fixed-point equation for every block size,
//! builds the tree-indexed Markov chain of each solution together with its
//! two-class coarse graining, lifts that coarse graining to an Ising model with
//! an external field, and classifies every measure with the Kesten-Stigum,
//! Martin and disagreement-percolation (MSW) criteria. A broadcast simulator
//! offers an empirical look at reconstruction on finite trees.
//!
//! ```
//! use potts_tisgm::{PottsParams, Branch, solution_for, classify, GammaMode, Verdict};
//!
//! let params = PottsParams::new(3, 2, 7.0).unwrap();
//! let sol = solution_for(&params, 1, Branch::Z1).unwrap();
//! let v = classify(&params, &sol, GammaMode::Capped).unwrap();
//! assert_eq!(v.verdict, Verdict::NonExtremeKs);
//! ```

pub mod chains;
pub mod error;
pub mod extremality;
pub mod ising;
pub mod model;
pub mod recon;
pub mod roots;
pub mod thresholds;

pub use chains::{build_chain, verify_fuzzy_projection, ChainMatrices, ProjectionCheck, Spectrum};
pub use error::{Error, Result};
pub use extremality::{
    classify, count_extremal_lower_bound, kesten_stigum, martin_condition, msw_bound,
    ExtremalityVerdict, GammaKind, GammaMode, KsValues, MartinValue, MswBound, Region, Verdict,
};
pub use extremality::gamma::{verify_gamma_bounds, GammaCheck, KFunctions};
pub use ising::{ising_lift, IsingImage};
pub use model::{
    enumerate_tisgms, f_m, iterate_bounds, solution_for, solve_boundary_laws, Branch,
    Enumeration, PottsParams, Regime, TisgmFamily, TisgmSolution,
};
pub use thresholds::{critical_thresholds, CriticalThresholds};
pub use recon::{
    broadcast_sample, decide, estimate_reconstruction, Decision, DecisionRule, DepthRow, Estimator,
    Method, ReconEstimate, RootPrior, SimConfig,
};
