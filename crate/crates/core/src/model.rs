//! Potts instances, the boundary-law fixed-point equation and the TISGM census.
//!
//! A translation-invariant boundary law with `m` coordinates equal to `z` and
//! the remaining `q - m` equal to one is admissible iff `z = f_m(z)` with
//!
//! ```text
//! f_m(z) = ((θ+m−1)z + q−m)^k / (mz + q−m−1+θ)^k .
//! ```
//!
//! Writing `w = z^{1/k}`, the fixed points other than `z = 1` are the positive
//! roots of `Λ(w) = θ − 1` where `Λ(w) = (m w^k + q − m) / (w + w² + … + w^{k−1})`.
//! `Λ` blows up at both ends of `(0, ∞)` and has a single interior minimum, so
//! there are zero, one (the fold) or two such roots and they can always be
//! bracketed around the minimiser.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::roots::bisect;

/// Largest alphabet for which the census fits in `u128`.
pub const MAX_CENSUS_Q: usize = 120;

/// Relative residual accepted for a returned fixed point.
pub const FIXED_POINT_TOL: f64 = 1e-12;

/// A Potts model on the Cayley tree of order `k` with `θ = exp(Jβ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PottsParams {
    q: usize,
    k: usize,
    theta: f64,
}

impl PottsParams {
    pub fn new(q: usize, k: usize, theta: f64) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidParams(format!("q must be at least 2, got {q}")));
        }
        if k < 1 {
            return Err(Error::InvalidParams("k must be at least 1".into()));
        }
        if !(theta.is_finite() && theta > 1.0) {
            return Err(Error::InvalidParams(format!(
                "theta must be finite and > 1 (ferromagnetic), got {theta}"
            )));
        }
        Ok(Self { q, k, theta })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// The product `Jβ = ln θ`.
    pub fn coupling(&self) -> f64 {
        self.theta.ln()
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.q, self.k, theta)
    }

    /// `(q+k−1)/(k−1)`, where the lower branch crosses the free solution. Undefined for `k = 1`.
    pub fn theta_c(&self) -> Option<f64> {
        (self.k >= 2).then(|| (self.q + self.k - 1) as f64 / (self.k - 1) as f64)
    }

    /// Exact test `θ(k−1) = q+k−1`; both sides are small integers times a double.
    pub fn is_critical(&self) -> bool {
        self.k >= 2 && self.theta * (self.k - 1) as f64 == (self.q + self.k - 1) as f64
    }

    pub fn check_block(&self, m: usize) -> Result<()> {
        if m == 0 || m >= self.q {
            return Err(Error::BlockSize { m, max: self.q - 1 });
        }
        Ok(())
    }

    /// Fold temperature `θ_m` below which block size `m` has only the free solution.
    ///
    /// Closed form `1 + 2√(m(q−m))` for `k = 2`; the minimum of `1 + Λ` otherwise.
    /// `None` for `k = 1`, where no non-free solution ever exists.
    pub fn fold_theta(&self, m: usize) -> Result<Option<f64>> {
        self.check_block(m)?;
        Ok(match self.k {
            1 => None,
            2 => Some(1.0 + 2.0 * ((m * (self.q - m)) as f64).sqrt()),
            _ => Some(1.0 + LambdaCurve::new(self.q, self.k, m).fold().1),
        })
    }
}

/// Which fixed point of `f_m` a solution is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Free,
    Z1,
    Z2,
}

impl Branch {
    pub const ALL: [Branch; 3] = [Branch::Free, Branch::Z1, Branch::Z2];

    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Free => "free",
            Branch::Z1 => "z1",
            Branch::Z2 => "z2",
        }
    }

    /// The label of the same measure after exchanging the two spin classes.
    pub fn swapped(&self) -> Branch {
        match self {
            Branch::Free => Branch::Free,
            Branch::Z1 => Branch::Z2,
            Branch::Z2 => Branch::Z1,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "free" | "0" => Ok(Branch::Free),
            "z1" | "1" => Ok(Branch::Z1),
            "z2" | "2" => Ok(Branch::Z2),
            other => Err(Error::InvalidParams(format!(
                "unknown branch {other:?} (expected free, z1 or z2)"
            ))),
        }
    }
}

/// One translation-invariant boundary law `(z,…,z,1,…,1)` with `m` leading entries `z`.
///
/// The coordinates carrying `z` are always the first `m`; every other choice of
/// subset gives the same measure up to relabelling of spins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TisgmSolution {
    pub q: usize,
    pub m: usize,
    pub branch: Branch,
    pub z: f64,
    /// Coincides with another fixed point: the fold where `z1 = z2`, or the
    /// critical temperature where a branch meets the free solution.
    pub degenerate: bool,
}

impl TisgmSolution {
    pub fn free(q: usize, m: usize) -> Self {
        Self {
            q,
            m,
            branch: Branch::Free,
            z: 1.0,
            degenerate: false,
        }
    }

    /// Length-`q` boundary law.
    pub fn boundary_law(&self) -> Vec<f64> {
        (0..self.q).map(|i| if i < self.m { self.z } else { 1.0 }).collect()
    }

    /// Membership of each coordinate in the `z` block.
    pub fn subset_mask(&self) -> Vec<bool> {
        (0..self.q).map(|i| i < self.m).collect()
    }

    /// Fields `h_i = ln l_i − ln l_q`, `i = 1..q−1`.
    pub fn log_fields(&self) -> Vec<f64> {
        let h = self.z.ln();
        (0..self.q - 1).map(|i| if i < self.m { h } else { 0.0 }).collect()
    }

    /// More than half of the coordinates carry `z`; relabelling maps this to `q − m`.
    pub fn exceeds_half(&self) -> bool {
        2 * self.m > self.q
    }

    /// Relative fixed-point residual `|f_m(z) − z| / z`.
    pub fn residual(&self, params: &PottsParams) -> Result<f64> {
        Ok((f_m(params, self.m, self.z)? - self.z).abs() / self.z)
    }
}

fn check_z(z: f64) -> Result<()> {
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::NonPositiveZ(z));
    }
    Ok(())
}

/// `g(z) = ((θ+m−1)z + q−m) / (mz + q−m−1+θ)`, so that `f_m = g^k`.
pub fn g(params: &PottsParams, m: usize, z: f64) -> Result<f64> {
    params.check_block(m)?;
    check_z(z)?;
    let (q, t, mf) = (params.q as f64, params.theta, m as f64);
    Ok(((t + mf - 1.0) * z + q - mf) / (mf * z + q - mf - 1.0 + t))
}

/// The fixed-point map `f_m(z)`.
pub fn f_m(params: &PottsParams, m: usize, z: f64) -> Result<f64> {
    Ok(g(params, m, z)?.powi(params.k as i32))
}

/// `Λ(w) = (m w^k + q − m) / Σ_{j=1}^{k−1} w^j` for `k ≥ 2`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LambdaCurve {
    q: f64,
    k: i32,
    m: f64,
}

impl LambdaCurve {
    pub(crate) fn new(q: usize, k: usize, m: usize) -> Self {
        debug_assert!(k >= 2);
        Self {
            q: q as f64,
            k: k as i32,
            m: m as f64,
        }
    }

    fn parts(&self, w: f64) -> (f64, f64, f64, f64) {
        let num = self.m * w.powi(self.k) + self.q - self.m;
        let dnum = self.k as f64 * self.m * w.powi(self.k - 1);
        let (mut den, mut dden, mut p) = (0.0, 0.0, 1.0);
        for j in 1..self.k {
            dden += j as f64 * p;
            p *= w;
            den += p;
        }
        (num, dnum, den, dden)
    }

    pub(crate) fn value(&self, w: f64) -> f64 {
        let (n, _, d, _) = self.parts(w);
        n / d
    }

    /// Sign-carrying logarithmic derivative `N'/N − D'/D`.
    fn slope(&self, w: f64) -> f64 {
        let (n, dn, d, dd) = self.parts(w);
        dn / n - dd / d
    }

    /// Minimiser and minimum of `Λ`.
    pub(crate) fn fold(&self) -> (f64, f64) {
        if self.k == 2 {
            let w = ((self.q - self.m) / self.m).sqrt();
            return (w, 2.0 * (self.m * (self.q - self.m)).sqrt());
        }
        let mut lo = 1.0;
        while self.slope(lo) >= 0.0 {
            lo *= 0.5;
        }
        let mut hi = 1.0;
        while self.slope(hi) <= 0.0 {
            hi *= 2.0;
        }
        let w = bisect(|w| self.slope(w), lo, hi).unwrap_or(0.5 * (lo + hi));
        (w, self.value(w))
    }

    /// Roots of `Λ(w) = t` on either side of the minimiser.
    fn roots(&self, t: f64, w_star: f64) -> Result<(f64, f64)> {
        let h = |w: f64| self.value(w) - t;
        let mut lo = w_star;
        while h(lo) <= 0.0 {
            lo *= 0.5;
        }
        let mut hi = w_star;
        while h(hi) <= 0.0 {
            hi *= 2.0;
        }
        Ok((bisect(h, lo, w_star)?, bisect(h, w_star, hi)?))
    }
}

/// Tolerance on `θ − 1 − min Λ` inside which the two branches are treated as one.
fn fold_tolerance(lambda_min: f64) -> f64 {
    0.5e-12 * lambda_min.max(1.0)
}

/// Where `θ` sits relative to the fold of block size `m`, with the fold tolerance applied.
pub(crate) fn compare_to_fold(params: &PottsParams, m: usize) -> Result<Option<Ordering>> {
    params.check_block(m)?;
    if params.k == 1 {
        return Ok(None);
    }
    let t = params.theta - 1.0;
    let lmin = if params.k == 2 {
        // Squared form: (θ−1)² − 4m(q−m), exact in the integers on the right.
        let four_mqm = (4 * m * (params.q - m)) as f64;
        let d = t * t - four_mqm;
        let tol = 1e-12 * four_mqm.max(1.0);
        return Ok(Some(if d.abs() <= tol {
            Ordering::Equal
        } else if d < 0.0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }));
    } else {
        LambdaCurve::new(params.q, params.k, m).fold().1
    };
    let d = t - lmin;
    Ok(Some(if d.abs() <= fold_tolerance(lmin) {
        Ordering::Equal
    } else if d < 0.0 {
        Ordering::Less
    } else {
        Ordering::Greater
    }))
}

/// Raw non-free roots in `w = z^{1/k}`: `(w, branch, degenerate)`, ascending.
fn non_free_roots(params: &PottsParams, m: usize, closed_form: bool) -> Result<Vec<(f64, Branch, bool)>> {
    let q = params.q;
    let t = params.theta - 1.0;
    match compare_to_fold(params, m)? {
        None | Some(Ordering::Less) => Ok(Vec::new()),
        Some(Ordering::Equal) => {
            let w = if params.k == 2 && closed_form {
                t / (2.0 * m as f64)
            } else {
                LambdaCurve::new(q, params.k, m).fold().0
            };
            Ok(vec![(w, Branch::Z1, true)])
        }
        Some(Ordering::Greater) => {
            let (w1, w2) = if params.k == 2 && closed_form {
                let mf = m as f64;
                let disc = (t * t - (4 * m * (q - m)) as f64).max(0.0).sqrt();
                // The lower root in the form without cancellation.
                (2.0 * (q - m) as f64 / (t + disc), (t + disc) / (2.0 * mf))
            } else {
                let curve = LambdaCurve::new(q, params.k, m);
                curve.roots(t, curve.fold().0)?
            };
            Ok(vec![(w1, Branch::Z1, false), (w2, Branch::Z2, false)])
        }
    }
}

/// Non-free solutions of block size `m`, plus the branches that merged into the free one.
fn solve_block(params: &PottsParams, m: usize, closed_form: bool) -> Result<(Vec<TisgmSolution>, Vec<Branch>)> {
    let mut roots = non_free_roots(params, m, closed_form)?;
    let mut merged = Vec::new();
    if params.is_critical() && !roots.is_empty() {
        // At θ_c, w = 1 solves Λ(w) = θ − 1 exactly; the nearest root is that one.
        let idx = roots
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 .0 - 1.0).abs().total_cmp(&(b.1 .0 - 1.0).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (_, branch, degenerate) = roots.remove(idx);
        merged.push(branch);
        if degenerate {
            merged.push(Branch::Z2);
        }
    }
    let mut out = Vec::with_capacity(roots.len());
    for (w, branch, degenerate) in roots {
        let z = w.powi(params.k as i32);
        let sol = TisgmSolution {
            q: params.q,
            m,
            branch,
            z,
            degenerate,
        };
        let residual = sol.residual(params)?;
        if !(residual <= FIXED_POINT_TOL) {
            return Err(Error::Convergence {
                lo: z,
                hi: z,
                residual,
            });
        }
        out.push(sol);
    }
    Ok((out, merged))
}

fn with_free(params: &PottsParams, m: usize, mut sols: Vec<TisgmSolution>) -> Vec<TisgmSolution> {
    sols.push(TisgmSolution::free(params.q, m));
    sols.sort_by(|a, b| a.z.total_cmp(&b.z).then(a.branch.cmp(&b.branch)));
    sols
}

/// All positive fixed points of `f_m`, ascending in `z`.
///
/// Closed form for `k = 2`, bracketed bisection on `Λ` for `k ≥ 3`, free only
/// for `k = 1`. At the fold the double root is returned once as `Z1` with the
/// degenerate flag; at `θ_c` the branch through `z = 1` is absorbed by `Free`.
pub fn solve_boundary_laws(params: &PottsParams, m: usize) -> Result<Vec<TisgmSolution>> {
    let (sols, _) = solve_block(params, m, true)?;
    Ok(with_free(params, m, sols))
}

/// Same as [`solve_boundary_laws`] but always via root finding, also for `k = 2`.
pub fn solve_boundary_laws_numeric(params: &PottsParams, m: usize) -> Result<Vec<TisgmSolution>> {
    let (sols, _) = solve_block(params, m, false)?;
    Ok(with_free(params, m, sols))
}

/// The solution on a given branch.
///
/// At the fold, asking for `Z2` returns the double root; at `θ_c` the branch
/// through one returns `z = 1`. Both carry the degenerate flag and the
/// requested label.
pub fn solution_for(params: &PottsParams, m: usize, branch: Branch) -> Result<TisgmSolution> {
    params.check_block(m)?;
    if branch == Branch::Free {
        return Ok(TisgmSolution::free(params.q, m));
    }
    let (sols, merged) = solve_block(params, m, true)?;
    if let Some(s) = sols.iter().find(|s| s.branch == branch) {
        return Ok(*s);
    }
    if let Some(s) = sols.iter().find(|s| s.degenerate) {
        return Ok(TisgmSolution { branch, ..*s });
    }
    if merged.contains(&branch) {
        return Ok(TisgmSolution {
            branch,
            degenerate: true,
            ..TisgmSolution::free(params.q, m)
        });
    }
    Err(Error::BranchMissing {
        branch: branch.to_string(),
        q: params.q,
        k: params.k,
        m,
        theta: params.theta,
    })
}

/// `n` choose `r` in `u128`.
pub fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// One family of TISGMs sharing block size and branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TisgmFamily {
    pub solution: TisgmSolution,
    /// Number of distinct measures: subsets of size `m` of the first `q − 1`
    /// coordinates (the last coordinate is the gauge and always carries one).
    /// The free family has multiplicity one.
    pub multiplicity: u128,
    /// Number of size-`m` subsets of all `q` coordinates.
    pub permutations: u128,
}

/// Every TISGM of an instance, grouped into families.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Enumeration {
    pub params: PottsParams,
    pub families: Vec<TisgmFamily>,
    pub total: u128,
    /// Temperature regime (binary tree only).
    pub regime: Option<Regime>,
}

/// Enumerates all TISGMs with multiplicities.
///
/// A measure is a boundary law `(l_1,…,l_{q−1}, 1)` up to the gauge; the
/// families are the block sizes `m = 1..q−1` with every solution branch, each
/// counted once per subset of the first `q − 1` coordinates. The pair
/// `(m, z)` and `(q − m, 1/z)` describe one measure, and exactly one of them
/// has the gauge coordinate outside the block, so nothing is counted twice.
pub fn enumerate_tisgms(params: &PottsParams) -> Result<Enumeration> {
    let q = params.q;
    if q > MAX_CENSUS_Q {
        return Err(Error::InvalidParams(format!(
            "census limited to q <= {MAX_CENSUS_Q}, got {q}"
        )));
    }
    let mut families = vec![TisgmFamily {
        solution: TisgmSolution::free(q, 1),
        multiplicity: 1,
        permutations: 1,
    }];
    for m in 1..q {
        let (sols, _) = solve_block(params, m, true)?;
        for solution in sols {
            families.push(TisgmFamily {
                solution,
                multiplicity: binomial(q - 1, m),
                permutations: binomial(q, m),
            });
        }
    }
    let total = families.iter().map(|f| f.multiplicity).sum();
    let regime = if params.k == 2 { Some(Regime::of(params)?) } else { None };
    Ok(Enumeration {
        params: *params,
        families,
        total,
        regime,
    })
}

/// The five temperature regimes of the binary-tree census.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regime {
    /// Below the first fold: the free measure is the only TISGM.
    Unique,
    /// Strictly between the folds of `m` and `m + 1`, with `m < ⌊q/2⌋`.
    BetweenFolds { m: usize },
    /// Above every fold and away from `θ_c`.
    AboveFolds,
    /// `θ = q + 1`.
    Critical,
    /// At the fold of `m ≤ ⌊q/2⌋`, away from `θ_c`.
    AtFold { m: usize },
}

impl Regime {
    /// Regime of a binary-tree instance; fold comparisons use the squared form.
    pub fn of(params: &PottsParams) -> Result<Regime> {
        if params.k != 2 {
            return Err(Error::RequiresBinaryTree("the census regime"));
        }
        if params.is_critical() {
            return Ok(Regime::Critical);
        }
        let half = params.q / 2;
        let mut above = 0;
        for s in 1..=half {
            match compare_to_fold(params, s)? {
                Some(Ordering::Equal) => return Ok(Regime::AtFold { m: s }),
                Some(Ordering::Greater) => above = s,
                _ => break,
            }
        }
        Ok(match above {
            0 => Regime::Unique,
            s if s == half => Regime::AboveFolds,
            s => Regime::BetweenFolds { m: s },
        })
    }

    /// Number of TISGMs predicted for this regime.
    pub fn expected_count(&self, q: usize) -> u128 {
        let partial = |m: usize| (1..=m).map(|s| binomial(q, s)).sum::<u128>();
        match *self {
            Regime::Unique => 1,
            Regime::BetweenFolds { m } => 1 + 2 * partial(m),
            Regime::AboveFolds => (1u128 << q) - 1,
            Regime::Critical if q % 2 == 1 => 1u128 << (q - 1),
            Regime::Critical => (1u128 << (q - 1)) - binomial(q - 1, q / 2),
            Regime::AtFold { m } => 1 + binomial(q, m) + 2 * partial(m - 1),
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            Regime::Unique => "below the first fold: unique TISGM".into(),
            Regime::BetweenFolds { m } => format!("between the folds of m={m} and m={}", m + 1),
            Regime::AboveFolds => "above all folds, theta != q+1".into(),
            Regime::Critical => "theta = q+1".into(),
            Regime::AtFold { m } => format!("at the fold of m={m}"),
        }
    }
}

/// Iterates of `f_m` started from `a^k` and `A^k` with `a = (q−m)/(q+θ−m−1)`, `A = (θ+m−1)/m`.
///
/// Since `a < g < A` on `(0, ∞)`, every fixed point lies in `(a^k, A^k)` and
/// monotonicity of `f_m` keeps the iterates on either side of every fixed point.
pub fn iterate_bounds(params: &PottsParams, m: usize, n: usize) -> Result<(f64, f64)> {
    params.check_block(m)?;
    let (q, t, mf, k) = (params.q as f64, params.theta, m as f64, params.k as i32);
    let mut lo = ((q - mf) / (q + t - mf - 1.0)).powi(k);
    let mut hi = ((t + mf - 1.0) / mf).powi(k);
    for _ in 0..n {
        lo = f_m(params, m, lo)?;
        hi = f_m(params, m, hi)?;
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(q: usize, k: usize, t: f64) -> PottsParams {
        PottsParams::new(q, k, t).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(PottsParams::new(1, 2, 2.0).is_err());
        assert!(PottsParams::new(3, 0, 2.0).is_err());
        assert!(PottsParams::new(3, 2, 1.0).is_err());
        assert!(PottsParams::new(3, 2, f64::NAN).is_err());
        assert_eq!(p(3, 1, 2.0).theta_c(), None);
        assert_eq!(p(3, 2, 2.0).theta_c(), Some(4.0));
        assert!(p(8, 3, 5.0).is_critical());
    }

    #[test]
    fn free_is_always_fixed() {
        for q in 2..8 {
            for m in 1..q {
                let params = p(q, 2, 2.7);
                assert_relative_eq!(f_m(&params, m, 1.0).unwrap(), 1.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn fold_point_is_double_fixed_point() {
        let params = p(3, 2, 1.0 + 2.0 * 2f64.sqrt());
        assert_relative_eq!(f_m(&params, 1, 2.0).unwrap(), 2.0, max_relative = 1e-15);
        let sols = solve_boundary_laws(&params, 1).unwrap();
        assert_eq!(sols.len(), 2);
        assert!(sols[1].degenerate);
        assert_relative_eq!(sols[1].z, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn critical_branch_merges_into_free() {
        let params = p(5, 2, 6.0);
        let sols = solve_boundary_laws(&params, 1).unwrap();
        assert_eq!(sols.len(), 2);
        assert_eq!(sols[0].branch, Branch::Free);
        assert_eq!(sols[1].branch, Branch::Z2);
        assert_eq!(sols[1].z, 16.0);
        assert_relative_eq!(f_m(&params, 1, 16.0).unwrap(), 16.0, max_relative = 1e-15);
        let merged = solution_for(&params, 1, Branch::Z1).unwrap();
        assert_eq!(merged.z, 1.0);
        assert!(merged.degenerate);
    }

    #[test]
    fn unique_regime_has_free_only() {
        let sols = solve_boundary_laws(&p(3, 2, 3.0), 1).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].branch, Branch::Free);
        assert!(matches!(
            solution_for(&p(3, 2, 3.0), 1, Branch::Z1),
            Err(Error::BranchMissing { .. })
        ));
    }

    #[test]
    fn k_one_has_free_only() {
        let sols = solve_boundary_laws(&p(4, 1, 50.0), 1).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(p(4, 1, 50.0).fold_theta(1).unwrap(), None);
    }

    #[test]
    fn q8_theta9_has_crossing_above_one() {
        let params = p(8, 2, 9.0);
        assert!(params.is_critical());
        let sols = solve_boundary_laws(&params, 1).unwrap();
        assert_eq!(sols.len(), 2);
        assert!(sols[1].z > 1.0);
    }

    #[test]
    fn numeric_fold_matches_closed_form_for_binary_tree() {
        for q in 2..10 {
            for m in 1..q {
                let (w, l) = LambdaCurve::new(q, 2, m).fold();
                assert_relative_eq!(w * w, (q - m) as f64 / m as f64, max_relative = 1e-14);
                assert_relative_eq!(1.0 + l, p(q, 2, 2.0).fold_theta(m).unwrap().unwrap());
            }
        }
        // The generic minimiser for k = 2 must agree with the shortcut.
        let curve = LambdaCurve { q: 7.0, k: 2, m: 2.0 };
        let mut lo = 1.0;
        while curve.slope(lo) >= 0.0 {
            lo *= 0.5;
        }
        let w = bisect(|w| curve.slope(w), lo, 8.0).unwrap();
        assert_relative_eq!(w, (5.0f64 / 2.0).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn general_k_critical_root_is_one() {
        // Λ(1) = q/(k−1), so w = 1 is a root exactly at θ_c.
        for (q, k) in [(3, 3), (5, 4), (8, 3)] {
            let curve = LambdaCurve::new(q, k, 1);
            assert_relative_eq!(curve.value(1.0), q as f64 / (k - 1) as f64, max_relative = 1e-15);
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(100, 50), 100891344545564193334812497256);
    }

    #[test]
    fn regime_counts_examples() {
        let cases: [(usize, f64, u128); 4] = [(5, 8.0, 31), (5, 6.0, 16), (6, 7.0, 22), (4, 4.8, 9)];
        for (q, t, n) in cases {
            let e = enumerate_tisgms(&p(q, 2, t)).unwrap();
            assert_eq!(e.total, n, "q={q} theta={t}");
            assert_eq!(e.regime.unwrap().expected_count(q), n);
        }
        let at_fold = p(4, 2, 1.0 + 2.0 * 3f64.sqrt());
        assert_eq!(Regime::of(&at_fold).unwrap(), Regime::AtFold { m: 1 });
        assert_eq!(enumerate_tisgms(&at_fold).unwrap().total, 5);
    }

    #[test]
    fn iterate_bounds_start() {
        let (lo, hi) = iterate_bounds(&p(3, 2, 5.0), 1, 0).unwrap();
        assert_relative_eq!(lo, (2.0f64 / 6.0).powi(2));
        assert_relative_eq!(hi, 25.0);
        assert!(lo < 1.0 && hi > 1.0);
    }

    #[test]
    fn branch_parse_roundtrip() {
        for b in Branch::ALL {
            assert_eq!(b.to_string().parse::<Branch>().unwrap(), b);
        }
        assert_eq!("Z1".parse::<Branch>().unwrap(), Branch::Z1);
        assert!("z3".parse::<Branch>().is_err());
    }

    #[test]
    fn log_fields_layout() {
        let s = TisgmSolution {
            q: 4,
            m: 2,
            branch: Branch::Z2,
            z: 2f64.exp(),
            degenerate: false,
        };
        assert_eq!(s.log_fields(), vec![2.0, 2.0, 0.0]);
        assert_eq!(s.subset_mask(), vec![true, true, false, false]);
        assert_eq!(s.boundary_law()[3], 1.0);
    }
}
