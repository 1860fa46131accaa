//! The coarse-grained chain read as an Ising model with an external field.
//!
//! The two-class chain of a TISGM is the tree-indexed Markov chain of an
//! Ising model with coupling `J′`, field `h′` and a translation-invariant
//! boundary law `s`. `J′` and `h′` depend on `(q, m, θ)` only; the solution
//! branch enters through `s`.

use nalgebra::Matrix2;
use serde::Serialize;

use crate::chains::ChainMatrices;
use crate::error::{Error, Result};
use crate::model::{PottsParams, TisgmSolution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsingImage {
    pub j_prime: f64,
    pub h_prime: f64,
    /// Ising boundary law `(m/(q−m))^{k/(k+1)} · z`.
    pub s: f64,
    /// Unnormalised transfer matrix `[[e^{J′+2h′/(k+1)}, e^{−J′}], [e^{−J′}, e^{J′−2h′/(k+1)}]]`.
    #[serde(skip)]
    pub q_hat: Matrix2<f64>,
    /// Row-normalised chain rebuilt from `(J′, h′, s)`.
    #[serde(skip)]
    pub p_hat: Matrix2<f64>,
    /// The block holds more than half of the spins.
    pub exceeds_half: bool,
}

impl IsingImage {
    /// One step of the homogeneous Ising boundary-law recursion,
    /// `s ↦ ((A s + B)/(B s + C))^k` with `Q̂ = [[A, B], [B, C]]`.
    pub fn recursion(&self, s: f64, k: usize) -> f64 {
        let (a, b, c) = (self.q_hat[(0, 0)], self.q_hat[(0, 1)], self.q_hat[(1, 1)]);
        ((a * s + b) / (b * s + c)).powi(k as i32)
    }

    /// Largest entrywise gap to another 2 × 2 matrix.
    pub fn deviation_from(&self, p_hat: &Matrix2<f64>) -> f64 {
        (self.p_hat - p_hat).amax()
    }
}

/// `(J′, h′)` of block size `m`; independent of the branch.
pub fn effective_couplings(params: &PottsParams, m: usize) -> Result<(f64, f64)> {
    params.check_block(m)?;
    let (q, t, mf, k) = (
        params.q() as f64,
        params.theta(),
        m as f64,
        params.k() as f64,
    );
    let j = ((t + mf - 1.0) * (t + q - mf - 1.0) / ((q - mf) * mf)).ln() / 4.0;
    // With s = (m/(q−m))^{k/(k+1)} z the ratio (z/s)² reduces to (m/(q−m))^{−2k/(k+1)}.
    let ratio = (mf / (q - mf)).powf(-2.0 * k / (k + 1.0));
    let h = (k + 1.0) / 4.0 * ((t + mf - 1.0) * mf / ((q - mf) * (t + q - mf - 1.0)) * ratio).ln();
    Ok((j, h))
}

/// Lifts a solution to its Ising image.
pub fn ising_lift(params: &PottsParams, sol: &TisgmSolution) -> Result<IsingImage> {
    params.check_block(sol.m)?;
    if !(sol.z.is_finite() && sol.z > 0.0) {
        return Err(Error::NonPositiveZ(sol.z));
    }
    let (q, mf, k) = (params.q() as f64, sol.m as f64, params.k() as f64);
    let s = (mf / (q - mf)).powf(k / (k + 1.0)) * sol.z;
    let (j, h) = effective_couplings(params, sol.m)?;
    let field = 2.0 * h / (k + 1.0);
    let q_hat = Matrix2::new(
        (j + field).exp(),
        (-j).exp(),
        (-j).exp(),
        (j - field).exp(),
    );
    let row1 = [q_hat[(0, 0)] * s, q_hat[(0, 1)]];
    let row2 = [q_hat[(1, 0)] * s, q_hat[(1, 1)]];
    let (n1, n2) = (row1[0] + row1[1], row2[0] + row2[1]);
    let p_hat = Matrix2::new(row1[0] / n1, row1[1] / n1, row2[0] / n2, row2[1] / n2);
    Ok(IsingImage {
        j_prime: j,
        h_prime: h,
        s,
        q_hat,
        p_hat,
        exceeds_half: sol.exceeds_half(),
    })
}

/// Lift plus the entrywise gap to the coarse graining of the chain.
pub fn ising_lift_checked(
    params: &PottsParams,
    sol: &TisgmSolution,
    chain: &ChainMatrices,
) -> Result<(IsingImage, f64)> {
    let img = ising_lift(params, sol)?;
    let dev = img.deviation_from(&chain.p_hat);
    Ok((img, dev))
}
