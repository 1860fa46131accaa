//! Transition matrix of a TISGM, its two-class coarse graining and their spectra.

use nalgebra::{DMatrix, DVector, Matrix2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{PottsParams, TisgmSolution};

/// Relative fixed-point residual tolerated before the closed-form spectrum is refused.
const CHAIN_RESIDUAL_TOL: f64 = 1e-10;

/// Eigenvalues of `P` other than one, with multiplicities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spectrum {
    /// `(θ−1)z/Z₁`, multiplicity `m − 1`.
    pub a: f64,
    pub a_multiplicity: usize,
    /// `(θ−1)z^{1/k}/Z₁`, multiplicity `q − m − 1`.
    pub b: f64,
    pub b_multiplicity: usize,
    /// Second eigenvalue of the coarse-grained chain, `[θ−1+(1−z^{1/k})m]z/Z₁`.
    pub lambda2_hat: f64,
}

impl Spectrum {
    /// The full multiset `{1, a^(m−1), b^(q−m−1), λ₂}`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v = vec![1.0, self.lambda2_hat];
        v.extend(std::iter::repeat(self.a).take(self.a_multiplicity));
        v.extend(std::iter::repeat(self.b).take(self.b_multiplicity));
        v
    }

    /// Second-largest eigenvalue modulus among the eigenvalues actually present.
    pub fn lambda_hat(&self) -> f64 {
        let mut l = self.lambda2_hat.abs();
        if self.a_multiplicity > 0 {
            l = l.max(self.a.abs());
        }
        if self.b_multiplicity > 0 {
            l = l.max(self.b.abs());
        }
        l
    }
}

/// The chain of one TISGM.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainMatrices {
    pub q: usize,
    pub m: usize,
    pub theta: f64,
    pub z: f64,
    /// Row-stochastic `q × q` transition matrix.
    pub p: DMatrix<f64>,
    /// Row-stochastic coarse graining onto the classes `{1..m}` and `{m+1..q}`.
    pub p_hat: Matrix2<f64>,
    /// Stationary distribution of `p`.
    pub pi: DVector<f64>,
    pub spectrum: Spectrum,
    /// Normalisers `Z₁ = (θ+m−1)z + q−m` and `Z₂ = mz + θ+q−m−1`.
    pub norm_upper: f64,
    pub norm_lower: f64,
}

impl ChainMatrices {
    pub fn lambda_hat(&self) -> f64 {
        self.spectrum.lambda_hat()
    }

    /// Class of spin `i` (0-based): `0` for the `z` block, `1` otherwise.
    pub fn class_of(&self, i: usize) -> usize {
        usize::from(i >= self.m)
    }
}

/// Builds `P`, `P̂`, `π` and the closed-form spectrum for a solution.
pub fn build_chain(params: &PottsParams, sol: &TisgmSolution) -> Result<ChainMatrices> {
    params.check_block(sol.m)?;
    if sol.q != params.q() {
        return Err(Error::InvalidParams(format!(
            "solution is for q={}, params have q={}",
            sol.q,
            params.q()
        )));
    }
    let residual = sol.residual(params)?;
    if !(residual <= CHAIN_RESIDUAL_TOL) {
        return Err(Error::NotFixedPoint { z: sol.z, residual });
    }
    let (q, m, z, t) = (params.q(), sol.m, sol.z, params.theta());
    let (qf, mf) = (q as f64, m as f64);
    let z1 = (t + mf - 1.0) * z + qf - mf;
    let z2 = mf * z + t + qf - mf - 1.0;

    let p = DMatrix::from_fn(q, q, |i, j| {
        let weight = if j < m { z } else { 1.0 };
        let diag = if i == j { t } else { 1.0 };
        weight * diag / if i < m { z1 } else { z2 }
    });
    let p_hat = Matrix2::new(
        (t + mf - 1.0) * z / z1,
        (qf - mf) / z1,
        mf * z / z2,
        (t + qf - mf - 1.0) / z2,
    );
    // Reversible with respect to π_i ∝ l_i · (row normaliser of i).
    let pi = DVector::from_fn(q, |i, _| if i < m { z * z1 } else { z2 });
    let pi = &pi / pi.sum();

    let w = z.powf(1.0 / params.k() as f64);
    let spectrum = Spectrum {
        a: (t - 1.0) * z / z1,
        a_multiplicity: m - 1,
        b: (t - 1.0) * w / z1,
        b_multiplicity: q - m - 1,
        lambda2_hat: (t - 1.0 + (1.0 - w) * mf) * z / z1,
    };
    Ok(ChainMatrices {
        q,
        m,
        theta: t,
        z,
        p,
        p_hat,
        pi,
        spectrum,
        norm_upper: z1,
        norm_lower: z2,
    })
}

/// The `q × q` transition matrix alone.
pub fn transition_matrix(params: &PottsParams, sol: &TisgmSolution) -> Result<DMatrix<f64>> {
    Ok(build_chain(params, sol)?.p)
}

/// Result of checking that `P` lumps onto `P̂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionCheck {
    pub consistent: bool,
    pub max_deviation: f64,
}

/// Deviation above which the lumping identity is reported as broken.
pub const PROJECTION_TOL: f64 = 1e-12;

/// Checks `P·L = L·P̂` and `Lᵀ·diag(π)·P·L = diag(π̂)·P̂` for the class indicator `L`.
///
/// The first identity says every row of `P` sums, class by class, to the row of
/// `P̂` of its own class; the second that `P̂` is the chain seen through the
/// classes under stationarity.
pub fn verify_fuzzy_projection(chain: &ChainMatrices, m: usize) -> ProjectionCheck {
    let q = chain.p.nrows();
    let mut dev: f64 = 0.0;
    let mut flow = Matrix2::<f64>::zeros();
    let mut mass = [0.0; 2];
    for i in 0..q {
        let ci = usize::from(i >= m);
        let mut sums = [0.0; 2];
        for j in 0..q {
            sums[usize::from(j >= m)] += chain.p[(i, j)];
        }
        for c in 0..2 {
            dev = dev.max((sums[c] - chain.p_hat[(ci, c)]).abs());
            flow[(ci, c)] += chain.pi[i] * sums[c];
        }
        mass[ci] += chain.pi[i];
    }
    for r in 0..2 {
        for c in 0..2 {
            dev = dev.max((flow[(r, c)] / mass[r] - chain.p_hat[(r, c)]).abs());
        }
    }
    if m != chain.m || !dev.is_finite() {
        dev = f64::INFINITY;
    }
    ProjectionCheck {
        consistent: dev <= PROJECTION_TOL,
        max_deviation: dev,
    }
}
