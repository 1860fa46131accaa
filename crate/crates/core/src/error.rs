use thiserror::Error;

/// Errors raised by the model, chain and extremality layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("block size m={m} outside 1..={max}")]
    BlockSize { m: usize, max: usize },

    #[error("boundary-law value must be positive and finite, got {0}")]
    NonPositiveZ(f64),

    #[error("branch {branch} does not exist for q={q}, k={k}, m={m}, theta={theta}")]
    BranchMissing {
        branch: String,
        q: usize,
        k: usize,
        m: usize,
        theta: f64,
    },

    #[error("z={z} is not a fixed point (relative residual {residual:e})")]
    NotFixedPoint { z: f64, residual: f64 },

    #[error("root finder failed on [{lo}, {hi}] (residual {residual:e})")]
    Convergence { lo: f64, hi: f64, residual: f64 },

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{0} is only defined for the binary tree (k = 2)")]
    RequiresBinaryTree(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
