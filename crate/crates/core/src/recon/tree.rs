//! Broadcasting a chain down a complete k-ary tree.
//!
//! Vertices are numbered breadth-first from the root (`0`); the children of
//! `v` are `k·v + 1 … k·v + k`. Every vertex `v ≥ 1` draws its spin from the
//! `(v−1)`-th 64-bit word of a ChaCha8 stream selected by `(seed, sample)`, so
//! a sample does not depend on the order in which vertices are visited or on
//! which thread runs it.

use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::chains::ChainMatrices;
use crate::error::{Error, Result};

/// Number of vertices at `depth` in a complete tree of arity `k`.
pub fn level_size(k: usize, depth: usize) -> usize {
    k.pow(depth as u32)
}

/// BFS index of the first vertex at `depth`.
pub fn level_offset(k: usize, depth: usize) -> usize {
    (0..depth).map(|d| level_size(k, d)).sum()
}

/// Vertices in a tree of the given depth.
pub fn tree_size(k: usize, depth: usize) -> usize {
    level_offset(k, depth + 1)
}

/// Random stream for one sample.
pub fn sample_stream(seed: u64, sample: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample);
    rng
}

/// Uniform in `[0, 1)` from the top 53 bits of a word.
fn unit(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Row-wise cumulative sums used for inverse-CDF sampling.
pub(crate) fn cumulative_rows(p: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..p.nrows())
        .map(|i| {
            let mut acc = 0.0;
            let mut row: Vec<f64> = p.row(i).iter().map(|&x| {
                acc += x;
                acc
            }).collect();
            // Guard against rounding leaving the last entry below 1.
            if let Some(last) = row.last_mut() {
                *last = f64::INFINITY;
            }
            row
        })
        .collect()
}

pub(crate) fn draw(cum: &[f64], u: f64) -> usize {
    cum.iter().position(|&c| u < c).unwrap_or(cum.len() - 1)
}

/// Spins of every vertex in BFS order, filled into `out`.
pub(crate) fn broadcast_into(cum: &[Vec<f64>], k: usize, root: usize, depth: usize, rng: &mut ChaCha8Rng, out: &mut Vec<usize>) {
    let n = tree_size(k, depth);
    out.clear();
    out.reserve(n);
    out.push(root);
    for v in 1..n {
        let parent = out[(v - 1) / k];
        out.push(draw(&cum[parent], unit(rng.next_u64())));
    }
}

/// Spins at depth `depth` (left to right, which for a complete tree is the depth-first leaf order).
///
/// `rng` should come from [`sample_stream`]; it is advanced by one word per non-root vertex.
pub fn broadcast_sample(chain: &ChainMatrices, k: usize, root_spin: usize, depth: usize, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    if root_spin >= chain.q {
        return Err(Error::InvalidConfig(format!("root spin {root_spin} outside 0..{}", chain.q)));
    }
    if k == 0 {
        return Err(Error::InvalidConfig("tree arity must be positive".into()));
    }
    let cum = cumulative_rows(&chain.p);
    let mut spins = Vec::new();
    broadcast_into(&cum, k, root_spin, depth, rng, &mut spins);
    let off = level_offset(k, depth);
    Ok(spins.split_off(off))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::build_chain;
    use crate::model::{PottsParams, TisgmSolution};

    fn free_chain(q: usize, theta: f64) -> ChainMatrices {
        let p = PottsParams::new(q, 2, theta).unwrap();
        build_chain(&p, &TisgmSolution::free(q, 1)).unwrap()
    }

    #[test]
    fn layout() {
        assert_eq!(tree_size(2, 3), 15);
        assert_eq!(level_offset(3, 2), 4);
        assert_eq!(tree_size(1, 4), 5);
    }

    #[test]
    fn depth_zero_is_root() {
        let c = free_chain(3, 2.0);
        let mut rng = sample_stream(1, 0);
        assert_eq!(broadcast_sample(&c, 2, 2, 0, &mut rng).unwrap(), vec![2]);
    }

    #[test]
    fn near_identity_channel_copies_root() {
        let c = free_chain(3, 1e6);
        for s in 0..50 {
            let mut rng = sample_stream(9, s);
            let leaves = broadcast_sample(&c, 2, 1, 3, &mut rng).unwrap();
            assert_eq!(leaves.len(), 8);
            assert!(leaves.iter().all(|&x| x == 1));
        }
    }

    #[test]
    fn rejects_bad_root() {
        let c = free_chain(3, 2.0);
        let mut rng = sample_stream(1, 0);
        assert!(broadcast_sample(&c, 2, 3, 2, &mut rng).is_err());
    }

    #[test]
    fn word_positions_are_per_vertex() {
        // Vertex v reads word v−1 of its stream, so seeking gives the same draw.
        let c = free_chain(4, 3.0);
        let cum = cumulative_rows(&c.p);
        let mut rng = sample_stream(5, 7);
        let mut spins = Vec::new();
        broadcast_into(&cum, 2, 0, 4, &mut rng, &mut spins);
        let v = 20;
        let mut seek = sample_stream(5, 7);
        seek.set_word_pos(2 * (v as u128 - 1));
        let u = unit(seek.next_u64());
        assert_eq!(spins[v], draw(&cum[spins[(v - 1) / 2]], u));
    }
}
