//! Monte Carlo estimates with common random numbers across root spins.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use super::tree::{broadcast_into, cumulative_rows, level_offset, level_size, sample_stream};
use super::Estimator;
use crate::chains::ChainMatrices;

/// Per-sample statistic at each depth `1..=depth`; `out[s][d−1]`.
pub(crate) fn sample_statistics(
    chain: &ChainMatrices,
    k: usize,
    depth: usize,
    samples: usize,
    seed: u64,
    estimator: Estimator,
    pair_w: &[f64],
    root_w: &[f64],
) -> Vec<Vec<f64>> {
    let q = chain.q;
    let cum = cumulative_rows(&chain.p);
    let p: Vec<f64> = (0..q * q).map(|t| chain.p[(t / q, t % q)]).collect();
    (0..samples)
        .into_par_iter()
        .map(|s| {
            let base = sample_stream(seed, s as u64);
            let trees: Vec<Vec<usize>> = (0..q)
                .map(|root| {
                    let mut rng = base.clone();
                    let mut spins = Vec::new();
                    broadcast_into(&cum, k, root, depth, &mut rng, &mut spins);
                    spins
                })
                .collect();
            (1..=depth)
                .map(|d| {
                    let off = level_offset(k, d);
                    let n = level_size(k, d);
                    match estimator {
                        Estimator::LeafTv => {
                            let post: Vec<Vec<f64>> = trees
                                .iter()
                                .map(|t| likelihood(&p, q, k, &t[off..off + n]))
                                .collect();
                            pair_statistic(q, &post, pair_w)
                        }
                        Estimator::MajorityAgreement => {
                            majority_statistic(q, trees.iter().map(|t| &t[off..off + n]), root_w)
                        }
                    }
                })
                .collect()
        })
        .collect()
}

/// Normalised `P(leaves | root = x)` by upward recursion.
pub(crate) fn likelihood(p: &[f64], q: usize, k: usize, leaves: &[usize]) -> Vec<f64> {
    // Leaf messages P·e_y are columns of P.
    let mut cur: Vec<f64> = Vec::with_capacity(leaves.len() * q);
    for &y in leaves {
        cur.extend((0..q).map(|x| p[x * q + y]));
    }
    let mut count = leaves.len();
    loop {
        let parents = count / k;
        let mut next = vec![1.0; parents * q];
        for v in 0..parents {
            let out = &mut next[v * q..(v + 1) * q];
            for c in 0..k {
                let m = &cur[(v * k + c) * q..(v * k + c + 1) * q];
                for x in 0..q {
                    out[x] *= m[x];
                }
            }
            let norm: f64 = out.iter().sum();
            out.iter_mut().for_each(|x| *x /= norm);
        }
        if parents == 1 {
            return next;
        }
        // Push up through the channel again.
        cur = vec![0.0; parents * q];
        for v in 0..parents {
            let l = &next[v * q..(v + 1) * q];
            for x in 0..q {
                cur[v * q + x] = (0..q).map(|y| p[x * q + y] * l[y]).sum();
            }
        }
        count = parents;
    }
}

/// `Σ w_ij · ½[(1 − L_j/L_i)⁺ under i + (1 − L_i/L_j)⁺ under j] / Σ w_ij`.
fn pair_statistic(q: usize, post: &[Vec<f64>], pair_w: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..q {
        for j in (i + 1)..q {
            let w = pair_w[i * q + j];
            if w == 0.0 {
                continue;
            }
            let a = (1.0 - post[i][j] / post[i][i]).max(0.0);
            let b = (1.0 - post[j][i] / post[j][j]).max(0.0);
            num += w * 0.5 * (a + b);
            den += w;
        }
    }
    num / den
}

/// Plurality-vote agreement with the root, rescaled so chance is 0 and certainty 1.
fn majority_statistic<'a>(q: usize, leaves: impl Iterator<Item = &'a [usize]>, root_w: &[f64]) -> f64 {
    let chance = 1.0 / q as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    let mut counts = vec![0usize; q];
    for (root, ls) in leaves.enumerate() {
        let w = root_w[root];
        if w == 0.0 {
            continue;
        }
        counts.iter_mut().for_each(|c| *c = 0);
        for &s in ls {
            counts[s] += 1;
        }
        // Ties go to the lowest label.
        let mut best = 0;
        for s in 1..q {
            if counts[s] > counts[best] {
                best = s;
            }
        }
        let hit = if best == root { 1.0 } else { 0.0 };
        num += w * (hit - chance) / (1.0 - chance);
        den += w;
    }
    num / den
}

/// Mean and bootstrap standard error of `values`.
pub(crate) fn bootstrap(values: &[f64], resamples: usize, seed: u64, stream: u64) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if resamples < 2 {
        return (mean, 0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xB007_5EED_0000_0001);
    rng.set_stream(stream);
    let means: Vec<f64> = (0..resamples)
        .map(|_| {
            let mut acc = 0.0;
            for _ in 0..n {
                let r = ((rng.next_u64() as u128 * n as u128) >> 64) as usize;
                acc += values[r];
            }
            acc / n as f64
        })
        .collect();
    let mb = means.iter().sum::<f64>() / resamples as f64;
    let var = means.iter().map(|m| (m - mb).powi(2)).sum::<f64>() / (resamples - 1) as f64;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn likelihood_single_level() {
        // Two leaves under the root: L(x) ∝ P(x, a) P(x, b).
        let p = [0.5, 0.25, 0.25, 0.25, 0.5, 0.25, 0.25, 0.25, 0.5];
        let l = likelihood(&p, 3, 2, &[0, 0]);
        let raw = [0.25, 0.0625, 0.0625];
        let s: f64 = raw.iter().sum();
        for x in 0..3 {
            assert!((l[x] - raw[x] / s).abs() < 1e-15);
        }
    }

    #[test]
    fn bootstrap_is_deterministic_and_sane() {
        let v: Vec<f64> = (0..400).map(|i| (i % 7) as f64).collect();
        let a = bootstrap(&v, 200, 3, 1);
        let b = bootstrap(&v, 200, 3, 1);
        assert_eq!(a, b);
        let mean = a.0;
        let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 399.0).sqrt();
        let se = sd / 20.0;
        assert!((a.1 / se - 1.0).abs() < 0.25, "{} vs {}", a.1, se);
    }

    #[test]
    fn majority_counts_ties_low() {
        let leaves: Vec<&[usize]> = vec![&[0, 1], &[1, 0]];
        let s = majority_statistic(2, leaves.into_iter(), &[1.0, 1.0]);
        // Root 0 wins the tie, root 1 loses it: mean of +1 and −1.
        assert!(s.abs() < 1e-15);
    }
}
