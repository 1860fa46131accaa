//! Exact leaf-distribution distances by density evolution.
//!
//! The normalised likelihood vector `L(x) ∝ P(leaves | root = x)` is a
//! sufficient statistic for the root, so the total-variation distance between
//! the leaf laws under roots `i` and `j` equals `½ Σ_L C(L)·|L(i) − L(j)|`,
//! where `C(L)` is the (root-free) weight of all leaf configurations sharing
//! `L`. The weighted atoms `(L, C)` of one level are built from `k`-fold
//! multisets of the atoms one level below. Atoms whose vectors agree to 12
//! decimals are merged. The support grows roughly like `A ↦ A^k / k!`, so the
//! recursion stops at the first level whose multiset count exceeds a budget.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::chains::ChainMatrices;
use crate::model::binomial;

/// Largest multiset count for which a level is materialised (needed to go one level deeper).
const STORE_LIMIT: u128 = 4_000_000;
const KEY_SCALE: f64 = 1e12;

/// Exact pairwise distances per depth.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactProfile {
    pub q: usize,
    /// `pair_tv[d−1][i·q + j]` is the distance between leaf laws at depth `d` under roots `i` and `j`.
    pub pair_tv: Vec<Vec<f64>>,
    /// Atom counts of the materialised levels, starting with the `q` leaves at depth 0.
    pub atoms: Vec<usize>,
}

impl ExactProfile {
    /// Deepest level computed.
    pub fn reached(&self) -> usize {
        self.pair_tv.len()
    }

    pub fn tv(&self, depth: usize, i: usize, j: usize) -> f64 {
        self.pair_tv[depth - 1][i * self.q + j]
    }
}

struct Level {
    q: usize,
    l: Vec<f64>,
    c: Vec<f64>,
}

impl Level {
    fn leaves(q: usize) -> Self {
        let mut l = vec![0.0; q * q];
        for y in 0..q {
            l[y * q + y] = 1.0;
        }
        Self { q, l, c: vec![1.0; q] }
    }

    fn len(&self) -> usize {
        self.c.len()
    }

    /// Messages `P·L` sent to the parent.
    fn messages(&self, p: &DMatrix<f64>) -> Vec<f64> {
        let q = self.q;
        let mut out = vec![0.0; self.l.len()];
        for a in 0..self.len() {
            let la = &self.l[a * q..(a + 1) * q];
            for x in 0..q {
                out[a * q + x] = (0..q).map(|y| p[(x, y)] * la[y]).sum();
            }
        }
        out
    }
}

/// Visits every nondecreasing `k`-tuple starting at `first`, with the product
/// message and the weight `multiplicity · Π C`.
fn visit_tuples(
    first: usize,
    k: usize,
    q: usize,
    msg: &[f64],
    c: &[f64],
    visit: &mut dyn FnMut(&[f64], f64),
) {
    let mut idx = vec![first; k];
    let mut prods = vec![vec![0.0; q]; k];
    prods[0].copy_from_slice(&msg[first * q..(first + 1) * q]);
    let n = c.len();
    let fact: Vec<f64> = (0..=k).scan(1.0, |acc, i| {
        if i > 0 {
            *acc *= i as f64;
        }
        Some(*acc)
    }).collect();

    fn descend(
        pos: usize,
        k: usize,
        q: usize,
        n: usize,
        msg: &[f64],
        c: &[f64],
        idx: &mut Vec<usize>,
        prods: &mut Vec<Vec<f64>>,
        fact: &[f64],
        visit: &mut dyn FnMut(&[f64], f64),
    ) {
        if pos == k {
            let mut mult = fact[k];
            let mut run = 1;
            let mut weight = c[idx[0]];
            for t in 1..k {
                weight *= c[idx[t]];
                if idx[t] == idx[t - 1] {
                    run += 1;
                } else {
                    mult /= fact[run];
                    run = 1;
                }
            }
            mult /= fact[run];
            visit(&prods[k - 1], mult * weight);
            return;
        }
        for a in idx[pos - 1]..n {
            idx[pos] = a;
            let (head, tail) = prods.split_at_mut(pos);
            let prev = &head[pos - 1];
            let m = &msg[a * q..(a + 1) * q];
            for x in 0..q {
                tail[0][x] = prev[x] * m[x];
            }
            descend(pos + 1, k, q, n, msg, c, idx, prods, fact, visit);
        }
    }
    descend(1, k, q, n, msg, c, &mut idx, &mut prods, &fact, visit);
}

/// `Σ w·|V(i) − V(j)|` over all tuples, as a `q × q` table.
fn stream_pair_distances(level: &Level, msg: &[f64], k: usize) -> Vec<f64> {
    let q = level.q;
    let parts: Vec<Vec<f64>> = (0..level.len())
        .into_par_iter()
        .map(|first| {
            let mut acc = vec![0.0; q * q];
            visit_tuples(first, k, q, msg, &level.c, &mut |v, w| {
                for i in 0..q {
                    for j in (i + 1)..q {
                        acc[i * q + j] += w * (v[i] - v[j]).abs();
                    }
                }
            });
            acc
        })
        .collect();
    finish_pairs(q, &parts)
}

fn finish_pairs(q: usize, parts: &[Vec<f64>]) -> Vec<f64> {
    let mut tv = vec![0.0; q * q];
    for part in parts {
        for (t, v) in tv.iter_mut().zip(part) {
            *t += v;
        }
    }
    for i in 0..q {
        for j in (i + 1)..q {
            let v = 0.5 * tv[i * q + j];
            tv[i * q + j] = v;
            tv[j * q + i] = v;
        }
    }
    tv
}

/// Builds the next level with merged atoms.
fn materialise(level: &Level, msg: &[f64], k: usize) -> Level {
    let q = level.q;
    let parts: Vec<Vec<(Vec<f64>, f64)>> = (0..level.len())
        .into_par_iter()
        .map(|first| {
            let mut out = Vec::new();
            visit_tuples(first, k, q, msg, &level.c, &mut |v, w| {
                let norm: f64 = v.iter().sum();
                out.push((v.iter().map(|x| x / norm).collect(), w * norm));
            });
            out
        })
        .collect();
    let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut next = Level { q, l: Vec::new(), c: Vec::new() };
    for (l, c) in parts.into_iter().flatten() {
        let key: Vec<i64> = l.iter().map(|x| (x * KEY_SCALE).round() as i64).collect();
        match index.get(&key) {
            Some(&a) => next.c[a] += c,
            None => {
                index.insert(key, next.c.len());
                next.l.extend_from_slice(&l);
                next.c.push(c);
            }
        }
    }
    next
}

fn distances_from_level(level: &Level) -> Vec<f64> {
    let q = level.q;
    let mut acc = vec![0.0; q * q];
    for a in 0..level.len() {
        let l = &level.l[a * q..(a + 1) * q];
        for i in 0..q {
            for j in (i + 1)..q {
                acc[i * q + j] += level.c[a] * (l[i] - l[j]).abs();
            }
        }
    }
    finish_pairs(q, &[acc])
}

/// Number of `k`-multisets of `atoms` atoms.
pub fn multiset_count(atoms: usize, k: usize) -> u128 {
    binomial(atoms + k - 1, k)
}

/// Exact distances for depths `1..=depth`, stopping early once a level would
/// need more than `budget` multisets.
pub fn exact_leaf_tv(chain: &ChainMatrices, k: usize, depth: usize, budget: u128) -> ExactProfile {
    let q = chain.q;
    let mut level = Level::leaves(q);
    let mut profile = ExactProfile { q, pair_tv: Vec::new(), atoms: vec![q] };
    for d in 1..=depth {
        let tuples = multiset_count(level.len(), k);
        if tuples > budget {
            break;
        }
        let msg = level.messages(&chain.p);
        if d < depth && tuples <= STORE_LIMIT {
            level = materialise(&level, &msg, k);
            profile.atoms.push(level.len());
            profile.pair_tv.push(distances_from_level(&level));
        } else {
            profile.pair_tv.push(stream_pair_distances(&level, &msg, k));
            break;
        }
    }
    profile
}
