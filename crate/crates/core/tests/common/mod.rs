//! Independent oracles: dense exact rank, and bar/cobar complexes of incidence
//! structures assembled directly from strict multichains of the poset.
//!
//! Nothing here goes through bimodules, graded structures or the sparse
//! elimination of the library; only the poset's order and interval lengths.

#![allow(dead_code)]

use std::collections::HashMap;

use koszul_core::GradedPoset;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Prime used for the characteristic cross-check; larger than `2^20`.
pub const CROSS_CHECK_PRIME: u64 = 1_048_583;

/// Seed of every sampled corpus in the tests.
pub const SAMPLE_SEED: u64 = 0x5eed_4b05;

/// Rank over `Q` by fraction-free Bareiss elimination on big integers.
pub fn dense_rank_q(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        for r in rank + 1..m.len() {
            for c in col + 1..ncols {
                let v = (&m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c]) / &prev;
                m[r][c] = v;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Rank over `F_p` by plain Gaussian elimination.
pub fn dense_rank_p(rows: &[Vec<i64>], p: u64) -> usize {
    let p = p as i128;
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| (x as i128).rem_euclid(p)).collect()).collect();
    let ncols = m.first().map_or(0, Vec::len);
    let inv = |a: i128| {
        let (mut base, mut e, mut acc) = (a, p - 2, 1i128);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        acc
    };
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let s = inv(m[rank][col]);
        for c in col..ncols {
            m[rank][c] = m[rank][c] * s % p;
        }
        for r in 0..m.len() {
            if r != rank && m[r][col] != 0 {
                let f = m[r][col];
                for c in col..ncols {
                    m[r][c] = (m[r][c] - f * m[rank][c]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Strict chains `x_0 < x_1 < ⋯ < x_n` with `l([x_0, x_n]) = m`.
pub fn multichains(p: &GradedPoset, n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..p.len()).map(|x| vec![x]).collect();
    while let Some(ch) = stack.pop() {
        let last = *ch.last().expect("nonempty");
        let used = p.interval_length(ch[0], last).expect("chain is ordered");
        if ch.len() == n + 1 {
            if used == m {
                out.push(ch);
            }
            continue;
        }
        for y in 0..p.len() {
            if y != last && p.leq(last, y) && used + p.interval_length(last, y).expect("comparable") <= m {
                let mut next = ch.clone();
                next.push(y);
                stack.push(next);
            }
        }
    }
    out.sort();
    out
}

fn index(chains: &[Vec<usize>]) -> HashMap<Vec<usize>, usize> {
    chains.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect()
}

/// Bar differential `Ω_n → Ω_{n−1}` in weight `m`, deleting interior vertices;
/// rows are indexed by the target chains.
pub fn bar_matrix(p: &GradedPoset, n: usize, m: usize) -> Vec<Vec<i64>> {
    let src = multichains(p, n, m);
    let tgt = multichains(p, n - 1, m);
    let at = index(&tgt);
    let mut rows = vec![vec![0i64; src.len()]; tgt.len()];
    for (j, ch) in src.iter().enumerate() {
        for i in 1..n {
            let mut merged = ch.clone();
            merged.remove(i);
            rows[at[&merged]][j] += if i % 2 == 1 { 1 } else { -1 };
        }
    }
    rows
}

/// Cobar differential `Ω^n → Ω^{n+1}` in weight `m`, inserting a vertex into
/// each step; rows are indexed by the target chains.
pub fn cobar_matrix(p: &GradedPoset, n: usize, m: usize) -> Vec<Vec<i64>> {
    let src = multichains(p, n, m);
    let tgt = multichains(p, n + 1, m);
    let at = index(&tgt);
    let mut rows = vec![vec![0i64; src.len()]; tgt.len()];
    for (j, ch) in src.iter().enumerate() {
        for i in 1..=n {
            for z in p.open_interval(ch[i - 1], ch[i]) {
                let mut split = ch.clone();
                split.insert(i, z);
                rows[at[&split]][j] += if i % 2 == 1 { 1 } else { -1 };
            }
        }
    }
    rows
}

fn rank_of(rows: &[Vec<i64>], prime: Option<u64>) -> usize {
    match prime {
        None => dense_rank_q(rows),
        Some(q) => dense_rank_p(rows, q),
    }
}

/// `T_{n,m}` of the incidence ring for `n ≤ n_max`, `m ≤ m_max`.
pub fn tor_oracle(p: &GradedPoset, n_max: usize, m_max: usize, prime: Option<u64>) -> Vec<Vec<usize>> {
    let mut t = vec![vec![0; m_max + 1]; n_max + 1];
    t[0][0] = p.len();
    for m in 1..=m_max {
        // Ω_n(m) vanishes for n > m; d_1 is zero in positive weight.
        let ranks: Vec<usize> = (0..=m + 1)
            .map(|n| if n < 2 { 0 } else { rank_of(&bar_matrix(p, n, m), prime) })
            .collect();
        for n in 1..=n_max.min(m) {
            t[n][m] = multichains(p, n, m).len() - ranks[n] - ranks[n + 1];
        }
    }
    t
}

/// `E^{n,m}` of the incidence coring, from the cobar side.
pub fn ext_oracle(p: &GradedPoset, n_max: usize, m_max: usize, prime: Option<u64>) -> Vec<Vec<usize>> {
    let mut e = vec![vec![0; m_max + 1]; n_max + 1];
    e[0][0] = p.len();
    for m in 1..=m_max {
        let ranks: Vec<usize> = (0..=m)
            .map(|n| if n == 0 { 0 } else { rank_of(&cobar_matrix(p, n, m), prime) })
            .collect();
        for n in 1..=n_max.min(m) {
            let incoming = if n >= 2 { ranks[n - 1] } else { 0 };
            e[n][m] = multichains(p, n, m).len() - ranks[n] - incoming;
        }
    }
    e
}

/// Koszulity of the incidence ring over `Q` by the oracle: the bar slices of
/// weight above the poset's length are zero, so diagonality is decided there.
pub fn koszul_oracle(p: &GradedPoset) -> bool {
    let l = p.max_length();
    let t = tor_oracle(p, l, l, None);
    (0..=l).all(|n| (0..=l).all(|m| n == m || t[n][m] == 0))
}

/// All graded posets with at most five elements.
pub fn small_corpus() -> Vec<GradedPoset> {
    koszul_core::enumerate_corpus(5, None)
}

/// A fixed sample of `count` graded posets with six or seven elements.
pub fn medium_sample(count: usize) -> Vec<GradedPoset> {
    let mut pool = koszul_core::poset::enumerate_exact(6);
    pool.extend(koszul_core::poset::enumerate_exact(7));
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    pool.choose_multiple(&mut rng, count).cloned().collect()
}

pub fn diamond() -> GradedPoset {
    GradedPoset::from_labels(&["0", "a", "b", "1"], &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")]).unwrap()
}

pub fn pbad() -> GradedPoset {
    GradedPoset::from_labels(
        &["0", "a", "b", "c", "d", "1"],
        &[("0", "a"), ("0", "b"), ("a", "c"), ("b", "d"), ("c", "1"), ("d", "1")],
    )
    .unwrap()
}
