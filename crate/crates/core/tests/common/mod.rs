//! Slow, direct reimplementations used as oracles. Nothing here calls the
//! library's algorithms; words are plain `Vec<bool>` and sets are hash sets.
#![allow(dead_code)]

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::One;

/// Bits of `code` on `len` coordinates, most significant first.
pub fn bits(code: u64, len: usize) -> Vec<bool> {
    (0..len).map(|i| code >> (len - 1 - i) & 1 == 1).collect()
}

pub fn code(bits: &[bool]) -> u64 {
    bits.iter().fold(0, |acc, &b| acc << 1 | b as u64)
}

/// Number of words on `len` coordinates satisfying `pred`.
pub fn count_words(len: usize, pred: impl Fn(&[bool]) -> bool) -> u64 {
    (0..1u64 << len).filter(|&c| pred(&bits(c, len))).count() as u64
}

pub fn naive_sumset(a: &[u64], b: &[u64]) -> HashSet<u64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x ^ y)).collect()
}

/// `p/q` as an exact comparison `p1·q2 == p2·q1`.
pub fn same_ratio(p1: &BigUint, q1: &BigUint, p2: &BigUint, q2: &BigUint) -> bool {
    p1 * q2 == p2 * q1
}

pub fn pow2(e: u64) -> BigUint {
    BigUint::one() << e
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Cof,
    Cov { t: usize, from: usize },
}

fn subsets(n: u64, r: u64) -> Vec<Vec<u64>> {
    if r == 0 {
        return vec![vec![]];
    }
    if r > n {
        return vec![];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in subsets(n - first - 1, r - 1) {
            let mut s = vec![first];
            s.extend(rest.into_iter().map(|v| v + first + 1));
            out.push(s);
        }
    }
    out
}

pub enum Naive {
    Value(usize),
    Infeasible,
    OverBudget,
}

/// Minimum number of slaloms (|S(n)| ≤ w(n)) capturing every path.
///
/// Only sets of size exactly `min(w, f)` are tried: enlarging a level never
/// loses a capture. Iterative deepening on the first uncovered path.
pub fn naive_cover(f: &[u64], w: &[u64], kind: Kind, budget: u64) -> Naive {
    let levels = f.len();
    let mut paths: Vec<Vec<u64>> = vec![vec![]];
    for &fv in f {
        paths = paths
            .into_iter()
            .flat_map(|p| {
                (0..fv).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    let per_level: Vec<Vec<Vec<u64>>> = (0..levels).map(|n| subsets(f[n], w[n].min(f[n]))).collect();
    let mut cands: Vec<Vec<Vec<u64>>> = vec![vec![]];
    for opts in &per_level {
        cands = cands
            .into_iter()
            .flat_map(|c| {
                opts.iter().map(move |o| {
                    let mut d = c.clone();
                    d.push(o.clone());
                    d
                })
            })
            .collect();
    }
    let captured = |c: &Vec<Vec<u64>>, p: &Vec<u64>| -> bool {
        match kind {
            Kind::Cof => (0..levels).all(|n| c[n].contains(&p[n])),
            Kind::Cov { t, from } => (from..levels).filter(|&n| c[n].contains(&p[n])).count() >= t,
        }
    };
    let cover: Vec<Vec<bool>> = cands
        .iter()
        .map(|c| paths.iter().map(|p| captured(c, p)).collect())
        .collect();
    if (0..paths.len()).any(|p| cover.iter().all(|c| !c[p])) {
        return Naive::Infeasible;
    }
    fn dfs(covered: &[bool], left: usize, cover: &[Vec<bool>], nodes: &mut u64, budget: u64) -> Option<bool> {
        *nodes += 1;
        if *nodes > budget {
            return None;
        }
        let Some(p) = covered.iter().position(|&c| !c) else {
            return Some(true);
        };
        if left == 0 {
            return Some(false);
        }
        for c in cover.iter().filter(|c| c[p]) {
            let next: Vec<bool> = covered.iter().zip(c).map(|(&a, &b)| a || b).collect();
            if dfs(&next, left - 1, cover, nodes, budget)? {
                return Some(true);
            }
        }
        Some(false)
    }
    let mut nodes = 0;
    for k in 1..=paths.len() {
        match dfs(&vec![false; paths.len()], k, &cover, &mut nodes, budget) {
            Some(true) => return Naive::Value(k),
            Some(false) => {}
            None => return Naive::OverBudget,
        }
    }
    unreachable!("every path alone is coverable")
}

/// Membership in the truncation of `B(f, x)`: differ from `x` somewhere in
/// every block from `start` on.
pub fn meager_member(cuts: &[usize], x: &[bool], start: usize, w: &[bool]) -> bool {
    let a = cuts[0];
    (start..cuts.len() - 1).all(|n| (cuts[n]..cuts[n + 1]).any(|j| w[j - a] != x[j - a]))
}

/// Heavy prefixes computed by grouping patterns by their first `pre` bits.
pub fn naive_heavy(patterns: &[u64], len: usize, pre: usize, threshold: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (0..1u64 << pre)
        .filter(|&s| patterns.iter().filter(|&&p| p >> (len - pre) == s).count() as u64 >= threshold)
        .collect();
    out.sort();
    out
}
