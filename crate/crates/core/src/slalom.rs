//! Slaloms over finite products `∏ f(n)`, capture semantics, and the
//! finite covering-number solvers.
//!
//! The infinitary quantifiers are replaced by explicit windows: "for
//! infinitely many n" becomes "at least `t` hits in `[n0, N)`" and "for
//! all but finitely many n" becomes "at every level of `[n0, N)`".

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cube::BlockSet;
use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::trees::CutSequence;

/// Default ceiling on the number of paths a solver will enumerate.
pub const DEFAULT_SEARCH_GUARD: u64 = 1 << 20;
/// Ceiling on candidate slaloms times paths, in bits of coverage storage.
pub const DEFAULT_COVERAGE_GUARD: u64 = 1 << 31;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct GrowthFn(Vec<u64>);

impl GrowthFn {
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if let Some(n) = values.iter().position(|&v| v == 0) {
            return Err(Error::invalid(format!("f({n}) must be positive")));
        }
        Ok(GrowthFn(values))
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn at(&self, n: usize) -> u64 {
        self.0[n]
    }

    /// `∏ f(n)`, or `None` on overflow.
    pub fn product(&self) -> Option<u64> {
        self.0.iter().try_fold(1u64, |acc, &v| acc.checked_mul(v))
    }
}

impl TryFrom<Vec<u64>> for GrowthFn {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        GrowthFn::new(v)
    }
}

impl From<GrowthFn> for Vec<u64> {
    fn from(g: GrowthFn) -> Self {
        g.0
    }
}

/// Width budget a slalom must respect at every level.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WidthRule {
    /// `|S(n)| / f(n) < 2^{-n}`
    Sigma,
    /// `|S(n)| ≤ n`
    Localization,
    /// `|S(n)| / f(n) ≤ 2^{-2n}`
    SmallSet,
    /// `|S(n)| ≤ g(n)`
    Custom(Vec<u64>),
}

impl WidthRule {
    pub fn admits(&self, n: usize, f_n: u64, size: u64) -> bool {
        match self {
            WidthRule::Sigma => (size as u128) << n < f_n as u128 || (n >= 64 && size == 0),
            WidthRule::Localization => size <= n as u64,
            WidthRule::SmallSet => {
                if 2 * n >= 64 {
                    size == 0 || (size as u128) << (2 * n).min(127) <= f_n as u128
                } else {
                    (size as u128) << (2 * n) <= f_n as u128
                }
            }
            WidthRule::Custom(g) => g.get(n).is_some_and(|&cap| size <= cap),
        }
    }

    /// Largest admissible `|S(n)|`.
    pub fn max_width(&self, n: usize, f_n: u64) -> u64 {
        match self {
            WidthRule::Sigma => {
                if n >= 64 {
                    0
                } else {
                    // largest s with s·2^n < f
                    (f_n - 1) >> n
                }
            }
            WidthRule::Localization => (n as u64).min(f_n),
            WidthRule::SmallSet => {
                if 2 * n >= 64 {
                    0
                } else {
                    f_n >> (2 * n)
                }
            }
            WidthRule::Custom(g) => g.get(n).copied().unwrap_or(0).min(f_n),
        }
    }
}

/// Levels where the `Sigma` width rule admits only the empty set, i.e.
/// `f(n)·2^{-n} ≤ 1`.
pub fn forced_empty_levels(f: &GrowthFn) -> Vec<usize> {
    (0..f.len())
        .filter(|&n| WidthRule::Sigma.max_width(n, f.at(n)) == 0)
        .collect()
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Path(pub Vec<u64>);

impl Path {
    pub fn validate(&self, f: &GrowthFn) -> Result<()> {
        if self.0.len() != f.len() {
            return Err(Error::invalid(format!(
                "path has {} levels, f has {}",
                self.0.len(),
                f.len()
            )));
        }
        if let Some(n) = (0..f.len()).find(|&n| self.0[n] >= f.at(n)) {
            return Err(Error::invalid(format!(
                "g({n}) = {} is outside [0, {})",
                self.0[n],
                f.at(n)
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Slalom {
    levels: Vec<BTreeSet<u64>>,
    rule: WidthRule,
}

impl Slalom {
    pub fn new(f: &GrowthFn, levels: Vec<BTreeSet<u64>>, rule: WidthRule) -> Result<Self> {
        if levels.len() != f.len() {
            return Err(Error::invalid(format!(
                "slalom has {} levels, f has {}",
                levels.len(),
                f.len()
            )));
        }
        for (n, s) in levels.iter().enumerate() {
            if let Some(v) = s.iter().find(|&&v| v >= f.at(n)) {
                return Err(Error::invalid(format!(
                    "S({n}) contains {v}, outside [0, {})",
                    f.at(n)
                )));
            }
            if !rule.admits(n, f.at(n), s.len() as u64) {
                return Err(Error::invalid(format!(
                    "|S({n})| = {} violates the width rule {rule:?}",
                    s.len()
                )));
            }
        }
        Ok(Slalom { levels, rule })
    }

    pub fn levels(&self) -> &[BTreeSet<u64>] {
        &self.levels
    }

    pub fn level(&self, n: usize) -> &BTreeSet<u64> {
        &self.levels[n]
    }

    pub fn rule(&self) -> &WidthRule {
        &self.rule
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaptureMode {
    /// at least `t` hits in the window
    InfinitelyOften,
    /// a hit at every level of the window
    AlmostEverywhere,
}

pub fn captures(s: &Slalom, g: &Path, mode: CaptureMode, from: usize, t: usize) -> Result<bool> {
    let n = s.len();
    if g.len() != n {
        return Err(Error::invalid("slalom and path lengths differ"));
    }
    if from >= n {
        return Err(Error::invalid(format!(
            "window start {from} is not below the horizon {n}"
        )));
    }
    let hits = (from..n).filter(|&k| s.levels[k].contains(&g.0[k])).count();
    Ok(match mode {
        CaptureMode::AlmostEverywhere => hits == n - from,
        CaptureMode::InfinitelyOften => hits >= t,
    })
}

/// Finite small-set data: disjoint intervals `I_n` and pattern sets
/// `J_n ⊆ 2^{I_n}` with `|J_n|·2^{-|I_n|} ≤ 2^{-2n}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SmallSetData {
    sets: Vec<BlockSet>,
}

impl SmallSetData {
    pub fn new(sets: Vec<BlockSet>) -> Result<Self> {
        let mut spans: Vec<(usize, usize)> = sets.iter().map(|s| (s.lo(), s.hi())).collect();
        spans.sort();
        if spans.windows(2).any(|p| p[0].1 > p[1].0) {
            return Err(Error::invalid("intervals I_n must be pairwise disjoint"));
        }
        for (n, s) in sets.iter().enumerate() {
            let lhs = s.measure();
            let rhs = exact::inv_pow2(2 * n as u64);
            if lhs > rhs {
                return Err(Error::invalid(format!(
                    "|J_{n}|·2^-|I_{n}| = {} exceeds 2^-{}",
                    exact::fmt(&lhs),
                    2 * n
                )));
            }
        }
        Ok(SmallSetData { sets })
    }

    pub fn sets(&self) -> &[BlockSet] {
        &self.sets
    }

    /// `f(n) = 2^{|I_n|}` and `S(n)` = the codes of `J_n`.
    pub fn to_slalom(&self) -> Result<(GrowthFn, Slalom)> {
        let f = GrowthFn::new(
            self.sets
                .iter()
                .map(|s| {
                    if s.interval_len() >= 64 {
                        Err(Error::guard("interval length", s.interval_len() as u64, 63))
                    } else {
                        Ok(1u64 << s.interval_len())
                    }
                })
                .collect::<Result<_>>()?,
        )?;
        let levels = self.sets.iter().map(|s| s.codes().collect()).collect();
        let slalom = Slalom::new(&f, levels, WidthRule::SmallSet)?;
        Ok((f, slalom))
    }
}

/// `|S(n)| / f(n)` at every level.
pub fn level_widths(f: &GrowthFn, s: &Slalom) -> Vec<Rational> {
    (0..f.len())
        .map(|n| Rational::new((s.level(n).len() as u64).into(), f.at(n).into()))
        .collect()
}

// ---------------------------------------------------------------------------
// covering numbers
// ---------------------------------------------------------------------------

/// Which finite covering number to compute.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverKind {
    /// capture every path with `≥ t` hits in `[n0, N)`
    Cov { t: usize, from: usize },
    /// capture every path at every level
    Cof,
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub path_guard: u64,
    pub coverage_guard: u64,
    pub workers: usize,
    /// Give up (reporting `None`) past this family size.
    pub max_family: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            path_guard: DEFAULT_SEARCH_GUARD,
            coverage_guard: DEFAULT_COVERAGE_GUARD,
            workers: 1,
            max_family: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoverOutcome {
    /// Minimum found, with the canonical witness family.
    Optimal { value: usize, witness: Vec<Slalom> },
    /// Some path is captured by no admissible slalom.
    Infeasible { uncapturable: Path },
    /// No family up to the configured cap works.
    AboveCap { cap: usize },
}

impl CoverOutcome {
    pub fn value(&self) -> Option<usize> {
        match self {
            CoverOutcome::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }
}

/// The candidate family and per-path coverage of one covering instance.
pub struct CoverInstance {
    f: GrowthFn,
    widths: Vec<u64>,
    kind: CoverKind,
    /// per level, the admissible maximal subsets as bitmasks, canonical order
    level_choices: Vec<Vec<u64>>,
    paths: u64,
    candidates: Vec<Vec<u64>>,
    coverage: Vec<Vec<u64>>,
    covering: Vec<Vec<u32>>,
}

fn combinations(n: u64, r: u64) -> Vec<u64> {
    // masks of r-subsets of [0, n) in lexicographic order of sorted elements
    let mut out = Vec::new();
    fn rec(start: u64, n: u64, left: u64, acc: u64, out: &mut Vec<u64>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for v in start..=(n - left) {
            rec(v + 1, n, left - 1, acc | (1 << v), out);
        }
    }
    rec(0, n, r, 0, &mut out);
    out
}

fn binomial(n: u64, r: u64) -> u128 {
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

impl CoverInstance {
    pub fn new(f: &GrowthFn, widths: &[u64], kind: CoverKind, opts: &SearchOptions) -> Result<Self> {
        if widths.len() != f.len() {
            return Err(Error::invalid("widths and f differ in length"));
        }
        if f.is_empty() {
            return Err(Error::invalid("f must have at least one level"));
        }
        if let CoverKind::Cov { from, .. } = kind {
            if from >= f.len() {
                return Err(Error::invalid("window start is not below the horizon"));
            }
        }
        if let Some(n) = (0..f.len()).find(|&n| f.at(n) > 64) {
            return Err(Error::guard("f(n) for the solver", f.at(n), 64));
        }
        let paths = f
            .product()
            .filter(|&p| p <= opts.path_guard)
            .ok_or_else(|| Error::guard("∏ f(n)", f.product().unwrap_or(u64::MAX), opts.path_guard))?;
        let eff: Vec<u64> = (0..f.len()).map(|n| widths[n].min(f.at(n))).collect();
        let count: u128 = (0..f.len())
            .map(|n| binomial(f.at(n), eff[n]))
            .try_fold(1u128, |acc, c| acc.checked_mul(c))
            .unwrap_or(u128::MAX);
        let storage = count.saturating_mul(paths as u128);
        if storage > opts.coverage_guard as u128 {
            return Err(Error::guard(
                "candidate slaloms × paths",
                storage.min(u64::MAX as u128) as u64,
                opts.coverage_guard,
            ));
        }
        let level_choices: Vec<Vec<u64>> =
            (0..f.len()).map(|n| combinations(f.at(n), eff[n])).collect();

        let mut candidates: Vec<Vec<u64>> = vec![Vec::new()];
        for choices in &level_choices {
            candidates = candidates
                .into_iter()
                .flat_map(|prefix| {
                    choices.iter().map(move |&m| {
                        let mut p = prefix.clone();
                        p.push(m);
                        p
                    })
                })
                .collect();
        }

        let words = paths.div_ceil(64) as usize;
        let fv = f.values().to_vec();
        let coverage: Vec<Vec<u64>> = candidates
            .par_iter()
            .map(|cand| {
                let mut bits = vec![0u64; words];
                let mut digits = vec![0u64; fv.len()];
                for p in 0..paths {
                    if Self::captured(cand, &digits, kind) {
                        bits[(p >> 6) as usize] |= 1 << (p & 63);
                    }
                    // mixed-radix increment, level 0 most significant
                    for n in (0..fv.len()).rev() {
                        digits[n] += 1;
                        if digits[n] < fv[n] {
                            break;
                        }
                        digits[n] = 0;
                    }
                }
                bits
            })
            .collect();

        let mut covering: Vec<Vec<u32>> = vec![Vec::new(); paths as usize];
        for (ci, bits) in coverage.iter().enumerate() {
            for (wi, &w) in bits.iter().enumerate() {
                let mut rest = w;
                while rest != 0 {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    covering[wi * 64 + b].push(ci as u32);
                }
            }
        }
        Ok(CoverInstance {
            f: f.clone(),
            widths: widths.to_vec(),
            kind,
            level_choices,
            paths,
            candidates,
            coverage,
            covering,
        })
    }

    fn captured(cand: &[u64], digits: &[u64], kind: CoverKind) -> bool {
        match kind {
            CoverKind::Cof => digits.iter().zip(cand).all(|(&d, &m)| m >> d & 1 == 1),
            CoverKind::Cov { t, from } => {
                let hits = (from..digits.len())
                    .filter(|&n| cand[n] >> digits[n] & 1 == 1)
                    .count();
                hits >= t
            }
        }
    }

    pub fn path_count(&self) -> u64 {
        self.paths
    }

    pub fn candidate_count(&self) -> usize {
        self.candidates.len()
    }

    pub fn level_choices(&self) -> &[Vec<u64>] {
        &self.level_choices
    }

    pub fn path(&self, mut index: u64) -> Path {
        let mut digits = vec![0u64; self.f.len()];
        for n in (0..self.f.len()).rev() {
            digits[n] = index % self.f.at(n);
            index /= self.f.at(n);
        }
        Path(digits)
    }

    pub fn slalom(&self, candidate: usize) -> Slalom {
        let levels = self.candidates[candidate]
            .iter()
            .map(|&m| (0..64u64).filter(|v| m >> v & 1 == 1).collect())
            .collect();
        Slalom {
            levels,
            rule: WidthRule::Custom(self.widths.clone()),
        }
    }

    /// Paths captured by a candidate.
    pub fn coverage(&self, candidate: usize) -> &[u64] {
        &self.coverage[candidate]
    }

    /// Exact minimum family size by iterative deepening, branching on the
    /// lowest uncovered path. The first family found in candidate order is
    /// the canonical witness; worker count does not affect it.
    pub fn solve(&self, opts: &SearchOptions) -> Result<CoverOutcome> {
        if let Some(p) = self.covering.iter().position(|c| c.is_empty()) {
            return Ok(CoverOutcome::Infeasible {
                uncapturable: self.path(p as u64),
            });
        }
        let max_cov = self
            .coverage
            .iter()
            .map(|b| b.iter().map(|w| w.count_ones() as u64).sum::<u64>())
            .max()
            .unwrap_or(0);
        let lower = self.paths.div_ceil(max_cov.max(1)) as usize;
        let upper_cap = opts.max_family.unwrap_or(usize::MAX);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers.max(1))
            .build()
            .map_err(|e| Error::invalid(e.to_string()))?;
        let full: Vec<u64> = {
            let words = self.paths.div_ceil(64) as usize;
            let mut v = vec![u64::MAX; words];
            let tail = self.paths % 64;
            if tail != 0 {
                v[words - 1] = (1u64 << tail) - 1;
            }
            v
        };
        let mut depth = lower.max(1);
        loop {
            if depth > upper_cap {
                return Ok(CoverOutcome::AboveCap { cap: upper_cap });
            }
            let found = pool.install(|| self.search_depth(&full, depth, max_cov));
            if let Some(family) = found {
                let witness = family.iter().map(|&c| self.slalom(c)).collect();
                return Ok(CoverOutcome::Optimal {
                    value: family.len(),
                    witness,
                });
            }
            depth += 1;
        }
    }

    fn search_depth(&self, uncovered: &[u64], depth: usize, max_cov: u64) -> Option<Vec<usize>> {
        let first = first_set(uncovered)?;
        self.covering[first]
            .par_iter()
            .map(|&c| {
                let rest = and_not(uncovered, &self.coverage[c as usize]);
                let mut chosen = vec![c as usize];
                if self.dfs(&rest, depth - 1, max_cov, &mut chosen) {
                    Some(chosen)
                } else {
                    None
                }
            })
            .find_map_first(|r| r)
    }

    fn dfs(&self, uncovered: &[u64], depth: usize, max_cov: u64, chosen: &mut Vec<usize>) -> bool {
        let Some(first) = first_set(uncovered) else {
            return true;
        };
        if depth == 0 {
            return false;
        }
        let left: u64 = uncovered.iter().map(|w| w.count_ones() as u64).sum();
        if left > depth as u64 * max_cov {
            return false;
        }
        for &c in &self.covering[first] {
            let rest = and_not(uncovered, &self.coverage[c as usize]);
            chosen.push(c as usize);
            if self.dfs(&rest, depth - 1, max_cov, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    /// Does the family capture every path?
    pub fn is_cover(&self, family: &[Slalom]) -> bool {
        (0..self.paths).all(|p| {
            let g = self.path(p);
            family.iter().any(|s| match self.kind {
                CoverKind::Cof => captures(s, &g, CaptureMode::AlmostEverywhere, 0, 0).unwrap_or(false),
                CoverKind::Cov { t, from } => {
                    captures(s, &g, CaptureMode::InfinitelyOften, from, t).unwrap_or(false)
                }
            })
        })
    }
}

fn first_set(bits: &[u64]) -> Option<usize> {
    bits.iter()
        .position(|&w| w != 0)
        .map(|i| i * 64 + bits[i].trailing_zeros() as usize)
}

fn and_not(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & !y).collect()
}

/// Least number of width-bounded slaloms capturing every path at least `t`
/// times in `[0, N)`.
pub fn cov_fin(f: &GrowthFn, widths: &[u64], t: usize, opts: &SearchOptions) -> Result<CoverOutcome> {
    cov_fin_from(f, widths, t, 0, opts)
}

pub fn cov_fin_from(
    f: &GrowthFn,
    widths: &[u64],
    t: usize,
    from: usize,
    opts: &SearchOptions,
) -> Result<CoverOutcome> {
    CoverInstance::new(f, widths, CoverKind::Cov { t, from }, opts)?.solve(opts)
}

/// Least number of boxes `∏ S(n)` with `|S(n)| ≤ w(n)` covering `∏ f(n)`.
pub fn cof_fin(f: &GrowthFn, widths: &[u64], opts: &SearchOptions) -> Result<CoverOutcome> {
    CoverInstance::new(f, widths, CoverKind::Cof, opts)?.solve(opts)
}

/// `⌈∏ f(n) / ∏ min(w(n), f(n))⌉`, or `None` when some width is zero.
pub fn volume_bound(f: &GrowthFn, widths: &[u64]) -> Option<u64> {
    let vol: u128 = f.values().iter().map(|&v| v as u128).product();
    let box_vol: u128 = f
        .values()
        .iter()
        .zip(widths)
        .map(|(&v, &w)| w.min(v) as u128)
        .product();
    if box_vol == 0 {
        None
    } else {
        Some(vol.div_ceil(box_vol) as u64)
    }
}

// ---------------------------------------------------------------------------
// interval matching, localization, splicing
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockPolicy {
    /// consecutive blocks of this length from 0; a shorter remainder is dropped
    Fixed(usize),
    Cuts(CutSequence),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    pub cuts: CutSequence,
    pub h: Path,
}

fn common_length(family: &[Path]) -> Result<usize> {
    let n = family
        .first()
        .ok_or_else(|| Error::invalid("the family must be non-empty"))?
        .len();
    if family.iter().any(|p| p.len() != n) {
        return Err(Error::invalid("family members differ in length"));
    }
    Ok(n)
}

/// Finds `h` agreeing with every member of `family` somewhere in every block.
///
/// Within a block, coordinates are filled left to right with the value
/// shared by the most still-unmatched members; ties go to the lowest
/// family index. Success is guaranteed when blocks have length `≥ |F|`.
pub fn match_intervals(family: &[Path], policy: &BlockPolicy) -> Result<Matching> {
    let n = common_length(family)?;
    let cuts = match policy {
        BlockPolicy::Fixed(len) => {
            if *len == 0 {
                return Err(Error::invalid("block length must be positive"));
            }
            if *len > n {
                return Err(Error::Infeasible(format!(
                    "block length {len} exceeds the horizon {n}"
                )));
            }
            CutSequence::new((0..=n / len).map(|i| i * len).collect())?
        }
        BlockPolicy::Cuts(c) => {
            if c.end() > n {
                return Err(Error::invalid("cuts extend past the horizon"));
            }
            c.clone()
        }
    };
    let mut h = vec![0u64; n];
    for b in 0..cuts.blocks() {
        let (lo, hi) = cuts.block(b);
        let mut open: Vec<usize> = (0..family.len()).collect();
        for (k, slot) in h.iter_mut().enumerate().take(hi).skip(lo) {
            if open.is_empty() {
                *slot = family[0].0[k];
                continue;
            }
            // (count, -first index) maximized; ties -> lowest family index
            let mut best: Option<(usize, usize, u64)> = None;
            for &i in &open {
                let v = family[i].0[k];
                let count = open.iter().filter(|&&j| family[j].0[k] == v).count();
                let better = match best {
                    None => true,
                    Some((bc, bi, _)) => count > bc || (count == bc && i < bi),
                };
                if better {
                    best = Some((count, i, v));
                }
            }
            let (_, _, v) = best.expect("open is non-empty");
            *slot = v;
            open.retain(|&j| family[j].0[k] != v);
        }
        if !open.is_empty() {
            return Err(Error::Infeasible(format!(
                "block {b} = [{lo}, {hi}) leaves {} member(s) unmatched",
                open.len()
            )));
        }
    }
    Ok(Matching { cuts, h: Path(h) })
}

/// Independent re-check: every member agrees with `h` in every block.
pub fn verify_matching(family: &[Path], m: &Matching) -> bool {
    family.iter().all(|g| {
        g.len() == m.h.len()
            && (0..m.cuts.blocks()).all(|b| {
                let (lo, hi) = m.cuts.block(b);
                (lo..hi).any(|k| g.0[k] == m.h.0[k])
            })
    })
}

/// `S(n) = {g(n) : g ∈ F}` for `n ≥ n0` (empty below), under `|S(n)| ≤ n`.
pub fn localize(family: &[Path], f: &GrowthFn, from: usize) -> Result<Slalom> {
    let n = common_length(family)?;
    if n != f.len() {
        return Err(Error::invalid("paths and f differ in length"));
    }
    for g in family {
        g.validate(f)?;
    }
    let mut levels = vec![BTreeSet::new(); n];
    for (k, level) in levels.iter_mut().enumerate().skip(from) {
        *level = family.iter().map(|g| g.0[k]).collect();
        if level.len() > k {
            return Err(Error::Infeasible(format!(
                "level {k} needs {} values but the rule allows {k}",
                level.len()
            )));
        }
    }
    Slalom::new(f, levels, WidthRule::Localization)
}

/// `g(k) = g_n(k)` for `h(n) < k ≤ h(n+1)`; `g_0` below and `g_M` above.
pub fn splice(gs: &[Path], h: &[usize]) -> Result<Path> {
    let n = common_length(gs)?;
    if h.len() != gs.len() + 1 {
        return Err(Error::invalid(format!(
            "need {} cut points for {} paths, got {}",
            gs.len() + 1,
            gs.len(),
            h.len()
        )));
    }
    if h.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::invalid("h must be strictly increasing"));
    }
    if *h.last().expect("non-empty") > n {
        return Err(Error::invalid("h exceeds the horizon"));
    }
    let g = (0..n)
        .map(|k| {
            let piece = (0..gs.len())
                .find(|&i| h[i] < k && k <= h[i + 1])
                .unwrap_or(if k <= h[0] { 0 } else { gs.len() - 1 });
            gs[piece].0[k]
        })
        .collect();
    Ok(Path(g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(v: &[u64]) -> GrowthFn {
        GrowthFn::new(v.to_vec()).unwrap()
    }

    fn sl(f: &GrowthFn, levels: &[&[u64]]) -> Slalom {
        let lv = levels.iter().map(|l| l.iter().copied().collect()).collect();
        Slalom::new(f, lv, WidthRule::Custom(vec![u64::MAX; f.len()])).unwrap()
    }

    #[test]
    fn captures_examples() {
        let f = gf(&[2, 2]);
        let g = Path(vec![1, 0]);
        let exact = sl(&f, &[&[1], &[0]]);
        for mode in [CaptureMode::InfinitelyOften, CaptureMode::AlmostEverywhere] {
            assert!(captures(&exact, &g, mode, 0, 1).unwrap());
        }
        let empty = sl(&f, &[&[], &[]]);
        assert!(!captures(&empty, &g, CaptureMode::InfinitelyOften, 0, 1).unwrap());
        let zeros = sl(&f, &[&[0], &[0]]);
        assert!(!captures(&zeros, &Path(vec![1, 1]), CaptureMode::InfinitelyOften, 0, 1).unwrap());
        assert!(captures(&zeros, &g, CaptureMode::InfinitelyOften, 0, 3).is_ok());
        assert!(captures(&zeros, &g, CaptureMode::InfinitelyOften, 2, 1).is_err());
    }

    #[test]
    fn width_rules() {
        assert_eq!(forced_empty_levels(&gf(&[1, 2, 4])), vec![0, 1, 2]);
        let f = gf(&[1, 4, 16]);
        assert_eq!(forced_empty_levels(&f), vec![0]);
        assert!(WidthRule::Sigma.admits(3, 16, 1));
        assert!(!WidthRule::Sigma.admits(3, 16, 2));
        assert!(!WidthRule::Sigma.admits(2, 4, 1));
        assert_eq!(WidthRule::Sigma.max_width(3, 17), 2);
        assert_eq!(WidthRule::Localization.max_width(3, 2), 2);
        assert!(Slalom::new(&f, vec![BTreeSet::new(), [1].into(), BTreeSet::new()], WidthRule::Localization).is_ok());
        assert!(Slalom::new(&f, vec![[0].into(), BTreeSet::new(), BTreeSet::new()], WidthRule::Localization).is_err());
        assert!(Slalom::new(&f, vec![BTreeSet::new(), [4].into(), BTreeSet::new()], WidthRule::Custom(vec![9; 3])).is_err());
    }

    #[test]
    fn to_slalom_examples() {
        let j0 = BlockSet::from_codes(0, 1, [0], 24).unwrap();
        let (f, s) = SmallSetData::new(vec![j0]).unwrap().to_slalom().unwrap();
        assert_eq!(f.values(), [2]);
        assert_eq!(s.level(0).iter().copied().collect::<Vec<_>>(), [0]);

        let empties = vec![
            BlockSet::empty(0, 2).unwrap(),
            BlockSet::empty(2, 5).unwrap(),
        ];
        let (_, s) = SmallSetData::new(empties).unwrap().to_slalom().unwrap();
        assert!(s.levels().iter().all(|l| l.is_empty()));

        // |I_n| = 2n+1, |J_n| = 2
        let mut lo = 0;
        let sets: Vec<BlockSet> = (0..4)
            .map(|n| {
                let len = 2 * n + 1;
                let s = BlockSet::from_codes(lo, lo + len, [0, 1], 24).unwrap();
                lo += len;
                s
            })
            .collect();
        let data = SmallSetData::new(sets).unwrap();
        let (f, s) = data.to_slalom().unwrap();
        for (n, w) in level_widths(&f, &s).iter().enumerate() {
            assert_eq!(*w, data.sets()[n].measure());
            assert!(*w <= exact::inv_pow2(2 * n as u64));
            if n >= 1 {
                assert!(*w < exact::inv_pow2(n as u64));
            }
        }
        let too_big = BlockSet::from_codes(1, 3, [0, 3], 24).unwrap();
        let first = BlockSet::empty(0, 1).unwrap();
        assert!(SmallSetData::new(vec![first, too_big]).is_err());
        let a = BlockSet::empty(0, 3).unwrap();
        let b = BlockSet::empty(2, 9).unwrap();
        assert!(SmallSetData::new(vec![a, b]).is_err());
    }

    #[test]
    fn cov_fin_examples() {
        let opts = SearchOptions::default();
        assert_eq!(cov_fin(&gf(&[2, 2]), &[1, 1], 1, &opts).unwrap().value(), Some(2));
        assert_eq!(cov_fin(&gf(&[3, 4, 2]), &[3, 4, 2], 3, &opts).unwrap().value(), Some(1));
        assert!(matches!(
            cov_fin(&gf(&[3, 2]), &[0, 0], 1, &opts).unwrap(),
            CoverOutcome::Infeasible { .. }
        ));
    }

    #[test]
    fn cof_fin_examples() {
        let opts = SearchOptions::default();
        let out = cof_fin(&gf(&[3, 3]), &[2, 2], &opts).unwrap();
        let CoverOutcome::Optimal { value, witness } = out else {
            panic!("expected optimum")
        };
        assert_eq!(value, 3);
        let inst = CoverInstance::new(&gf(&[3, 3]), &[2, 2], CoverKind::Cof, &opts).unwrap();
        assert!(inst.is_cover(&witness));
        assert_eq!(cof_fin(&gf(&[4]), &[2], &opts).unwrap().value(), Some(2));
        assert_eq!(cof_fin(&gf(&[4]), &[4], &opts).unwrap().value(), Some(1));
        assert_eq!(cof_fin(&gf(&[3, 5, 2]), &[3, 5, 2], &opts).unwrap().value(), Some(1));
    }

    #[test]
    fn solver_guards() {
        let opts = SearchOptions {
            path_guard: 100,
            ..SearchOptions::default()
        };
        assert!(cof_fin(&gf(&[11, 11]), &[2, 2], &opts).unwrap_err().is_guard());
        assert!(cof_fin(&gf(&[65]), &[2], &SearchOptions::default()).unwrap_err().is_guard());
        let capped = SearchOptions {
            max_family: Some(2),
            ..SearchOptions::default()
        };
        assert_eq!(
            cof_fin(&gf(&[3, 3]), &[2, 2], &capped).unwrap(),
            CoverOutcome::AboveCap { cap: 2 }
        );
    }

    #[test]
    fn worker_count_does_not_change_the_witness() {
        let f = gf(&[4, 3, 3]);
        let one = cof_fin(&f, &[2, 2, 2], &SearchOptions::default()).unwrap();
        let four = cof_fin(&f, &[2, 2, 2], &SearchOptions { workers: 4, ..Default::default() }).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn match_intervals_examples() {
        let single = [Path(vec![1, 0, 2, 2])];
        let m = match_intervals(&single, &BlockPolicy::Fixed(2)).unwrap();
        assert_eq!(m.h, single[0]);
        let fam = [Path(vec![0, 0, 0, 0]), Path(vec![1, 1, 1, 1])];
        let m = match_intervals(&fam, &BlockPolicy::Fixed(2)).unwrap();
        assert_eq!(m.h.0, [0, 1, 0, 1]);
        assert!(verify_matching(&fam, &m));
        assert!(matches!(
            match_intervals(&fam, &BlockPolicy::Fixed(1)),
            Err(Error::Infeasible(_))
        ));
        let fam3 = [
            Path(vec![0, 1, 2, 0, 1, 2]),
            Path(vec![1, 2, 0, 1, 2, 0]),
            Path(vec![2, 0, 1, 2, 0, 1]),
        ];
        let m = match_intervals(&fam3, &BlockPolicy::Fixed(3)).unwrap();
        assert!(verify_matching(&fam3, &m));
        assert_eq!(m.cuts.points(), [0, 3, 6]);
    }

    #[test]
    fn localize_examples() {
        let f = gf(&[5; 6]);
        let fam = [
            Path(vec![0, 1, 2, 3, 4, 0]),
            Path(vec![1, 1, 1, 1, 1, 1]),
            Path(vec![4, 3, 2, 1, 0, 4]),
        ];
        let s = localize(&fam, &f, 3).unwrap();
        for n in 3..6 {
            assert!(s.level(n).len() <= 3);
            for g in &fam {
                assert!(s.level(n).contains(&g.0[n]));
            }
        }
        for g in &fam {
            assert!(captures(&s, g, CaptureMode::AlmostEverywhere, 3, 0).unwrap());
        }
        let one = localize(&fam[..1], &f, 1).unwrap();
        assert!(one.levels()[1..].iter().all(|l| l.len() == 1));
        // n+1 distinct values at level n
        let f = gf(&[8; 4]);
        let adv: Vec<Path> = (0..4u64).map(|i| Path(vec![i, i, i, i])).collect();
        assert!(matches!(localize(&adv, &f, 2), Err(Error::Infeasible(_))));
    }

    #[test]
    fn splice_examples() {
        let g = Path(vec![3, 1, 4, 1, 5]);
        assert_eq!(splice(&[g.clone(), g.clone()], &[0, 2, 4]).unwrap(), g);
        let a = Path(vec![0; 5]);
        let b = Path(vec![1; 5]);
        let s = splice(&[a, b], &[0, 2, 4]).unwrap();
        assert_eq!(s.0, [0, 0, 0, 1, 1]);
        assert!(splice(&[g.clone(), g.clone()], &[0, 3, 3]).is_err());
        assert!(splice(&[g.clone()], &[0, 6]).is_err());
    }
}
