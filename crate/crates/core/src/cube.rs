//! Finite pieces of the Cantor cube.
//!
//! A [`Word`] is a 0/1 assignment to the half-open coordinate interval
//! `[lo, hi)`. A [`BlockSet`] is a set of words on one interval, stored
//! densely as a bitset indexed by the integer code of each word. Codes are
//! read most-significant-bit first: coordinate `lo` is the top bit, so
//! ascending code order is the lexicographic order of the 0/1 strings.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{self, Rational};

/// Default ceiling on the length of a materialized interval.
pub const DEFAULT_GUARD: usize = 24;
/// Nothing is ever materialized above this many coordinates.
pub const HARD_CEILING: usize = 30;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    lo: usize,
    bits: Vec<bool>,
}

impl Word {
    pub fn new(lo: usize, bits: Vec<bool>) -> Self {
        Word { lo, bits }
    }

    pub fn zeros(lo: usize, hi: usize) -> Self {
        assert!(lo <= hi, "lo must not exceed hi");
        Word {
            lo,
            bits: vec![false; hi - lo],
        }
    }

    pub fn empty(at: usize) -> Self {
        Word::zeros(at, at)
    }

    /// Parses a 0/1 string placed at coordinate `lo`.
    pub fn parse(lo: usize, s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::invalid(format!("bad bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Word { lo, bits })
    }

    /// Word on `[lo, lo+len)` whose most-significant-first code is `code`.
    pub fn from_code(lo: usize, len: usize, code: u64) -> Self {
        debug_assert!(len <= 64);
        let bits = (0..len).map(|i| (code >> (len - 1 - i)) & 1 == 1).collect();
        Word { lo, bits }
    }

    pub fn lo(&self) -> usize {
        self.lo
    }

    pub fn hi(&self) -> usize {
        self.lo + self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Bit at absolute coordinate `coord`.
    pub fn get(&self, coord: usize) -> bool {
        self.bits[coord - self.lo]
    }

    pub fn set(&mut self, coord: usize, value: bool) {
        let lo = self.lo;
        self.bits[coord - lo] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|b| !b)
    }

    pub fn same_interval(&self, other: &Word) -> bool {
        self.lo == other.lo && self.len() == other.len()
    }

    /// `self ↾ [a, b)`
    pub fn restrict(&self, a: usize, b: usize) -> Result<Word> {
        if a < self.lo || b > self.hi() || a > b {
            return Err(Error::invalid(format!(
                "cannot restrict [{}, {}) to [{a}, {b})",
                self.lo,
                self.hi()
            )));
        }
        Ok(Word {
            lo: a,
            bits: self.bits[a - self.lo..b - self.lo].to_vec(),
        })
    }

    /// Concatenation; `other` must start where `self` ends.
    pub fn concat(&self, other: &Word) -> Result<Word> {
        if other.lo != self.hi() {
            return Err(Error::IntervalMismatch(
                self.lo,
                self.hi(),
                other.lo,
                other.hi(),
            ));
        }
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        Ok(Word { lo: self.lo, bits })
    }

    /// Coordinatewise sum mod 2.
    pub fn xor(&self, other: &Word) -> Result<Word> {
        if !self.same_interval(other) {
            return Err(self.mismatch(other));
        }
        Ok(Word {
            lo: self.lo,
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| a ^ b)
                .collect(),
        })
    }

    /// Most-significant-first integer code. Only defined up to 64 coordinates.
    pub fn code(&self) -> u64 {
        assert!(self.len() <= 64, "word too long for an integer code");
        self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    fn mismatch(&self, other: &Word) -> Error {
        Error::IntervalMismatch(self.lo, self.hi(), other.lo, other.hi())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word[{}..{}]({})", self.lo, self.hi(), self)
    }
}

/// Coordinatewise sum mod 2 of two words on the same interval.
pub fn xor(a: &Word, b: &Word) -> Result<Word> {
    a.xor(b)
}

/// A set of patterns on `[lo, hi)`, stored as a dense bitset over codes.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BlockSet {
    lo: usize,
    hi: usize,
    words: Vec<u64>,
    count: u64,
}

fn check_interval(lo: usize, hi: usize, guard: usize) -> Result<()> {
    if lo > hi {
        return Err(Error::invalid(format!("interval [{lo}, {hi}) is reversed")));
    }
    let limit = guard.min(HARD_CEILING);
    if hi - lo > limit {
        return Err(Error::guard(
            "materialized interval length",
            (hi - lo) as u64,
            limit as u64,
        ));
    }
    Ok(())
}

fn storage_words(len: usize) -> usize {
    if len >= 6 {
        1 << (len - 6)
    } else {
        1
    }
}

fn universe_mask(len: usize) -> u64 {
    if len >= 6 {
        u64::MAX
    } else {
        (1u64 << (1u32 << len)) - 1
    }
}

const SWAP_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

/// Permutes the 64 bit positions of `v` by `i -> i ^ x` for a 6-bit `x`.
#[inline]
fn xor_permute(mut v: u64, x: u64) -> u64 {
    for (b, &m) in SWAP_MASKS.iter().enumerate() {
        if (x >> b) & 1 == 1 {
            let s = 1u32 << b;
            v = ((v & m) << s) | ((v >> s) & m);
        }
    }
    v
}

impl BlockSet {
    pub fn empty(lo: usize, hi: usize) -> Result<Self> {
        Self::empty_guarded(lo, hi, DEFAULT_GUARD)
    }

    pub fn empty_guarded(lo: usize, hi: usize, guard: usize) -> Result<Self> {
        check_interval(lo, hi, guard)?;
        Ok(BlockSet {
            lo,
            hi,
            words: vec![0; storage_words(hi - lo)],
            count: 0,
        })
    }

    pub fn full(lo: usize, hi: usize) -> Result<Self> {
        Self::full_guarded(lo, hi, DEFAULT_GUARD)
    }

    pub fn full_guarded(lo: usize, hi: usize, guard: usize) -> Result<Self> {
        let mut s = Self::empty_guarded(lo, hi, guard)?;
        let mask = universe_mask(hi - lo);
        s.words.iter_mut().for_each(|w| *w = mask);
        s.count = 1u64 << (hi - lo);
        Ok(s)
    }

    pub fn from_codes(
        lo: usize,
        hi: usize,
        codes: impl IntoIterator<Item = u64>,
        guard: usize,
    ) -> Result<Self> {
        let mut s = Self::empty_guarded(lo, hi, guard)?;
        let size = s.universe_size();
        for c in codes {
            if c >= size {
                return Err(Error::invalid(format!(
                    "code {c} out of range for an interval of length {}",
                    hi - lo
                )));
            }
            s.insert_code(c);
        }
        Ok(s)
    }

    pub fn from_words<'a>(
        lo: usize,
        hi: usize,
        words: impl IntoIterator<Item = &'a Word>,
    ) -> Result<Self> {
        Self::from_words_guarded(lo, hi, words, DEFAULT_GUARD)
    }

    pub fn from_words_guarded<'a>(
        lo: usize,
        hi: usize,
        words: impl IntoIterator<Item = &'a Word>,
        guard: usize,
    ) -> Result<Self> {
        let mut s = Self::empty_guarded(lo, hi, guard)?;
        for w in words {
            if w.lo() != lo || w.hi() != hi {
                return Err(Error::IntervalMismatch(lo, hi, w.lo(), w.hi()));
            }
            s.insert_code(w.code());
        }
        Ok(s)
    }

    /// All words on `[lo, hi)` satisfying `pred`.
    pub fn from_predicate(
        lo: usize,
        hi: usize,
        guard: usize,
        pred: impl Fn(u64) -> bool + Sync,
    ) -> Result<Self> {
        let mut s = Self::empty_guarded(lo, hi, guard)?;
        let size = s.universe_size();
        let per_word = size.min(64);
        s.words.par_iter_mut().enumerate().for_each(|(wi, w)| {
            let base = wi as u64 * 64;
            let mut acc = 0u64;
            for b in 0..per_word {
                if pred(base + b) {
                    acc |= 1 << b;
                }
            }
            *w = acc;
        });
        s.recount();
        Ok(s)
    }

    fn insert_code(&mut self, c: u64) {
        let (w, b) = ((c >> 6) as usize, c & 63);
        if self.words[w] >> b & 1 == 0 {
            self.words[w] |= 1 << b;
            self.count += 1;
        }
    }

    fn recount(&mut self) {
        self.count = self.words.iter().map(|w| w.count_ones() as u64).sum();
    }

    pub fn lo(&self) -> usize {
        self.lo
    }

    pub fn hi(&self) -> usize {
        self.hi
    }

    pub fn interval_len(&self) -> usize {
        self.hi - self.lo
    }

    pub fn universe_size(&self) -> u64 {
        1u64 << self.interval_len()
    }

    pub fn len(&self) -> u64 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn is_full(&self) -> bool {
        self.count == self.universe_size()
    }

    pub fn same_interval(&self, other: &BlockSet) -> bool {
        self.lo == other.lo && self.hi == other.hi
    }

    pub fn contains_code(&self, c: u64) -> bool {
        c < self.universe_size() && (self.words[(c >> 6) as usize] >> (c & 63)) & 1 == 1
    }

    pub fn contains(&self, w: &Word) -> bool {
        w.lo() == self.lo && w.hi() == self.hi && self.contains_code(w.code())
    }

    /// Member codes in ascending order.
    pub fn codes(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let b = rest.trailing_zeros() as u64;
                    rest &= rest - 1;
                    Some(wi as u64 * 64 + b)
                }
            })
        })
    }

    pub fn words(&self) -> impl Iterator<Item = Word> + '_ {
        let (lo, len) = (self.lo, self.interval_len());
        self.codes().map(move |c| Word::from_code(lo, len, c))
    }

    /// `|patterns| / 2^{hi-lo}`
    pub fn measure(&self) -> Rational {
        exact::counting_measure(self.count, self.interval_len() as u64)
    }

    fn mismatch(&self, other: &BlockSet) -> Error {
        Error::IntervalMismatch(self.lo, self.hi, other.lo, other.hi)
    }

    /// `{a + x : a ∈ self}` for a translation code `x`.
    pub fn translate_code(&self, x: u64) -> BlockSet {
        debug_assert!(x < self.universe_size());
        let (hi_part, lo_part) = ((x >> 6) as usize, x & 63);
        let words = (0..self.words.len())
            .map(|wi| xor_permute(self.words[wi ^ hi_part], lo_part))
            .collect();
        BlockSet {
            lo: self.lo,
            hi: self.hi,
            words,
            count: self.count,
        }
    }

    pub fn translate(&self, x: &Word) -> Result<BlockSet> {
        if x.lo() != self.lo || x.hi() != self.hi {
            return Err(Error::IntervalMismatch(self.lo, self.hi, x.lo(), x.hi()));
        }
        Ok(self.translate_code(x.code()))
    }

    pub fn intersection(&self, other: &BlockSet) -> Result<BlockSet> {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn union(&self, other: &BlockSet) -> Result<BlockSet> {
        self.zip_with(other, |a, b| a | b)
    }

    fn zip_with(&self, other: &BlockSet, op: impl Fn(u64, u64) -> u64) -> Result<BlockSet> {
        if !self.same_interval(other) {
            return Err(self.mismatch(other));
        }
        let mut out = BlockSet {
            lo: self.lo,
            hi: self.hi,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| op(a, b))
                .collect(),
            count: 0,
        };
        out.recount();
        Ok(out)
    }

    pub fn complement(&self) -> BlockSet {
        let mask = universe_mask(self.interval_len());
        BlockSet {
            lo: self.lo,
            hi: self.hi,
            words: self.words.iter().map(|w| !w & mask).collect(),
            count: self.universe_size() - self.count,
        }
    }

    /// Header line `interval a b`, then one 0/1 pattern per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("interval {} {}\n", self.lo, self.hi);
        for w in self.words() {
            out.push_str(&w.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::from_text_guarded(text, DEFAULT_GUARD)
    }

    pub fn from_text_guarded(text: &str, guard: usize) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing `interval a b` header".into(),
        })?;
        let parse_err = |line: usize, msg: &str| Error::Parse {
            line: line + 1,
            msg: msg.to_string(),
        };
        let parts: Vec<&str> = header.split_whitespace().collect();
        let (lo, hi) = match parts.as_slice() {
            ["interval", a, b] => (
                a.parse::<usize>()
                    .map_err(|_| parse_err(hline, "bad interval start"))?,
                b.parse::<usize>()
                    .map_err(|_| parse_err(hline, "bad interval end"))?,
            ),
            _ => return Err(parse_err(hline, "expected `interval a b`")),
        };
        let mut set = Self::empty_guarded(lo, hi, guard)?;
        for (ln, line) in lines {
            let line = line.trim();
            // the empty pattern on a zero-length interval
            let line = if line == "-" { "" } else { line };
            let w = Word::parse(lo, line).map_err(|e| parse_err(ln, &e.to_string()))?;
            if w.len() != hi - lo {
                return Err(parse_err(ln, "pattern length does not match the interval"));
            }
            set.insert_code(w.code());
        }
        Ok(set)
    }
}

impl fmt::Debug for BlockSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BlockSet[{}..{}]{{", self.lo, self.hi)?;
        for (i, w) in self.words().take(16).enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{w}")?;
        }
        if self.count > 16 {
            write!(f, ",…({} total)", self.count)?;
        }
        f.write_str("}")
    }
}

/// Minkowski sum `{a + b : a ∈ A, b ∈ B}` under addition mod 2.
pub fn sumset(a: &BlockSet, b: &BlockSet) -> Result<BlockSet> {
    if !a.same_interval(b) {
        return Err(a.mismatch(b));
    }
    let empty = BlockSet {
        lo: a.lo,
        hi: a.hi,
        words: vec![0; a.words.len()],
        count: 0,
    };
    if a.is_empty() || b.is_empty() {
        return Ok(empty);
    }
    // Every z has z + B meeting A once |A| + |B| exceeds the cube.
    if a.len() + b.len() > a.universe_size() {
        return Ok(BlockSet::full_guarded(a.lo, a.hi, HARD_CEILING).expect("already materialized"));
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let shifts: Vec<u64> = small.codes().collect();
    let words = shifts
        .par_chunks(64)
        .map(|chunk| {
            let mut acc = vec![0u64; large.words.len()];
            for &x in chunk {
                let t = large.translate_code(x);
                acc.iter_mut().zip(&t.words).for_each(|(o, w)| *o |= w);
            }
            acc
        })
        .reduce(
            || vec![0u64; large.words.len()],
            |mut l, r| {
                l.iter_mut().zip(&r).for_each(|(o, w)| *o |= w);
                l
            },
        );
    let mut out = BlockSet { words, ..empty };
    out.recount();
    Ok(out)
}

/// Whether the translated sets `x_i + A_i` are probabilistically independent:
/// every subfamily's intersection measure equals the product of measures.
pub fn independent(family: &[(Word, BlockSet)]) -> Result<bool> {
    independent_guarded(family, DEFAULT_GUARD)
}

pub fn independent_guarded(family: &[(Word, BlockSet)], guard: usize) -> Result<bool> {
    let Some((_, first)) = family.first() else {
        return Ok(true);
    };
    check_interval(first.lo, first.hi, guard)?;
    if family.len() > 24 {
        return Err(Error::guard("independence family size", family.len() as u64, 24));
    }
    let translated = family
        .iter()
        .map(|(x, a)| {
            if !a.same_interval(first) {
                return Err(first.mismatch(a));
            }
            a.translate(x)
        })
        .collect::<Result<Vec<_>>>()?;
    let bits = first.interval_len();
    let m = translated.len();
    let ok = (1u32..(1 << m))
        .into_par_iter()
        .filter(|mask| mask.count_ones() >= 2)
        .all(|mask| {
            let members: Vec<&BlockSet> = (0..m)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| &translated[i])
                .collect();
            let mut inter = members[0].clone();
            for s in &members[1..] {
                inter = inter.intersection(s).expect("same interval");
            }
            // |⋂| / 2^L = ∏ |S_i| / 2^{L·k}  ⇔  |⋂| · 2^{L(k-1)} = ∏ |S_i|
            let lhs = BigUint::from(inter.len()) << (bits * (members.len() - 1));
            let rhs = members
                .iter()
                .fold(BigUint::one(), |acc, s| acc * BigUint::from(s.len()));
            lhs == rhs
        });
    Ok(ok)
}

/// One block of a [`SymbolicProduct`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockConstraint {
    Explicit(BlockSet),
    /// Words on `[lo, hi)` with a 1 somewhere in `support`.
    SomeOne {
        lo: usize,
        hi: usize,
        support: Vec<usize>,
    },
    /// No constraint on `[lo, hi)`.
    Free { lo: usize, hi: usize },
}

impl BlockConstraint {
    pub fn lo(&self) -> usize {
        match self {
            BlockConstraint::Explicit(s) => s.lo(),
            BlockConstraint::SomeOne { lo, .. } | BlockConstraint::Free { lo, .. } => *lo,
        }
    }

    pub fn hi(&self) -> usize {
        match self {
            BlockConstraint::Explicit(s) => s.hi(),
            BlockConstraint::SomeOne { hi, .. } | BlockConstraint::Free { hi, .. } => *hi,
        }
    }

    pub fn measure(&self) -> Rational {
        match self {
            BlockConstraint::Explicit(s) => s.measure(),
            BlockConstraint::SomeOne { support, .. } => {
                exact::one_minus_inv_pow2(support.len() as u64)
            }
            BlockConstraint::Free { .. } => Rational::one(),
        }
    }

    /// Membership of the restriction of `w` to this block.
    pub fn admits(&self, w: &Word) -> bool {
        match self {
            BlockConstraint::Explicit(s) => w
                .restrict(s.lo(), s.hi())
                .map(|r| s.contains(&r))
                .unwrap_or(false),
            BlockConstraint::SomeOne { support, .. } => support.iter().any(|&j| w.get(j)),
            BlockConstraint::Free { .. } => true,
        }
    }
}

/// A product of per-block constraints over consecutive intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicProduct {
    blocks: Vec<BlockConstraint>,
}

impl SymbolicProduct {
    pub fn new(blocks: Vec<BlockConstraint>) -> Result<Self> {
        for pair in blocks.windows(2) {
            if pair[0].hi() != pair[1].lo() {
                return Err(Error::invalid(format!(
                    "blocks are not consecutive: {} then {}",
                    pair[0].hi(),
                    pair[1].lo()
                )));
            }
        }
        for b in &blocks {
            if b.lo() > b.hi() {
                return Err(Error::invalid("reversed block interval"));
            }
            if let BlockConstraint::SomeOne { lo, hi, support } = b {
                if support.iter().any(|j| j < lo || j >= hi) {
                    return Err(Error::invalid("support coordinate outside its block"));
                }
            }
        }
        Ok(SymbolicProduct { blocks })
    }

    pub fn blocks(&self) -> &[BlockConstraint] {
        &self.blocks
    }

    pub fn lo(&self) -> usize {
        self.blocks.first().map_or(0, |b| b.lo())
    }

    pub fn hi(&self) -> usize {
        self.blocks.last().map_or(0, |b| b.hi())
    }

    pub fn measure(&self) -> Rational {
        self.blocks.iter().map(|b| b.measure()).product()
    }

    pub fn contains(&self, w: &Word) -> bool {
        w.lo() == self.lo() && w.hi() == self.hi() && self.blocks.iter().all(|b| b.admits(w))
    }

    /// Index of the first block rejecting `w`.
    pub fn first_rejecting_block(&self, w: &Word) -> Option<usize> {
        self.blocks.iter().position(|b| !b.admits(w))
    }

    pub fn materialize(&self, guard: usize) -> Result<BlockSet> {
        let (lo, hi) = (self.lo(), self.hi());
        check_interval(lo, hi, guard)?;
        let len = hi - lo;
        BlockSet::from_predicate(lo, hi, guard, |code| {
            self.contains(&Word::from_code(lo, len, code))
        })
    }
}

/// Outcome of a check that may be skipped when materialization is too large.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckOutcome {
    Holds,
    Fails,
    NotChecked,
}

impl CheckOutcome {
    pub fn from_bool(b: bool) -> Self {
        if b {
            CheckOutcome::Holds
        } else {
            CheckOutcome::Fails
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SumsetBound {
    /// `|T↾k|·|F|·2^{-k}`
    pub bound: Rational,
    /// Measure of the materialized sumset, when it was computed.
    pub measured: Option<Rational>,
    pub holds: CheckOutcome,
}

/// Checks `μ([T↾k] + [F]) ≤ min(1, |T↾k|·|F|·2^{-k})` with both sets given
/// as level-k prefix sets on `[0, k)`.
pub fn sumset_measure_bound(prefixes: &BlockSet, f: &BlockSet) -> Result<SumsetBound> {
    let mut report = sumset_measure_bound_counts(prefixes.len(), f.len(), f.interval_len());
    let sum = sumset(prefixes, f)?;
    let mu = sum.measure();
    let cap = exact::min(Rational::one(), report.bound.clone());
    report.holds = CheckOutcome::from_bool(mu <= cap);
    report.measured = Some(mu);
    Ok(report)
}

/// Bound only, for horizons too large to materialize.
pub fn sumset_measure_bound_counts(prefix_count: u64, f_count: u64, k: usize) -> SumsetBound {
    let num = BigUint::from(prefix_count) * BigUint::from(f_count);
    let bound = Rational::new(num.into(), exact::pow2(k as u64).into());
    SumsetBound {
        bound,
        measured: None,
        holds: CheckOutcome::NotChecked,
    }
}
