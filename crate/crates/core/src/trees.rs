//! Level trees on `2^{<N}`.
//!
//! A tree is stored as one [`BlockSet`] per level `m ≤ N`, each on `[0, m)`.
//! Below the horizon every node has a successor; level `N` is the frontier.

use std::fmt::Write as _;

use crate::cube::{BlockSet, Word, DEFAULT_GUARD};
use crate::error::{Error, Result};
use crate::exact::Rational;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LevelTree {
    levels: Vec<BlockSet>,
}

/// Strictly increasing coordinates `f(0) < f(1) < … < f(K)`.
#[derive(Clone, PartialEq, Eq, Debug, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct CutSequence(Vec<usize>);

impl CutSequence {
    pub fn new(cuts: Vec<usize>) -> Result<Self> {
        if cuts.is_empty() {
            return Err(Error::invalid("a cut sequence needs at least one point"));
        }
        if let Some(p) = cuts.windows(2).find(|p| p[0] >= p[1]) {
            return Err(Error::invalid(format!(
                "cuts must increase strictly, found {} then {}",
                p[0], p[1]
            )));
        }
        Ok(CutSequence(cuts))
    }

    pub fn points(&self) -> &[usize] {
        &self.0
    }

    /// Number of blocks `K`.
    pub fn blocks(&self) -> usize {
        self.0.len() - 1
    }

    /// `[f(n), f(n+1))`
    pub fn block(&self, n: usize) -> (usize, usize) {
        (self.0[n], self.0[n + 1])
    }

    pub fn start(&self) -> usize {
        self.0[0]
    }

    pub fn end(&self) -> usize {
        *self.0.last().expect("non-empty")
    }
}

impl TryFrom<Vec<usize>> for CutSequence {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        CutSequence::new(v)
    }
}

impl From<CutSequence> for Vec<usize> {
    fn from(c: CutSequence) -> Self {
        c.0
    }
}

fn node_check(s: &Word) -> Result<()> {
    if s.lo() != 0 {
        return Err(Error::invalid("tree nodes start at coordinate 0"));
    }
    Ok(())
}

impl LevelTree {
    /// Builds a tree from explicit levels and validates it.
    pub fn from_levels(levels: Vec<BlockSet>) -> Result<Self> {
        let t = LevelTree { levels };
        t.validate()?;
        Ok(t)
    }

    /// The tree of all prefixes of a frontier set on `[0, N)`.
    pub fn from_frontier(frontier: &BlockSet) -> Result<Self> {
        if frontier.lo() != 0 {
            return Err(Error::invalid("frontier must live on [0, N)"));
        }
        if frontier.is_empty() {
            return Err(Error::invalid("a tree needs at least one branch"));
        }
        let n = frontier.hi();
        let levels = (0..=n)
            .map(|m| {
                BlockSet::from_codes(0, m, frontier.codes().map(|c| c >> (n - m)), n.max(1))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LevelTree { levels })
    }

    pub fn full(horizon: usize) -> Result<Self> {
        Self::from_frontier(&BlockSet::full(0, horizon)?)
    }

    pub fn full_guarded(horizon: usize, guard: usize) -> Result<Self> {
        Self::from_frontier(&BlockSet::full_guarded(0, horizon, guard)?)
    }

    /// The single branch through `w`.
    pub fn single_branch(w: &Word) -> Result<Self> {
        node_check(w)?;
        Self::from_frontier(&BlockSet::from_words_guarded(
            0,
            w.hi(),
            [w],
            w.hi().max(DEFAULT_GUARD),
        )?)
    }

    pub fn horizon(&self) -> usize {
        self.levels.len() - 1
    }

    /// `T↾m` as a set of words on `[0, m)`.
    pub fn level(&self, m: usize) -> Result<&BlockSet> {
        self.levels.get(m).ok_or(Error::LevelOutOfRange {
            level: m,
            horizon: self.horizon(),
        })
    }

    pub fn levels(&self) -> &[BlockSet] {
        &self.levels
    }

    pub fn level_count(&self, m: usize) -> Result<u64> {
        Ok(self.level(m)?.len())
    }

    pub fn contains(&self, s: &Word) -> bool {
        s.lo() == 0
            && self
                .levels
                .get(s.len())
                .is_some_and(|l| l.contains_code(s.code()))
    }

    /// Level 0 is the empty word, every node's parent is present, and every
    /// node below the horizon has a child.
    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::invalid("a tree has at least level 0"));
        }
        for (m, l) in self.levels.iter().enumerate() {
            if l.lo() != 0 || l.hi() != m {
                return Err(Error::invalid(format!("level {m} must live on [0, {m})")));
            }
        }
        if self.levels[0].len() != 1 {
            return Err(Error::invalid("level 0 must be exactly the empty word"));
        }
        for m in 0..self.horizon() {
            let (upper, lower) = (&self.levels[m], &self.levels[m + 1]);
            if let Some(c) = lower.codes().find(|c| !upper.contains_code(c >> 1)) {
                return Err(Error::invalid(format!(
                    "node {} at level {} has no parent",
                    Word::from_code(0, m + 1, c),
                    m + 1
                )));
            }
            if let Some(c) = upper
                .codes()
                .find(|c| !lower.contains_code(2 * c) && !lower.contains_code(2 * c + 1))
            {
                return Err(Error::invalid(format!(
                    "node {} at level {m} is a dead end below the horizon",
                    Word::from_code(0, m, c)
                )));
            }
        }
        Ok(())
    }

    fn require_node(&self, s: &Word) -> Result<()> {
        node_check(s)?;
        if !self.contains(s) {
            return Err(Error::NodeNotInTree(s.to_string()));
        }
        Ok(())
    }

    /// `succ_{T,m}(s)`: the level-`m` nodes extending `s`.
    pub fn succ(&self, m: usize, s: &Word) -> Result<Vec<Word>> {
        self.require_node(s)?;
        if m < s.len() || m > self.horizon() {
            return Err(Error::LevelOutOfRange {
                level: m,
                horizon: self.horizon(),
            });
        }
        let shift = m - s.len();
        let base = s.code() << shift;
        let level = &self.levels[m];
        Ok((base..base + (1u64 << shift))
            .filter(|&c| level.contains_code(c))
            .map(|c| Word::from_code(0, m, c))
            .collect())
    }

    /// `T_s`: the nodes comparable with `s`.
    pub fn subtree_at(&self, s: &Word) -> Result<LevelTree> {
        self.require_node(s)?;
        let (len, code) = (s.len(), s.code());
        let levels = self
            .levels
            .iter()
            .enumerate()
            .map(|(m, l)| {
                if m <= len {
                    BlockSet::from_codes(0, m, [code >> (len - m)], m)
                } else {
                    BlockSet::from_codes(0, m, l.codes().filter(|c| c >> (m - len) == code), m)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LevelTree { levels })
    }

    /// `T^⟨n⟩`: words free on `[0, n)` whose tail on `[n, L)` follows some
    /// node of `T↾L`.
    pub fn shift_tree(&self, n: usize) -> Result<LevelTree> {
        let horizon = self.horizon();
        if n > horizon {
            return Err(Error::LevelOutOfRange { level: n, horizon });
        }
        let levels = self
            .levels
            .iter()
            .enumerate()
            .map(|(m, l)| {
                if m <= n {
                    BlockSet::full_guarded(0, m, m)
                } else {
                    let tail_mask = (1u64 << (m - n)) - 1;
                    let tails =
                        BlockSet::from_codes(0, m - n, l.codes().map(|c| c & tail_mask), m)?;
                    BlockSet::from_predicate(0, m, m, |c| tails.contains_code(c & tail_mask))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LevelTree { levels })
    }

    /// `|T↾m| / 2^m`
    pub fn level_measure(&self, m: usize) -> Result<Rational> {
        Ok(self.level(m)?.measure())
    }

    /// Level `m` of `⋃_{q ∈ 2^n} (T + q)`, where `q` is zero past coordinate `n`.
    pub fn rational_translates_level(&self, n: usize, m: usize) -> Result<BlockSet> {
        let level = self.level(m)?;
        let mut acc = BlockSet::empty_guarded(0, m, m)?;
        for q in 0..(1u64 << n) {
            let shift = if m >= n { q << (m - n) } else { q >> (n - m) };
            acc = acc.union(&level.translate_code(shift))?;
        }
        Ok(acc)
    }

    /// Finite form of `[T] + Q = ⋃_n [T^⟨n⟩]`: the translates of `T` by every
    /// word supported on `[0, n)` fill out exactly `T^⟨n⟩`, level by level.
    pub fn rational_closure_check(&self, n: usize) -> Result<bool> {
        let shifted = self.shift_tree(n)?;
        for m in 0..=self.horizon() {
            if self.rational_translates_level(n, m)? != shifted.levels[m] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `horizon N`, then `level m: node node …`; the empty word is `-`.
    pub fn to_text(&self) -> String {
        let mut out = format!("horizon {}\n", self.horizon());
        for (m, l) in self.levels.iter().enumerate() {
            let _ = write!(out, "level {m}:");
            for w in l.words() {
                out.push(' ');
                if w.is_empty() {
                    out.push('-');
                } else {
                    out.push_str(&w.to_string());
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::from_text_guarded(text, DEFAULT_GUARD)
    }

    pub fn from_text_guarded(text: &str, guard: usize) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::Parse { line: line + 1, msg };
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (hl, header) = lines
            .next()
            .ok_or_else(|| perr(0, "missing `horizon N` header".into()))?;
        let horizon: usize = header
            .trim()
            .strip_prefix("horizon")
            .and_then(|r| r.trim().parse().ok())
            .ok_or_else(|| perr(hl, "expected `horizon N`".into()))?;
        let mut levels: Vec<Option<BlockSet>> = vec![None; horizon + 1];
        for (ln, line) in lines {
            let (head, nodes) = line
                .split_once(':')
                .ok_or_else(|| perr(ln, "expected `level m: …`".into()))?;
            let m: usize = head
                .trim()
                .strip_prefix("level")
                .and_then(|r| r.trim().parse().ok())
                .ok_or_else(|| perr(ln, "expected `level m:`".into()))?;
            if m > horizon {
                return Err(perr(ln, format!("level {m} beyond horizon {horizon}")));
            }
            let words = nodes
                .split_whitespace()
                .map(|tok| {
                    let w = Word::parse(0, if tok == "-" { "" } else { tok })?;
                    if w.len() != m {
                        return Err(Error::invalid(format!("node {tok} is not of length {m}")));
                    }
                    Ok(w)
                })
                .collect::<Result<Vec<_>>>()
                .map_err(|e| perr(ln, e.to_string()))?;
            levels[m] = Some(BlockSet::from_words_guarded(0, m, &words, guard)?);
        }
        let levels = levels
            .into_iter()
            .enumerate()
            .map(|(m, l)| l.ok_or_else(|| perr(0, format!("level {m} missing"))))
            .collect::<Result<Vec<_>>>()?;
        LevelTree::from_levels(levels)
    }
}
