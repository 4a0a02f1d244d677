//! Finite truncations of the meager basis sets `B(f, x)`.
//!
//! A word `w` belongs to the truncation when, for every block
//! `[f(n), f(n+1))` with `n0 ≤ n < K`, it differs from the witness `x`
//! somewhere in that block.

use crate::cube::Word;
use crate::error::{Error, Result};
use crate::trees::CutSequence;

pub const DEFAULT_ORACLE_GUARD: usize = 20;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MeagerRep {
    cuts: CutSequence,
    witness: Word,
    start: usize,
}

impl MeagerRep {
    /// `start == K` is allowed and makes membership vacuous.
    pub fn new(cuts: CutSequence, witness: Word, start: usize) -> Result<Self> {
        if witness.lo() != cuts.start() || witness.hi() != cuts.end() {
            return Err(Error::IntervalMismatch(
                cuts.start(),
                cuts.end(),
                witness.lo(),
                witness.hi(),
            ));
        }
        if start > cuts.blocks() {
            return Err(Error::invalid(format!(
                "start block {start} exceeds the number of blocks {}",
                cuts.blocks()
            )));
        }
        Ok(MeagerRep {
            cuts,
            witness,
            start,
        })
    }

    pub fn cuts(&self) -> &CutSequence {
        &self.cuts
    }

    pub fn witness(&self) -> &Word {
        &self.witness
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn span(&self) -> (usize, usize) {
        (self.cuts.start(), self.cuts.end())
    }

    fn check_span(&self, w: &Word) -> Result<()> {
        let (a, b) = self.span();
        if w.lo() != a || w.hi() != b {
            return Err(Error::IntervalMismatch(a, b, w.lo(), w.hi()));
        }
        Ok(())
    }

    fn differs_on(&self, w: &Word, (a, b): (usize, usize)) -> bool {
        (a..b).any(|j| w.get(j) != self.witness.get(j))
    }

    pub fn member(&self, w: &Word) -> Result<bool> {
        self.check_span(w)?;
        Ok((self.start..self.cuts.blocks()).all(|n| self.differs_on(w, self.cuts.block(n))))
    }

    /// `B(f, x) + z = B(f, x + z)`
    pub fn translate(&self, z: &Word) -> Result<MeagerRep> {
        self.check_span(z)?;
        Ok(MeagerRep {
            cuts: self.cuts.clone(),
            witness: self.witness.xor(z)?,
            start: self.start,
        })
    }

    /// Sufficient criterion for `B(f,x) ⊆ B(g,y)`: every active `g`-block
    /// contains an active `f`-block on which `x` and `y` agree.
    pub fn includes(&self, other: &MeagerRep) -> Result<bool> {
        self.inclusion_witnesses(other).map(|w| w.iter().all(Option::is_some))
    }

    /// For each active block of `other`, the first active block of `self`
    /// that certifies the criterion there.
    pub fn inclusion_witnesses(&self, other: &MeagerRep) -> Result<Vec<Option<usize>>> {
        if self.span() != other.span() {
            let (a, b) = self.span();
            let (c, d) = other.span();
            return Err(Error::IntervalMismatch(a, b, c, d));
        }
        Ok((other.start..other.cuts.blocks())
            .map(|n| {
                let (gl, gh) = other.cuts.block(n);
                (self.start..self.cuts.blocks()).find(|&k| {
                    let (fl, fh) = self.cuts.block(k);
                    gl <= fl
                        && fh <= gh
                        && (fl..fh).all(|j| self.witness.get(j) == other.witness.get(j))
                })
            })
            .collect())
    }

    /// Semantic inclusion by enumerating every word on the span.
    pub fn includes_oracle(&self, other: &MeagerRep) -> Result<bool> {
        self.includes_oracle_guarded(other, DEFAULT_ORACLE_GUARD)
    }

    pub fn includes_oracle_guarded(&self, other: &MeagerRep, guard: usize) -> Result<bool> {
        let (a, b) = self.span();
        if other.span() != (a, b) {
            let (c, d) = other.span();
            return Err(Error::IntervalMismatch(a, b, c, d));
        }
        let len = b - a;
        if len > guard.min(crate::cube::HARD_CEILING) {
            return Err(Error::guard("oracle span", len as u64, guard as u64));
        }
        for code in 0..(1u64 << len) {
            let w = Word::from_code(a, len, code);
            if self.member(&w)? && !other.member(&w)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Lines `cuts f0 … fK`, `witness <bits>`, `start n0`.
    pub fn to_text(&self) -> String {
        let cuts: Vec<String> = self.cuts.points().iter().map(|c| c.to_string()).collect();
        let witness = if self.witness.is_empty() {
            "-".to_string()
        } else {
            self.witness.to_string()
        };
        format!(
            "cuts {}\nwitness {}\nstart {}\n",
            cuts.join(" "),
            witness,
            self.start
        )
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let (mut cuts, mut witness, mut start) = (None, None, None);
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let perr = |msg: &str| Error::Parse {
                line: ln + 1,
                msg: msg.to_string(),
            };
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            match key {
                "cuts" => {
                    let pts = rest
                        .split_whitespace()
                        .map(|t| t.parse::<usize>().map_err(|_| perr("bad cut")))
                        .collect::<Result<Vec<_>>>()?;
                    cuts = Some(pts);
                }
                "witness" => witness = Some(rest.trim().to_string()),
                "start" => {
                    start = Some(rest.trim().parse::<usize>().map_err(|_| perr("bad start"))?)
                }
                _ => return Err(perr("expected cuts, witness or start")),
            }
        }
        let missing = |what: &str| Error::Parse {
            line: 0,
            msg: format!("missing `{what}` line"),
        };
        let cuts = CutSequence::new(cuts.ok_or_else(|| missing("cuts"))?)?;
        let bits = witness.ok_or_else(|| missing("witness"))?;
        let witness = Word::parse(cuts.start(), if bits == "-" { "" } else { &bits })?;
        MeagerRep::new(cuts, witness, start.ok_or_else(|| missing("start"))?)
    }
}
