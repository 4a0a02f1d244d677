//! Interleaved two-scale windows.
//!
//! Cuts `n_0 < m_0 < n_1 < m_1 < … < n_K < m_K`. For `k < K`, `J_k` is a set
//! of patterns on `[n_k, n_{k+1})` and `J̃_k` a set on `[m_k, m_{k+1})`. A
//! word `z̃` escapes window `k` when `z̃↾[n_k,n_{k+1}) ∉ J_k` and
//! `z̃↾[m_k,m_{k+1}) ∉ J̃_k`. The escape is built from `z` on the windows
//! `[n_k, m_k)` (avoiding heavy prefixes and suffixes) and `y` on the
//! windows `[m_k, n_{k+1})` (avoiding the obstruction sets `T_k`).
//!
//! Index convention: `T_k` pairs `J_k` with `J̃_k`, whose second half is
//! `z↾[n_{k+1}, m_{k+1})`. Certificates record this.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certificate::{Certificate, Check, Relation};
use crate::cube::{BlockSet, Word};
use crate::error::{Error, Result};
use crate::exact::{self, Rational};

pub const CONVENTION: &str =
    "T_k = {s on [m_k,n_k+1) : z|[n_k,m_k) s in J_k or s z|[n_k+1,m_k+1) in Jt_k}, Jt_k on [m_k,m_k+1)";

/// Windows wider than this are refused.
pub const WINDOW_GUARD: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoScaleFrame {
    cuts: Vec<usize>,
    j: Vec<BlockSet>,
    jt: Vec<BlockSet>,
}

impl TwoScaleFrame {
    /// `cuts = [n_0, m_0, …, n_K, m_K]`; `j` and `jt` have `K` entries each.
    pub fn new(cuts: Vec<usize>, j: Vec<BlockSet>, jt: Vec<BlockSet>) -> Result<Self> {
        if cuts.len() < 2 || cuts.len() % 2 != 0 {
            return Err(Error::invalid("cuts must list pairs n_k m_k"));
        }
        if cuts.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::invalid("cuts must be strictly increasing"));
        }
        let windows = cuts.len() / 2 - 1;
        if j.len() != windows || jt.len() != windows {
            return Err(Error::invalid(format!(
                "expected {windows} sets J_k and J̃_k, got {} and {}",
                j.len(),
                jt.len()
            )));
        }
        let frame = TwoScaleFrame { cuts, j, jt };
        for k in 0..windows {
            let (a, b) = (frame.n(k), frame.n(k + 1));
            if frame.j[k].lo() != a || frame.j[k].hi() != b {
                return Err(Error::IntervalMismatch(a, b, frame.j[k].lo(), frame.j[k].hi()));
            }
            let (a, b) = (frame.m(k), frame.m(k + 1));
            if frame.jt[k].lo() != a || frame.jt[k].hi() != b {
                return Err(Error::IntervalMismatch(a, b, frame.jt[k].lo(), frame.jt[k].hi()));
            }
        }
        Ok(frame)
    }

    /// All `J_k`, `J̃_k` empty.
    pub fn empty(cuts: Vec<usize>) -> Result<Self> {
        let windows = (cuts.len() / 2).saturating_sub(1);
        let at = |i: usize| cuts.get(i).copied().unwrap_or(0);
        let j = (0..windows)
            .map(|k| BlockSet::empty(at(2 * k), at(2 * k + 2)))
            .collect::<Result<_>>()?;
        let jt = (0..windows)
            .map(|k| BlockSet::empty(at(2 * k + 1), at(2 * k + 3)))
            .collect::<Result<_>>()?;
        Self::new(cuts, j, jt)
    }

    pub fn cuts(&self) -> &[usize] {
        &self.cuts
    }

    /// `K`
    pub fn windows(&self) -> usize {
        self.j.len()
    }

    pub fn n(&self, k: usize) -> usize {
        self.cuts[2 * k]
    }

    pub fn m(&self, k: usize) -> usize {
        self.cuts[2 * k + 1]
    }

    pub fn span(&self) -> (usize, usize) {
        (self.cuts[0], *self.cuts.last().expect("nonempty"))
    }

    pub fn j(&self, k: usize) -> &BlockSet {
        &self.j[k]
    }

    pub fn jt(&self, k: usize) -> &BlockSet {
        &self.jt[k]
    }

    /// `|J_k|·2^{n_k-n_{k+1}} ≤ 2^{-2k}` and `|J̃_k|·2^{m_k-m_{k+1}} ≤ 2^{-2k}`.
    pub fn smallness(&self, k: usize) -> (bool, bool) {
        let bound = exact::inv_pow2(2 * k as u64);
        (self.j[k].measure() <= bound, self.jt[k].measure() <= bound)
    }

    pub fn is_small(&self) -> bool {
        (0..self.windows()).all(|k| self.smallness(k) == (true, true))
    }

    fn check_window(&self, k: usize) -> Result<()> {
        if k >= self.windows() {
            return Err(Error::invalid(format!(
                "window {k} does not exist (frame has {})",
                self.windows()
            )));
        }
        Ok(())
    }

    pub fn heavy_prefixes(&self, k: usize) -> Result<Heavy> {
        self.check_window(k)?;
        heavy_prefixes(&self.j[k], self.m(k), k)
    }

    /// Heavy suffixes of `J̃_{k-1}` on `[n_k, m_k)`: suffixes with at least
    /// `2^{n_k-m_{k-1}-(k-1)}` left completions. `None` for `k = 0`.
    pub fn heavy_suffixes(&self, k: usize) -> Result<Option<Heavy>> {
        if k == 0 {
            return Ok(None);
        }
        self.check_window(k - 1)?;
        heavy_suffixes(&self.jt[k - 1], self.n(k), k - 1).map(Some)
    }

    /// `T_k` for the fixed parts of `z` on `[n_k, m_k)` and `[n_{k+1}, m_{k+1})`.
    pub fn obstruction_set(&self, k: usize, z: &Word) -> Result<Obstruction> {
        self.check_window(k)?;
        let (nk, mk, nk1, mk1) = (self.n(k), self.m(k), self.n(k + 1), self.m(k + 1));
        if z.lo() > nk || z.hi() < mk1 {
            return Err(Error::IntervalMismatch(nk, mk1, z.lo(), z.hi()));
        }
        let prefix = z.restrict(nk, mk)?.code();
        let suffix = z.restrict(nk1, mk1)?.code();
        let (w_mid, w_suf) = (nk1 - mk, mk1 - nk1);
        let heavy = heavy_prefixes(&self.j[k], mk, k)?;
        let set = BlockSet::from_predicate(mk, nk1, WINDOW_GUARD, |s| {
            self.j[k].contains_code(prefix << w_mid | s) || self.jt[k].contains_code(s << w_suf | suffix)
        })?;
        Ok(Obstruction {
            prefix_heavy: heavy.set.contains_code(prefix),
            set,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Heavy {
    pub set: BlockSet,
    pub threshold: u64,
    /// the literal exponent was negative and the threshold was raised to 1
    pub clamped: bool,
    /// `|J| / threshold`
    pub bound: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    pub set: BlockSet,
    /// the first disjunct may be large when this is set
    pub prefix_heavy: bool,
}

fn threshold(exponent: i64) -> Result<(u64, bool)> {
    if exponent < 0 {
        Ok((1, true))
    } else if exponent > 62 {
        Err(Error::guard("heavy threshold exponent", exponent as u64, 62))
    } else {
        Ok((1u64 << exponent, false))
    }
}

/// Prefixes `s` on `[lo(J), split)` with at least `2^{hi(J)-split-k}`
/// completions in `J`.
pub fn heavy_prefixes(j: &BlockSet, split: usize, k: usize) -> Result<Heavy> {
    if split < j.lo() || split > j.hi() {
        return Err(Error::invalid("split point outside the pattern interval"));
    }
    let tail = j.hi() - split;
    let (threshold, clamped) = threshold(tail as i64 - k as i64)?;
    let mut counts = vec![0u64; 1usize << (split - j.lo())];
    for c in j.codes() {
        counts[(c >> tail) as usize] += 1;
    }
    let set = BlockSet::from_codes(
        j.lo(),
        split,
        (0..counts.len() as u64).filter(|&s| counts[s as usize] >= threshold),
        WINDOW_GUARD,
    )?;
    Ok(Heavy {
        set,
        threshold,
        clamped,
        bound: Rational::new(j.len().into(), threshold.into()),
    })
}

/// Suffixes `u` on `[split, hi(J))` with at least `2^{split-lo(J)-k}` left
/// completions in `J`.
pub fn heavy_suffixes(j: &BlockSet, split: usize, k: usize) -> Result<Heavy> {
    if split < j.lo() || split > j.hi() {
        return Err(Error::invalid("split point outside the pattern interval"));
    }
    let tail = j.hi() - split;
    let (threshold, clamped) = threshold((split - j.lo()) as i64 - k as i64)?;
    let mut counts = vec![0u64; 1usize << tail];
    let mask = (1u64 << tail) - 1;
    for c in j.codes() {
        counts[(c & mask) as usize] += 1;
    }
    let set = BlockSet::from_codes(
        split,
        j.hi(),
        (0..counts.len() as u64).filter(|&s| counts[s as usize] >= threshold),
        WINDOW_GUARD,
    )?;
    Ok(Heavy {
        set,
        threshold,
        clamped,
        bound: Rational::new(j.len().into(), threshold.into()),
    })
}

/// Interleaves `z_0, y_0, z_1, y_1, …`; consecutive windows must tile.
pub fn merge(z: &[Word], y: &[Word]) -> Result<Word> {
    if !(z.len() == y.len() || z.len() == y.len() + 1) {
        return Err(Error::invalid("z and y window counts do not interleave"));
    }
    let mut parts = Vec::with_capacity(z.len() + y.len());
    for (i, zw) in z.iter().enumerate() {
        parts.push(zw);
        if let Some(yw) = y.get(i) {
            parts.push(yw);
        }
    }
    let mut out = match parts.first() {
        Some(w) => (*w).clone(),
        None => return Ok(Word::empty(0)),
    };
    for w in &parts[1..] {
        if w.lo() != out.hi() {
            return Err(Error::invalid(format!(
                "tiling gap: window starts at {} after {}",
                w.lo(),
                out.hi()
            )));
        }
        out = out.concat(w)?;
    }
    Ok(out)
}

/// Inverse of [`merge`] on the frame's windows.
pub fn split(frame: &TwoScaleFrame, w: &Word) -> Result<(Vec<Word>, Vec<Word>)> {
    let (a, b) = frame.span();
    if w.lo() != a || w.hi() != b {
        return Err(Error::IntervalMismatch(a, b, w.lo(), w.hi()));
    }
    let k = frame.windows();
    let z = (0..=k)
        .map(|i| w.restrict(frame.n(i), frame.m(i)))
        .collect::<Result<_>>()?;
    let y = (0..k)
        .map(|i| w.restrict(frame.m(i), frame.n(i + 1)))
        .collect::<Result<_>>()?;
    Ok((z, y))
}

/// Per-window membership of `z̃` in `J_k` and `J̃_k` for `k ≥ k0`.
pub fn escape_verdicts(frame: &TwoScaleFrame, zt: &Word, k0: usize) -> Result<Vec<(usize, bool, bool)>> {
    let (a, b) = frame.span();
    if zt.lo() != a || zt.hi() != b {
        return Err(Error::IntervalMismatch(a, b, zt.lo(), zt.hi()));
    }
    (k0..frame.windows())
        .map(|k| {
            let in_j = frame.j[k].contains(&zt.restrict(frame.n(k), frame.n(k + 1))?);
            let in_jt = frame.jt[k].contains(&zt.restrict(frame.m(k), frame.m(k + 1))?);
            Ok((k, !in_j, !in_jt))
        })
        .collect()
}

pub const ESCAPE_CONSTRUCTION: &str = "two-scale-escape";

pub fn verify_escape(frame: &TwoScaleFrame, zt: &Word, k0: usize) -> Result<Certificate> {
    let mut b = Certificate::builder(ESCAPE_CONSTRUCTION)
        .param("frame", frame.to_text())
        .param("word", zt.to_string())
        .param("k0", k0);
    b.note(CONVENTION);
    for (k, out_j, out_jt) in escape_verdicts(frame, zt, k0)? {
        b.check(Check::fact(format!("window {k}: outside J_{k}"), out_j));
        b.check(Check::fact(format!("window {k}: outside Jt_{k}"), out_jt));
    }
    Ok(b.finish())
}

/// Lowest code on `[lo, hi)` outside every set in `avoid`.
fn lowest_outside(lo: usize, hi: usize, avoid: &[&BlockSet]) -> Option<u64> {
    (0..(1u64 << (hi - lo))).find(|&c| avoid.iter().all(|s| !s.contains_code(c)))
}

/// `z` avoids the heavy prefixes of `J_k` and heavy suffixes of `J̃_{k-1}`
/// on windows `k ≥ k0` (zero below), then `y` avoids `T_k` for `k ≥ k0`.
/// Always the lowest admissible code, so the result is canonical.
pub fn escape_pipeline(frame: &TwoScaleFrame, k0: usize) -> Result<Word> {
    let kk = frame.windows();
    let mut z = Vec::with_capacity(kk + 1);
    for i in 0..=kk {
        let (lo, hi) = (frame.n(i), frame.m(i));
        if i < k0 {
            z.push(Word::zeros(lo, hi));
            continue;
        }
        let mut avoid = Vec::new();
        if i < kk {
            avoid.push(frame.heavy_prefixes(i)?.set);
        }
        if i > k0 {
            avoid.extend(frame.heavy_suffixes(i)?.map(|h| h.set));
        }
        let refs: Vec<&BlockSet> = avoid.iter().collect();
        let c = lowest_outside(lo, hi, &refs).ok_or_else(|| {
            Error::Infeasible(format!("every z pattern on window {i} is heavy"))
        })?;
        z.push(Word::from_code(lo, hi - lo, c));
    }
    let zfull = merge(
        &z,
        &(0..kk)
            .map(|i| Word::zeros(frame.m(i), frame.n(i + 1)))
            .collect::<Vec<_>>(),
    )?;
    let mut y = Vec::with_capacity(kk);
    for k in 0..kk {
        let (lo, hi) = (frame.m(k), frame.n(k + 1));
        if k < k0 {
            y.push(Word::zeros(lo, hi));
            continue;
        }
        let t = frame.obstruction_set(k, &zfull)?;
        let c = lowest_outside(lo, hi, &[&t.set]).ok_or_else(|| {
            Error::Infeasible(format!("T_{k} fills the whole middle window"))
        })?;
        y.push(Word::from_code(lo, hi - lo, c));
    }
    merge(&z, &y)
}

pub const CONSTRUCTION: &str = "two-scale";

/// Smallness, the counting bound `|S_k|·2^{-(m_k-n_k)} ≤ 2^{-k}`, the heavy
/// set size bound, and the end-to-end escape from `k0`.
pub fn certify_two_scale(frame: &TwoScaleFrame, k0: usize) -> Result<Certificate> {
    let mut b = Certificate::builder(CONSTRUCTION)
        .param("frame", frame.to_text())
        .param("k0", k0);
    b.note(CONVENTION);
    for k in 0..frame.windows() {
        let (sj, sjt) = frame.smallness(k);
        b.check(Check::fact(format!("window {k}: J_{k} small"), sj));
        b.check(Check::fact(format!("window {k}: Jt_{k} small"), sjt));
        let h = frame.heavy_prefixes(k)?;
        let size = Rational::from_integer(h.set.len().into());
        b.check(Check::rational(
            format!("window {k}: |S_{k}| <= |J_{k}|/threshold"),
            &size,
            Relation::Le,
            &h.bound,
        ));
        b.check(Check::rational(
            format!("window {k}: |S_{k}| 2^-(m_k-n_k) <= 2^-k"),
            &h.set.measure(),
            Relation::Le,
            &exact::inv_pow2(k as u64),
        ));
        if h.clamped {
            b.note(format!("window {k}: threshold exponent negative, clamped to 1"));
        }
    }
    let zt = escape_pipeline(frame, k0)?;
    for (k, out_j, out_jt) in escape_verdicts(frame, &zt, k0)? {
        b.check(Check::fact(format!("window {k}: outside J_{k}"), out_j));
        b.check(Check::fact(format!("window {k}: outside Jt_{k}"), out_jt));
    }
    b.witness(zt.to_string());
    Ok(b.finish())
}

/// Frame with random widths in `1..=max_width` and random `J_k`, `J̃_k`
/// at the largest sizes the smallness invariant allows.
pub fn random_frame(windows: usize, max_width: usize, seed: u64) -> Result<TwoScaleFrame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_frame_with(&mut rng, windows, max_width)
}

pub fn random_frame_with(rng: &mut impl Rng, windows: usize, max_width: usize) -> Result<TwoScaleFrame> {
    if max_width == 0 {
        return Err(Error::invalid("window width must be positive"));
    }
    let mut cuts = vec![0usize];
    for _ in 0..2 * windows + 1 {
        let last = *cuts.last().expect("nonempty");
        cuts.push(last + rng.gen_range(1..=max_width));
    }
    let pick = |lo: usize, hi: usize, k: usize, rng: &mut dyn rand::RngCore| -> Result<BlockSet> {
        let len = hi - lo;
        let cap = if len >= 2 * k { 1u64 << (len - 2 * k) } else { 0 };
        let size = rng.gen_range(0..=cap);
        let codes: Vec<u64> = (0..size).map(|_| rng.gen_range(0..(1u64 << len))).collect();
        BlockSet::from_codes(lo, hi, codes, WINDOW_GUARD)
    };
    let j = (0..windows)
        .map(|k| pick(cuts[2 * k], cuts[2 * k + 2], k, rng))
        .collect::<Result<_>>()?;
    let jt = (0..windows)
        .map(|k| pick(cuts[2 * k + 1], cuts[2 * k + 3], k, rng))
        .collect::<Result<_>>()?;
    TwoScaleFrame::new(cuts, j, jt)
}

impl TwoScaleFrame {
    /// `cuts …`, then `J k: p p …` and `Jt k: p p …` lines.
    pub fn to_text(&self) -> String {
        let cuts: Vec<String> = self.cuts.iter().map(|c| c.to_string()).collect();
        let mut out = format!("cuts {}\n", cuts.join(" "));
        for (tag, sets) in [("J", &self.j), ("Jt", &self.jt)] {
            for (k, s) in sets.iter().enumerate() {
                let pats: Vec<String> = s.words().map(|w| w.to_string()).collect();
                out.push_str(&format!("{tag} {k}: {}\n", pats.join(" ")));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cuts: Option<Vec<usize>> = None;
        let mut entries: Vec<(bool, usize, Vec<String>, usize)> = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let perr = |msg: &str| Error::Parse {
                line: ln + 1,
                msg: msg.to_string(),
            };
            if let Some(rest) = line.strip_prefix("cuts") {
                cuts = Some(
                    rest.split_whitespace()
                        .map(|t| t.parse().map_err(|_| perr("bad cut")))
                        .collect::<Result<_>>()?,
                );
                continue;
            }
            let (head, pats) = line.split_once(':').ok_or_else(|| perr("expected `J k:` or `Jt k:`"))?;
            let (tag, k) = head
                .split_once(char::is_whitespace)
                .ok_or_else(|| perr("missing window index"))?;
            let k: usize = k.trim().parse().map_err(|_| perr("bad window index"))?;
            let tilde = match tag {
                "J" => false,
                "Jt" => true,
                _ => return Err(perr("expected `J` or `Jt`")),
            };
            entries.push((tilde, k, pats.split_whitespace().map(str::to_string).collect(), ln + 1));
        }
        let cuts = cuts.ok_or(Error::Parse {
            line: 0,
            msg: "missing `cuts` line".into(),
        })?;
        let mut frame = TwoScaleFrame::empty(cuts)?;
        for (tilde, k, pats, line) in entries {
            if k >= frame.windows() {
                return Err(Error::Parse {
                    line,
                    msg: format!("window {k} does not exist"),
                });
            }
            let (lo, hi) = if tilde {
                (frame.m(k), frame.m(k + 1))
            } else {
                (frame.n(k), frame.n(k + 1))
            };
            let words = pats
                .iter()
                .map(|p| Word::parse(lo, p))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Parse { line, msg: e.to_string() })?;
            let set = BlockSet::from_words_guarded(lo, hi, words.iter(), WINDOW_GUARD)
                .map_err(|e| Error::Parse { line, msg: e.to_string() })?;
            let slot = if tilde { &mut frame.jt[k] } else { &mut frame.j[k] };
            *slot = slot.union(&set)?;
        }
        Ok(frame)
    }
}

pub(crate) fn replay(cert: &Certificate) -> Result<Certificate> {
    let frame = TwoScaleFrame::from_text(&cert.param::<String>("frame")?)?;
    certify_two_scale(&frame, cert.param("k0")?)
}

pub(crate) fn replay_escape(cert: &Certificate) -> Result<Certificate> {
    let frame = TwoScaleFrame::from_text(&cert.param::<String>("frame")?)?;
    let word = Word::parse(frame.span().0, &cert.param::<String>("word")?)?;
    verify_escape(&frame, &word, cert.param("k0")?)
}
