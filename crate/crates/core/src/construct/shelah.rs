//! The tree sequence `T_m` built from independent block families, its
//! truncated measure, the counting bound `(1-2^{-n})^M > 1/2 ⇒ M ≤ 2^n`,
//! and the capacity check of the localization lemma.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::certificate::{Certificate, Check, Relation};
use crate::cube::{BlockSet, Word, DEFAULT_GUARD};
use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::trees::{CutSequence, LevelTree};

/// How supports are assigned to the nodes of one cut level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Packing {
    /// One private support per node; fails when the block is too short.
    Disjoint,
    /// `⌊len/n⌋` disjoint supports, reused cyclically by node rank.
    Cyclic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShelahTree {
    pub tree: LevelTree,
    pub cuts: CutSequence,
    pub start: usize,
    pub stages: usize,
    pub packing: Packing,
    /// per stage: number of nodes at `f(n)` and number of distinct supports
    pub stage_sizes: Vec<(u64, u64)>,
}

/// Support mask (relative to the block, msb-first) for the node of rank `r`.
fn support_mask(n: usize, len: usize, rank: u64, slots: u64) -> u64 {
    let slot = (rank % slots) as usize;
    let first = slot * n;
    (first..first + n).fold(0u64, |m, j| m | 1u64 << (len - 1 - j))
}

/// `T_m↾f(m) = 2^{f(m)}`, and for `n ≥ m` each node `s` at `f(n)` has
/// exactly the successors `s⌢t`, `t ∈ A_s`, at `f(n+1)`.
pub fn build_shelah_tree(cuts: &CutSequence, m: usize, stages: usize, packing: Packing) -> Result<ShelahTree> {
    build_shelah_tree_guarded(cuts, m, stages, packing, DEFAULT_GUARD)
}

pub fn build_shelah_tree_guarded(
    cuts: &CutSequence,
    m: usize,
    stages: usize,
    packing: Packing,
    guard: usize,
) -> Result<ShelahTree> {
    if m == 0 && stages > 0 {
        return Err(Error::invalid("stage 0 has empty supports and kills every branch"));
    }
    if m + stages > cuts.blocks() {
        return Err(Error::invalid(format!(
            "need cuts up to f({}), have {} blocks",
            m + stages,
            cuts.blocks()
        )));
    }
    let horizon = cuts.points()[m + stages];
    if horizon > guard.min(crate::cube::HARD_CEILING) {
        return Err(Error::guard("tree horizon", horizon as u64, guard as u64));
    }
    let fm = cuts.points()[m];
    let mut nodes: Vec<u64> = (0..(1u64 << fm)).collect();
    let mut stage_sizes = Vec::with_capacity(stages);
    for n in m..m + stages {
        let (lo, hi) = cuts.block(n);
        let len = hi - lo;
        let count = nodes.len() as u64;
        let slots = match packing {
            Packing::Disjoint => {
                if (len as u64) < n as u64 * count {
                    return Err(Error::Infeasible(format!(
                        "packing infeasible at stage {n}: block length {len} < {n}·{count}"
                    )));
                }
                count
            }
            Packing::Cyclic => {
                if len < n {
                    return Err(Error::Infeasible(format!(
                        "packing infeasible at stage {n}: block length {len} < {n}"
                    )));
                }
                ((len / n) as u64).min(count)
            }
        };
        stage_sizes.push((count, slots));
        let mut next = Vec::new();
        for (rank, &s) in nodes.iter().enumerate() {
            let mask = support_mask(n, len, rank as u64, slots);
            for t in 0..(1u64 << len) {
                if t & mask != 0 {
                    next.push(s << len | t);
                }
            }
        }
        nodes = next;
    }
    let frontier = BlockSet::from_codes(0, horizon, nodes, guard)?;
    Ok(ShelahTree {
        tree: LevelTree::from_frontier(&frontier)?,
        cuts: cuts.clone(),
        start: m,
        stages,
        packing,
        stage_sizes,
    })
}

/// `∏_{n=m}^{m+K-1} (1 - 2^{-n})`
pub fn truncated_product(m: usize, stages: usize) -> Rational {
    (m..m + stages)
        .map(|n| exact::one_minus_inv_pow2(n as u64))
        .product()
}

/// Smallest cuts with `f(j) = j` up to stage `m` and each later block just
/// long enough for the requested packing.
pub fn minimal_cuts(m: usize, stages: usize, packing: Packing) -> Option<CutSequence> {
    let mut pts: Vec<usize> = (0..=m).collect();
    let mut count: u128 = 1u128 << m;
    for n in m..m + stages {
        let len = match packing {
            Packing::Disjoint => (n as u128).checked_mul(count)?,
            Packing::Cyclic => n as u128,
        }
        .max(1);
        let len = usize::try_from(len).ok().filter(|&l| l <= 64)?;
        pts.push(pts.last()? + len);
        count = count.checked_mul((1u128 << len) - (1u128 << (len - n)))?;
    }
    CutSequence::new(pts).ok()
}

pub const TREE_CONSTRUCTION: &str = "shelah-tree";

pub fn certify_shelah_tree(
    cuts: &CutSequence,
    m: usize,
    stages: usize,
    packing: Packing,
    guard: usize,
) -> Result<Certificate> {
    let st = build_shelah_tree_guarded(cuts, m, stages, packing, guard)?;
    let mut b = Certificate::builder(TREE_CONSTRUCTION)
        .param("cuts", cuts)
        .param("m", m)
        .param("stages", stages)
        .param("packing", packing)
        .param("guard", guard);
    b.check(Check::fact("tree invariants", st.tree.validate().is_ok()));
    let fm = cuts.points()[m];
    b.check(Check::rational(
        format!("measure at f({m})"),
        &st.tree.level_measure(fm)?,
        Relation::Eq,
        &Rational::one(),
    ));
    for (i, n) in (m..m + stages).enumerate() {
        let (lo, hi) = cuts.block(n);
        let level = cuts.points()[n + 1];
        b.check(Check::rational(
            format!("measure at f({})", n + 1),
            &st.tree.level_measure(level)?,
            Relation::Eq,
            &truncated_product(m, i + 1),
        ));
        // succ_{T, f(n+1)}(s) = A_s for every node s at f(n)
        let (_, slots) = st.stage_sizes[i];
        let len = hi - lo;
        let succ_ok = st.tree.level(lo)?.words().enumerate().all(|(rank, s)| {
            let mask = support_mask(n, len, rank as u64, slots);
            let succ = st.tree.succ(hi, &s).expect("node of the tree");
            let expected = (0..(1u64 << len)).filter(|t| t & mask != 0).count();
            succ.len() == expected
                && succ.iter().all(|w| {
                    let tail = w.restrict(lo, hi).expect("inside").code();
                    tail & mask != 0
                })
        });
        b.check(Check::fact(format!("successors at f({}) are A_s", n + 1), succ_ok));
        let (count, slots) = st.stage_sizes[i];
        if slots < count {
            b.note(format!(
                "stage {n}: {slots} supports reused cyclically across {count} nodes"
            ));
        }
    }
    let growth = (0..cuts.blocks()).all(|n| {
        let sum: usize = cuts.points()[..=n].iter().sum::<usize>() + n;
        sum < 64 && cuts.points()[n + 1] as u128 >= 1u128 << sum
    });
    b.note(format!(
        "growth condition f(n+1) >= 2^(f(0)+...+f(n)+n): {}",
        if growth { "holds" } else { "not met (packing checked instead)" }
    ));
    Ok(b.finish())
}

// ---------------------------------------------------------------------------
// counting bound
// ---------------------------------------------------------------------------

/// How a single comparison `(1 - 2^{-n})^M > 1/2` was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    ExactPower,
    LogEnclosure,
}

/// Exact powers are used while `n·M` stays below this many bits.
const EXACT_POWER_BITS: u64 = 1 << 17;

/// Rational enclosure of `-ln(1 - x)` for `0 < x < 1` using `terms` terms.
fn neg_log1m_enclosure(x: &Rational, terms: u64) -> (Rational, Rational) {
    let mut sum = Rational::zero();
    let mut pow = Rational::one();
    for j in 1..=terms {
        pow *= x;
        sum += &pow / Rational::from_integer(BigInt::from(j));
    }
    // tail ≤ x^{J+1} / ((J+1)(1-x))
    let tail = &pow * x
        / (Rational::from_integer(BigInt::from(terms + 1)) * (Rational::one() - x));
    let hi = &sum + tail;
    (sum, hi)
}

/// Decides `(1 - 2^{-n})^M > 1/2` exactly.
pub fn exceeds_half(n: u32, m: &BigUint) -> Result<(bool, Decision)> {
    if m.is_zero() {
        return Ok((true, Decision::ExactPower));
    }
    let bits = m.to_u64().and_then(|mm| mm.checked_mul(n as u64));
    if let Some(b) = bits.filter(|&b| b <= EXACT_POWER_BITS) {
        // 2·(2^n - 1)^M > 2^{nM}
        let base: BigUint = (BigUint::one() << n) - 1u32;
        let lhs = num_traits::pow(base, m.to_usize().expect("small")) << 1u32;
        let rhs = BigUint::one() << b;
        return Ok((lhs > rhs, Decision::ExactPower));
    }
    // M·(-ln(1-2^{-n})) < ln 2; equality is impossible here since n·M > 1.
    let x = exact::inv_pow2(n as u64);
    let half = exact::ratio(1, 2);
    let m_r = Rational::from_integer(BigInt::from(m.clone()));
    let mut terms = 8u64;
    while terms <= 1 << 14 {
        let (s_lo, s_hi) = neg_log1m_enclosure(&x, terms);
        let (l_lo, l_hi) = neg_log1m_enclosure(&half, 4 * terms);
        if &m_r * &s_hi < l_lo {
            return Ok((true, Decision::LogEnclosure));
        }
        if &m_r * &s_lo > l_hi {
            return Ok((false, Decision::LogEnclosure));
        }
        terms *= 2;
    }
    Err(Error::invalid("log enclosure did not separate; refine further"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountingBound {
    pub n: u32,
    /// largest `M` with `(1 - 2^{-n})^M > 1/2`
    pub max_m: BigUint,
    /// `max_m ≤ 2^n`
    pub holds: bool,
    pub decisions: Vec<Decision>,
}

/// Binary search for the largest `M` with `(1 - 2^{-n})^M > 1/2`.
///
/// The inequality is strict: at `n = 1`, `(1/2)^1 = 1/2` does not exceed
/// `1/2`, so the answer there is `M = 0`.
pub fn counting_bound(n: u32) -> Result<CountingBound> {
    if n == 0 {
        return Err(Error::invalid("the counting bound needs n ≥ 1"));
    }
    if n > 62 {
        return Err(Error::guard("counting bound stage", n as u64, 62));
    }
    let mut decisions = Vec::new();
    let mut lo = BigUint::zero();
    let mut hi = BigUint::one() << n;
    let (at_hi, d) = exceeds_half(n, &hi)?;
    decisions.push(d);
    if at_hi {
        return Err(Error::invalid("(1-2^-n)^(2^n) > 1/2 contradicts e^-1 < 1/2"));
    }
    // invariant: P(lo) true, P(hi) false
    while &hi - &lo > BigUint::one() {
        let mid: BigUint = (&lo + &hi) >> 1u32;
        let (p, d) = exceeds_half(n, &mid)?;
        decisions.push(d);
        if p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let holds = lo <= BigUint::one() << n;
    Ok(CountingBound {
        n,
        max_m: lo,
        holds,
        decisions,
    })
}

pub const COUNTING_CONSTRUCTION: &str = "counting-bound";

pub fn certify_counting_bound(n: u32) -> Result<Certificate> {
    let cb = counting_bound(n)?;
    let mut b = Certificate::builder(COUNTING_CONSTRUCTION).param("n", n);
    let next = &cb.max_m + 1u32;
    let (at_max, d1) = exceeds_half(n, &cb.max_m)?;
    let (at_next, d2) = exceeds_half(n, &next)?;
    b.check(Check::fact(format!("(1-2^-{n})^{} > 1/2", cb.max_m), at_max));
    b.check(Check::fact(format!("(1-2^-{n})^{} <= 1/2", next), !at_next));
    b.check(Check::new(
        "max M <= 2^n",
        cb.max_m.to_string(),
        Relation::Le,
        (BigUint::one() << n).to_string(),
    ));
    b.note("strict inequality: M counts only when (1-2^-n)^M > 1/2");
    b.note(format!("endpoint decisions: {d1:?}, {d2:?}"));
    Ok(b.finish())
}

// ---------------------------------------------------------------------------
// localization lemma: capacity of the traces
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Capacity {
    /// `n·2^n`
    Lemma,
    /// `n·2^{n+1}`
    Doubled,
    Custom(Vec<u64>),
}

impl Capacity {
    pub fn at(&self, n: usize) -> u64 {
        match self {
            Capacity::Lemma => (n as u64) << n,
            Capacity::Doubled => (n as u64) << (n + 1),
            Capacity::Custom(g) => g.get(n).copied().unwrap_or(0),
        }
    }
}

pub const LOCALIZATION_CONSTRUCTION: &str = "localization-h";

/// For each level `n ≥ 1`, the set `{x↾f(n) : x ∈ X}` is compared against
/// the capacity. Alongside, the measure of `⋂_x (A_{x↾f(n)} + x↾[f(n),f(n+1)))`
/// is computed exactly and the implication "measure > 1/2 ⇒ count ≤ 2^n"
/// is recorded.
pub fn localization_h_check(
    cuts: &CutSequence,
    words: &[Word],
    capacity: &Capacity,
    packing: Packing,
) -> Result<Certificate> {
    let (a, z) = (cuts.start(), cuts.end());
    if a != 0 {
        return Err(Error::invalid("cuts must start at coordinate 0"));
    }
    if let Some(w) = words.iter().find(|w| w.lo() != 0 || w.hi() != z) {
        return Err(Error::IntervalMismatch(0, z, w.lo(), w.hi()));
    }
    let mut b = Certificate::builder(LOCALIZATION_CONSTRUCTION)
        .param("cuts", cuts)
        .param("words", words.iter().map(|w| w.to_string()).collect::<Vec<_>>())
        .param("capacity", capacity)
        .param("packing", packing);
    b.note("reference node t = 0: each x is paired with the support of x|f(n)");
    for n in 1..cuts.blocks() {
        let (lo, hi) = cuts.block(n);
        let len = hi - lo;
        let prefixes: BTreeSet<Word> = words
            .iter()
            .map(|w| w.restrict(0, lo))
            .collect::<Result<_>>()?;
        let count = prefixes.len() as u64;
        let cap = capacity.at(n);
        b.check(Check::new(
            format!("level {n}: |X|f(n)| <= capacity"),
            count.to_string(),
            Relation::Le,
            cap.to_string(),
        ));
        // supports: rank of the prefix among all of 2^{f(n)}
        let slots = match packing {
            Packing::Disjoint => (len / n.max(1)) as u64,
            Packing::Cyclic => (len / n.max(1)) as u64,
        };
        if slots == 0 {
            b.note(format!("level {n}: block shorter than n, no supports"));
            continue;
        }
        let mut members: Vec<(u64, u64)> = Vec::new(); // (support slot, translation code)
        let mut distinct = true;
        let mut used = BTreeSet::new();
        for p in &prefixes {
            let code = if p.len() <= 64 { p.code() } else { u64::MAX };
            if lo > 63 || code >= slots {
                distinct = false;
            }
            let slot = code % slots;
            if !used.insert(slot) {
                distinct = false;
            }
            let x = words
                .iter()
                .find(|w| w.restrict(0, lo).map(|r| &r == p).unwrap_or(false))
                .expect("prefix comes from a word");
            if len <= 64 {
                members.push((slot, x.restrict(lo, hi)?.code()));
            }
        }
        let product = exact::rpow(&exact::one_minus_inv_pow2(n as u64), count);
        let measure = if len <= DEFAULT_GUARD {
            let mut acc = BlockSet::full(lo, hi)?;
            for &(slot, tr) in &members {
                let mask = support_mask(n, len, slot, slots);
                let a_s = BlockSet::from_predicate(lo, hi, DEFAULT_GUARD, |c| c & mask != 0)?;
                acc = acc.intersection(&a_s.translate_code(tr))?;
            }
            Some(acc.measure())
        } else if distinct {
            Some(product.clone())
        } else {
            None
        };
        match &measure {
            Some(mu) if distinct => {
                b.check(Check::rational(
                    format!("level {n}: intersection measure = (1-2^-n)^|X|f(n)|"),
                    mu,
                    Relation::Eq,
                    &product,
                ));
            }
            _ => {
                b.note(format!(
                    "level {n}: supports not distinct across prefixes; product rule not asserted"
                ));
            }
        }
        if let Some(mu) = measure {
            let half = exact::ratio(1, 2);
            let implication = !(mu > half) || count <= 1u64 << n;
            b.check(Check::fact(
                format!("level {n}: measure > 1/2 implies |X|f(n)| <= 2^n"),
                implication,
            ));
        }
    }
    Ok(b.finish())
}

pub(crate) fn replay_tree(cert: &Certificate) -> Result<Certificate> {
    certify_shelah_tree(
        &cert.param("cuts")?,
        cert.param("m")?,
        cert.param("stages")?,
        cert.param("packing")?,
        cert.param("guard")?,
    )
}

pub(crate) fn replay_counting(cert: &Certificate) -> Result<Certificate> {
    certify_counting_bound(cert.param("n")?)
}

pub(crate) fn replay_localization(cert: &Certificate) -> Result<Certificate> {
    let words: Vec<String> = cert.param("words")?;
    let words = words
        .iter()
        .map(|s| Word::parse(0, s))
        .collect::<Result<Vec<_>>>()?;
    localization_h_check(
        &cert.param("cuts")?,
        &words,
        &cert.param("capacity")?,
        cert.param("packing")?,
    )
}
