//! One level of the measure-zero set built against a capacity-bounded set
//! `X`: the interval `[f(n), f(n+1))` is split into `g(n)` blocks of length
//! `k`, `U_n` holds the words with a 1 in every block, and the evader `x*`
//! copies `x_i` on block `i` so that `x* + x_i` vanishes there.

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::certificate::{Certificate, Check, Relation};
use crate::cube::{self, BlockConstraint, BlockSet, SymbolicProduct, Word};
use crate::error::{Error, Result};
use crate::exact::{self, Rational};

/// Interval length up to which `U` is materialized to cross-check the evader.
pub const MATERIALIZE_LIMIT: usize = 20;

/// `n·2^{n+1}`
pub fn default_capacity(n: usize) -> u64 {
    (n as u64) << (n + 1)
}

/// The two selection inequalities at a given `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    /// `(1-2^{-k})^{c}`
    pub mu_u: Rational,
    /// `1-(1-2^{-n})^{f(n)}`
    pub target: Rational,
    /// `(1-2^{-(n+1)})(1-2^{-k})^{c-1}`
    pub second_lhs: Rational,
    /// `1-2^{-n}`
    pub second_rhs: Rational,
}

impl Selection {
    pub fn at(n: usize, fn_: usize, cap: u64, k: usize) -> Self {
        let q = exact::one_minus_inv_pow2(k as u64);
        let mu_u = exact::rpow(&q, cap);
        let target = Rational::one() - exact::rpow(&exact::one_minus_inv_pow2(n as u64), fn_ as u64);
        let second_lhs =
            exact::one_minus_inv_pow2(n as u64 + 1) * exact::rpow(&q, cap.saturating_sub(1));
        Selection {
            mu_u,
            target,
            second_lhs,
            second_rhs: exact::one_minus_inv_pow2(n as u64),
        }
    }

    pub fn first(&self) -> bool {
        self.mu_u >= self.target
    }

    pub fn second(&self) -> bool {
        self.second_lhs >= self.second_rhs
    }

    pub fn both(&self) -> bool {
        self.first() && self.second()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KChoice {
    pub k: usize,
    /// a `k` proven sufficient by `(1-2^{-k})^c ≥ 1 - c·2^{-k}`
    pub upper: usize,
}

/// Smallest `k` with `c·2^{-k} ≤ (1-2^{-n})^{f(n)}` and
/// `(c-1)·2^{-k} ≤ 1 - (1-2^{-n})/(1-2^{-(n+1)})`. By Bernoulli's
/// inequality both selection inequalities then hold.
pub fn bernoulli_upper(n: usize, fn_: usize, cap: u64) -> usize {
    let slack1 = exact::rpow(&exact::one_minus_inv_pow2(n as u64), fn_ as u64);
    let slack2 = Rational::one()
        - exact::one_minus_inv_pow2(n as u64) / exact::one_minus_inv_pow2(n as u64 + 1);
    let c = Rational::from_integer(cap.into());
    let c1 = Rational::from_integer(cap.saturating_sub(1).into());
    (1..)
        .find(|&k| {
            let e = exact::inv_pow2(k as u64);
            &c * &e <= slack1 && &c1 * &e <= slack2
        })
        .expect("2^-k tends to zero")
}

/// Minimal `k` satisfying both selection inequalities with capacity `c`.
pub fn choose_k_with(n: usize, fn_: usize, cap: u64) -> Result<KChoice> {
    if n == 0 || fn_ == 0 {
        return Err(Error::invalid("choose_k needs n ≥ 1 and f(n) ≥ 1"));
    }
    if cap == 0 {
        return Err(Error::invalid("capacity must be positive"));
    }
    let upper = bernoulli_upper(n, fn_, cap);
    // both sides are monotone in k, so the first hit is the minimum
    let k = (1..=upper)
        .find(|&k| Selection::at(n, fn_, cap, k).both())
        .expect("the Bernoulli estimate is sufficient");
    Ok(KChoice { k, upper })
}

pub fn choose_k(n: usize, fn_: usize) -> Result<KChoice> {
    choose_k_with(n, fn_, default_capacity(n))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BjOptions {
    /// Use this block length instead of the selected one (toy levels).
    pub k_override: Option<usize>,
    /// Replace `n·2^{n+1}` by another capacity `g(n)`.
    pub capacity: Option<u64>,
    /// Append the `n·2^{f(n)}` coordinates of the gap clause.
    pub reserve: bool,
    /// First coordinate; defaults to `f(n)`.
    pub lo: Option<usize>,
}

impl BjOptions {
    /// Reserved region on, everything else default.
    pub fn standard() -> Self {
        BjOptions {
            reserve: true,
            ..Default::default()
        }
    }

    pub fn toy(k: usize, lo: usize) -> Self {
        BjOptions {
            k_override: Some(k),
            lo: Some(lo),
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BjLevel {
    pub n: usize,
    pub fn_: usize,
    pub k: usize,
    pub capacity: u64,
    pub lo: usize,
    /// coordinates reserved after the blocks
    pub reserved: usize,
    pub options: BjOptions,
    u: SymbolicProduct,
}

pub fn build_bj_level(n: usize, fn_: usize, opts: &BjOptions) -> Result<BjLevel> {
    let capacity = opts.capacity.unwrap_or_else(|| default_capacity(n));
    let k = match opts.k_override {
        Some(0) => return Err(Error::invalid("block length must be positive")),
        Some(k) => k,
        None => choose_k_with(n, fn_, capacity)?.k,
    };
    let reserved = if opts.reserve {
        if fn_ >= 40 {
            return Err(Error::guard("reserved region exponent f(n)", fn_ as u64, 39));
        }
        n << fn_
    } else {
        0
    };
    let lo = opts.lo.unwrap_or(fn_);
    let cap = usize::try_from(capacity).map_err(|_| Error::invalid("capacity overflows"))?;
    let mut blocks: Vec<BlockConstraint> = (0..cap)
        .map(|i| {
            let (a, b) = (lo + i * k, lo + (i + 1) * k);
            BlockConstraint::SomeOne {
                lo: a,
                hi: b,
                support: (a..b).collect(),
            }
        })
        .collect();
    if reserved > 0 {
        let a = lo + cap * k;
        blocks.push(BlockConstraint::Free {
            lo: a,
            hi: a + reserved,
        });
    }
    Ok(BjLevel {
        n,
        fn_,
        k,
        capacity,
        lo,
        reserved,
        options: opts.clone(),
        u: SymbolicProduct::new(blocks)?,
    })
}

impl BjLevel {
    pub fn hi(&self) -> usize {
        self.lo + self.block_count() * self.k + self.reserved
    }

    pub fn len(&self) -> usize {
        self.hi() - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn block_count(&self) -> usize {
        self.capacity as usize
    }

    /// `J_i`
    pub fn block(&self, i: usize) -> (usize, usize) {
        (self.lo + i * self.k, self.lo + (i + 1) * self.k)
    }

    pub fn u(&self) -> &SymbolicProduct {
        &self.u
    }

    /// Per-block membership: a 1 in every `J_i`.
    pub fn u_contains(&self, w: &Word) -> bool {
        self.u.contains(w)
    }

    /// First block on which `w` is all zero, i.e. the reason `w ∉ U`.
    pub fn zero_block(&self, w: &Word) -> Option<usize> {
        (0..self.block_count()).find(|&i| {
            let (a, b) = self.block(i);
            (a..b).all(|j| !w.get(j))
        })
    }

    /// Zero block of a word given by its code on the level interval.
    pub fn zero_block_code(&self, code: u64) -> Option<usize> {
        let len = self.len();
        let mask = (1u64 << self.k) - 1;
        (0..self.block_count()).find(|&i| {
            let shift = len - (i + 1) * self.k;
            code >> shift & mask == 0
        })
    }

    pub fn materialize_u(&self, guard: usize) -> Result<BlockSet> {
        self.u.materialize(guard)
    }

    /// `(1-2^{-k})^{c}`
    pub fn measure_formula(&self) -> Rational {
        exact::rpow(&exact::one_minus_inv_pow2(self.k as u64), self.capacity)
    }
}

/// `x*` with `x*↾J_i = x_i↾J_i`, the last word reused once `X` runs out
/// and zeros elsewhere.
pub fn evade(level: &BjLevel, xs: &[Word]) -> Result<Word> {
    if xs.len() as u64 > level.capacity {
        return Err(Error::Infeasible(format!(
            "|X| = {} exceeds the capacity {}",
            xs.len(),
            level.capacity
        )));
    }
    let (lo, hi) = (level.lo, level.hi());
    if let Some(x) = xs.iter().find(|x| x.lo() != lo || x.hi() != hi) {
        return Err(Error::IntervalMismatch(lo, hi, x.lo(), x.hi()));
    }
    let mut out = Word::zeros(lo, hi);
    if xs.is_empty() {
        return Ok(out);
    }
    for i in 0..level.block_count() {
        let x = &xs[i.min(xs.len() - 1)];
        let (a, b) = level.block(i);
        for j in a..b {
            out.set(j, x.get(j));
        }
    }
    Ok(out)
}

/// Code-level evader for levels of at most 64 coordinates.
pub fn evade_codes(level: &BjLevel, xs: &[u64]) -> u64 {
    let len = level.len();
    let mask = (1u64 << level.k) - 1;
    let mut out = 0u64;
    if xs.is_empty() {
        return 0;
    }
    for i in 0..level.block_count() {
        let shift = len - (i + 1) * level.k;
        out |= xs[i.min(xs.len() - 1)] & (mask << shift);
    }
    out
}

pub const LEVEL_CONSTRUCTION: &str = "bj-level";

pub fn certify_bj_level(n: usize, fn_: usize, opts: &BjOptions) -> Result<Certificate> {
    let level = build_bj_level(n, fn_, opts)?;
    let mut b = Certificate::builder(LEVEL_CONSTRUCTION)
        .param("n", n)
        .param("fn", fn_)
        .param("options", opts);
    b.check(Check::new("k", level.k.to_string(), Relation::Eq, level.k.to_string()));
    let cap = level.capacity;
    if opts.k_override.is_none() {
        let at = Selection::at(n, fn_, cap, level.k);
        b.check(Check::rational(
            "(1-2^-k)^c >= 1-(1-2^-n)^f(n)",
            &at.mu_u,
            Relation::Ge,
            &at.target,
        ));
        b.check(Check::rational(
            "(1-2^-(n+1))(1-2^-k)^(c-1) >= 1-2^-n",
            &at.second_lhs,
            Relation::Ge,
            &at.second_rhs,
        ));
        let below = Selection::at(n, fn_, cap, level.k - 1);
        b.check(Check::fact("k-1 violates a selection inequality", !below.both()));
        b.note(format!(
            "k searched up to the Bernoulli estimate {}",
            bernoulli_upper(n, fn_, cap)
        ));
    } else {
        b.note("block length overridden; selection inequalities not enforced");
    }
    b.check(Check::rational(
        "mu(U) = (1-2^-k)^c",
        &level.u().measure(),
        Relation::Eq,
        &level.measure_formula(),
    ));
    if opts.k_override.is_none() {
        let target =
            Rational::one() - exact::rpow(&exact::one_minus_inv_pow2(n as u64), fn_ as u64);
        b.check(Check::rational(
            "mu(U) >= 1-(1-2^-n)^f(n)",
            &level.u().measure(),
            Relation::Ge,
            &target,
        ));
    }
    let disjoint = (1..level.block_count()).all(|i| level.block(i - 1).1 <= level.block(i).0);
    b.check(Check::fact("blocks pairwise disjoint, each of size k", disjoint));
    b.check(Check::new(
        "interval length >= k*c",
        level.len().to_string(),
        Relation::Ge,
        (level.k as u64 * cap).to_string(),
    ));
    if level.reserved > 0 {
        b.note(format!(
            "reserved region [{}, {}) of n*2^f(n) coordinates is unconstrained and unused",
            level.hi() - level.reserved,
            level.hi()
        ));
    }
    if level.len() <= MATERIALIZE_LIMIT {
        let u = level.materialize_u(MATERIALIZE_LIMIT)?;
        b.check(Check::rational(
            "materialized mu(U)",
            &u.measure(),
            Relation::Eq,
            &level.measure_formula(),
        ));
    }
    Ok(b.finish())
}

pub const EVADE_CONSTRUCTION: &str = "evade";

/// Builds `x*` and certifies `x* ∉ X + U` per block, plus by materialized
/// sumset on small levels.
pub fn certify_evade(n: usize, fn_: usize, opts: &BjOptions, xs: &[Word]) -> Result<Certificate> {
    let level = build_bj_level(n, fn_, opts)?;
    let x_star = evade(&level, xs)?;
    let mut b = Certificate::builder(EVADE_CONSTRUCTION)
        .param("n", n)
        .param("fn", fn_)
        .param("options", opts)
        .param("X", xs.iter().map(|w| w.to_string()).collect::<Vec<_>>());
    b.check(Check::new(
        "|X| <= capacity",
        xs.len().to_string(),
        Relation::Le,
        level.capacity.to_string(),
    ));
    let symbolic = xs.iter().enumerate().all(|(i, x)| {
        let sum = x_star.xor(x).expect("same interval");
        // x* + x_i vanishes on J_i, hence lies outside U
        let (a, b) = level.block(i.min(level.block_count() - 1));
        (a..b).all(|j| !sum.get(j)) && !level.u_contains(&sum)
    });
    b.check(Check::fact("x* + x_i vanishes on J_i for every i", symbolic));
    if xs.is_empty() {
        b.note("X empty: X + U is empty");
    }
    if level.len() <= MATERIALIZE_LIMIT && !xs.is_empty() {
        let u = level.materialize_u(MATERIALIZE_LIMIT)?;
        let xset = BlockSet::from_words_guarded(level.lo, level.hi(), xs.iter(), MATERIALIZE_LIMIT)?;
        let sum = cube::sumset(&xset, &u)?;
        b.check(Check::fact("x* outside materialized X + U", !sum.contains(&x_star)));
    }
    b.witness(x_star.to_string());
    Ok(b.finish())
}

pub(crate) fn replay_level(cert: &Certificate) -> Result<Certificate> {
    certify_bj_level(cert.param("n")?, cert.param("fn")?, &cert.param("options")?)
}

pub(crate) fn replay_evade(cert: &Certificate) -> Result<Certificate> {
    let opts: BjOptions = cert.param("options")?;
    let n = cert.param("n")?;
    let fn_ = cert.param("fn")?;
    let lo = opts.lo.unwrap_or(fn_);
    let xs: Vec<String> = cert.param("X")?;
    let xs = xs
        .iter()
        .map(|s| Word::parse(lo, s))
        .collect::<Result<Vec<_>>>()?;
    certify_evade(n, fn_, &opts, &xs)
}
