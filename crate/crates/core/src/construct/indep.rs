//! Independent block families: disjoint supports `I_s` of size `n` packed
//! into one block, and the sets `A_s` of words with a 1 somewhere in `I_s`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certificate::{Certificate, Check, Relation};
use crate::cube::{self, BlockConstraint, BlockSet, SymbolicProduct, Word, DEFAULT_GUARD};
use crate::error::{Error, Result};
use crate::exact::{self, Rational};

/// Interval length up to which translated subfamilies are checked for
/// independence by exhaustive counting.
pub const INDEPENDENCE_GUARD: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndepFamily {
    n: usize,
    lo: usize,
    hi: usize,
    supports: Vec<Vec<usize>>,
}

/// Packs `count` disjoint supports of size `n` left to right into `[lo, hi)`.
pub fn build_indep(n: usize, block: (usize, usize), count: usize) -> Result<IndepFamily> {
    let (lo, hi) = block;
    if lo > hi {
        return Err(Error::invalid("reversed block"));
    }
    if count == 0 {
        return Err(Error::invalid("the index count must be positive"));
    }
    let need = n
        .checked_mul(count)
        .ok_or_else(|| Error::invalid("n·count overflows"))?;
    if hi - lo < need {
        return Err(Error::invalid(format!(
            "block too short: length {} < n·count = {need}",
            hi - lo
        )));
    }
    let supports = (0..count)
        .map(|i| (lo + i * n..lo + (i + 1) * n).collect())
        .collect();
    Ok(IndepFamily {
        n,
        lo,
        hi,
        supports,
    })
}

impl IndepFamily {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn block(&self) -> (usize, usize) {
        (self.lo, self.hi)
    }

    pub fn count(&self) -> usize {
        self.supports.len()
    }

    pub fn supports(&self) -> &[Vec<usize>] {
        &self.supports
    }

    pub fn support(&self, i: usize) -> &[usize] {
        &self.supports[i]
    }

    pub fn pairwise_disjoint(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.supports.iter().flatten().all(|&j| seen.insert(j))
    }

    pub fn symbolic(&self, i: usize) -> SymbolicProduct {
        SymbolicProduct::new(vec![BlockConstraint::SomeOne {
            lo: self.lo,
            hi: self.hi,
            support: self.supports[i].clone(),
        }])
        .expect("support lies inside the block")
    }

    /// `A_s` as an explicit set of words on the block.
    pub fn materialize(&self, i: usize, guard: usize) -> Result<BlockSet> {
        let len = self.hi - self.lo;
        let mask: u64 = self.supports[i]
            .iter()
            .map(|&j| 1u64 << (len - 1 - (j - self.lo)))
            .fold(0, |a, b| a | b);
        BlockSet::from_predicate(self.lo, self.hi, guard, move |c| c & mask != 0)
    }

    /// `1 - 2^{-n}`
    pub fn expected_measure(&self) -> Rational {
        exact::one_minus_inv_pow2(self.n as u64)
    }
}

/// Random translations of random subfamilies (size ≤ 4), each checked for
/// exact independence. Returns the number of trials that passed.
pub fn independence_trials(fam: &IndepFamily, trials: usize, seed: u64) -> Result<usize> {
    let (lo, hi) = fam.block();
    let len = hi - lo;
    if len > INDEPENDENCE_GUARD {
        return Err(Error::guard(
            "independence interval",
            len as u64,
            INDEPENDENCE_GUARD as u64,
        ));
    }
    let sets = (0..fam.count())
        .map(|i| fam.materialize(i, INDEPENDENCE_GUARD))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passed = 0;
    for _ in 0..trials {
        let size = rng.gen_range(1..=fam.count().min(4));
        let mut idx: Vec<usize> = (0..fam.count()).collect();
        for i in 0..size {
            let j = rng.gen_range(i..idx.len());
            idx.swap(i, j);
        }
        let family: Vec<(Word, BlockSet)> = idx[..size]
            .iter()
            .map(|&i| {
                let x = Word::from_code(lo, len, rng.gen_range(0..(1u64 << len)));
                (x, sets[i].clone())
            })
            .collect();
        if cube::independent(&family)? {
            passed += 1;
        }
    }
    Ok(passed)
}

pub const CONSTRUCTION: &str = "indep";

/// Builds the family and certifies the measure of every `A_s`, the
/// disjointness and size of the supports, and (when the block is small
/// enough) independence of randomly translated subfamilies.
pub fn certify_indep(
    n: usize,
    block: (usize, usize),
    count: usize,
    trials: usize,
    seed: u64,
) -> Result<Certificate> {
    let fam = build_indep(n, block, count)?;
    let mut b = Certificate::builder(CONSTRUCTION)
        .param("n", n)
        .param("block", [block.0, block.1])
        .param("count", count)
        .param("trials", trials)
        .seed(seed);
    let expected = fam.expected_measure();
    let len = block.1 - block.0;
    for i in 0..count {
        let mu = if len <= DEFAULT_GUARD {
            fam.materialize(i, DEFAULT_GUARD)?.measure()
        } else {
            fam.symbolic(i).measure()
        };
        b.check(Check::rational(format!("measure A[{i}]"), &mu, Relation::Eq, &expected));
    }
    if len > DEFAULT_GUARD {
        b.note("block exceeds the materialization guard; measures computed per support");
    }
    b.check(Check::fact("supports pairwise disjoint", fam.pairwise_disjoint()));
    b.check(Check::fact(
        "every support has size n",
        fam.supports().iter().all(|s| s.len() == n),
    ));
    b.note(format!(
        "index set truncated to {count} supports (one per listed index)"
    ));
    if len <= INDEPENDENCE_GUARD && trials > 0 {
        let ok = independence_trials(&fam, trials, seed)?;
        b.check(Check::new(
            "independent translated subfamilies",
            ok.to_string(),
            Relation::Eq,
            trials.to_string(),
        ));
    } else if trials > 0 {
        b.note("independence not checked: block longer than the independence guard");
    }
    b.witness(fam.supports());
    Ok(b.finish())
}

pub(crate) fn replay(cert: &Certificate) -> Result<Certificate> {
    let block: [usize; 2] = cert.param("block")?;
    certify_indep(
        cert.param("n")?,
        (block[0], block[1]),
        cert.param("count")?,
        cert.param("trials")?,
        cert.seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    #[test]
    fn two_sets_of_measure_seven_eighths() {
        let fam = build_indep(3, (0, 6), 2).unwrap();
        assert_eq!(fam.supports(), [vec![0, 1, 2], vec![3, 4, 5]]);
        for i in 0..2 {
            assert_eq!(fam.materialize(i, 24).unwrap().measure(), ratio(7, 8));
        }
        let cert = certify_indep(3, (0, 6), 2, 50, 1).unwrap();
        assert!(cert.passed());
        assert_eq!(cert.check("measure A[0]").unwrap().lhs, "7/8");
    }

    #[test]
    fn single_coordinate_family() {
        let fam = build_indep(1, (0, 1), 1).unwrap();
        let a = fam.materialize(0, 24).unwrap();
        assert_eq!(a.codes().collect::<Vec<_>>(), [1]);
        assert_eq!(a.measure(), ratio(1, 2));
    }

    #[test]
    fn block_too_short() {
        let err = build_indep(3, (0, 5), 2).unwrap_err();
        assert!(err.to_string().contains("block too short"));
    }

    #[test]
    fn translated_pairs_are_independent() {
        let fam = build_indep(2, (3, 11), 4).unwrap();
        assert_eq!(independence_trials(&fam, 100, 9).unwrap(), 100);
    }

    #[test]
    fn replay_reproduces() {
        let cert = certify_indep(2, (0, 8), 3, 20, 5).unwrap();
        assert_eq!(replay(&cert).unwrap(), cert);
    }
}
