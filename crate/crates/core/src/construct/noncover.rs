//! Finite content of the non-cover argument: for a family `A` of slaloms
//! covering every sequence of level patterns, each `S ∈ A` gets a
//! translation `x_S` built levelwise by the evader, and every word `y`
//! captured by `S` lands outside `U_n + x_S` at every level.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificate::{Certificate, Check, Relation};
use crate::construct::bj::{build_bj_level, evade_codes, BjLevel, BjOptions};
use crate::error::{Error, Result};
use crate::slalom::{GrowthFn, Slalom, WidthRule};

/// One level of the configuration, enough to rebuild its `BjLevel`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSpec {
    pub n: usize,
    pub fn_: usize,
    pub options: BjOptions,
}

impl LevelSpec {
    pub fn toy(n: usize, k: usize, lo: usize) -> Self {
        LevelSpec {
            n,
            fn_: lo.max(1),
            options: BjOptions::toy(k, lo),
        }
    }

    pub fn build(&self) -> Result<BjLevel> {
        build_bj_level(self.n, self.fn_, &self.options)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoncoverOptions {
    /// Exhaustive over all `y` when the total span is at most this.
    pub guard: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for NoncoverOptions {
    fn default() -> Self {
        NoncoverOptions {
            guard: 16,
            samples: 1000,
            seed: 0,
        }
    }
}

/// `f(n) = 2^{|level n|}`, the pattern counts of the levels.
pub fn pattern_counts(levels: &[BjLevel]) -> Result<GrowthFn> {
    GrowthFn::new(
        levels
            .iter()
            .map(|l| {
                if l.len() >= 64 {
                    Err(Error::guard("level length", l.len() as u64, 63))
                } else {
                    Ok(1u64 << l.len())
                }
            })
            .collect::<Result<_>>()?,
    )
}

/// The family of boxes `∏ C(n)` where each `C(n)` runs over the consecutive
/// chunks of `w(n)` values in `[0, f(n))`. It covers everything and has
/// `∏ ⌈f(n)/w(n)⌉` members, which matches the volume bound.
pub fn partition_cover(f: &GrowthFn, widths: &[u64]) -> Result<Vec<Slalom>> {
    if widths.len() != f.len() || widths.contains(&0) {
        return Err(Error::invalid("widths must be positive, one per level"));
    }
    let chunks: Vec<Vec<BTreeSet<u64>>> = (0..f.len())
        .map(|n| {
            let (fv, w) = (f.at(n), widths[n]);
            (0..fv.div_ceil(w))
                .map(|c| (c * w..((c + 1) * w).min(fv)).collect())
                .collect()
        })
        .collect();
    let total: u128 = chunks.iter().map(|c| c.len() as u128).product();
    if total > 1 << 20 {
        return Err(Error::guard("partition cover size", total.min(u64::MAX as u128) as u64, 1 << 20));
    }
    let mut family: Vec<Vec<BTreeSet<u64>>> = vec![Vec::new()];
    for level in &chunks {
        family = family
            .into_iter()
            .flat_map(|prefix| {
                level.iter().map(move |c| {
                    let mut p = prefix.clone();
                    p.push(c.clone());
                    p
                })
            })
            .collect();
    }
    family
        .into_iter()
        .map(|levels| Slalom::new(f, levels, WidthRule::Custom(widths.to_vec())))
        .collect()
}

fn level_codes(y: u64, levels: &[BjLevel], span: usize) -> Vec<u64> {
    let mut rest = span;
    levels
        .iter()
        .map(|l| {
            rest -= l.len();
            (y >> rest) & ((1u64 << l.len()) - 1)
        })
        .collect()
}

pub const CONSTRUCTION: &str = "noncover";

/// Builds `x_S` for every `S ∈ A` and certifies that every `y` (all of them
/// when the span is within the guard, otherwise a seeded sample) has an
/// owner `S` capturing it at every level with `y + x_S ∉ U_n` throughout.
pub fn assemble_noncover_witness(
    specs: &[LevelSpec],
    family: &[Slalom],
    opts: &NoncoverOptions,
) -> Result<Certificate> {
    if specs.is_empty() {
        return Err(Error::invalid("need at least one level"));
    }
    let levels = specs.iter().map(LevelSpec::build).collect::<Result<Vec<_>>>()?;
    for pair in levels.windows(2) {
        if pair[0].hi() != pair[1].lo {
            return Err(Error::invalid(format!(
                "levels are not consecutive: {} then {}",
                pair[0].hi(),
                pair[1].lo
            )));
        }
    }
    let span: usize = levels.iter().map(BjLevel::len).sum();
    if span > 63 {
        return Err(Error::guard("total span", span as u64, 63));
    }
    let f = pattern_counts(&levels)?;
    if let Some(s) = family.iter().find(|s| s.len() != levels.len()) {
        return Err(Error::invalid(format!(
            "slalom has {} levels, configuration has {}",
            s.len(),
            levels.len()
        )));
    }
    let mut b = Certificate::builder(CONSTRUCTION)
        .param("levels", specs)
        .param(
            "family",
            family
                .iter()
                .map(|s| s.levels().to_vec())
                .collect::<Vec<_>>(),
        )
        .param("guard", opts.guard)
        .param("samples", opts.samples)
        .seed(opts.seed);

    // precondition |S(n)| ≤ capacity of level n
    let widest: Vec<u64> = (0..levels.len())
        .map(|n| family.iter().map(|s| s.level(n).len() as u64).max().unwrap_or(0))
        .collect();
    for (n, l) in levels.iter().enumerate() {
        b.check(Check::new(
            format!("level {n}: max |S(n)| <= capacity"),
            widest[n].to_string(),
            Relation::Le,
            l.capacity.to_string(),
        ));
    }
    if widest.iter().zip(&levels).any(|(&w, l)| w > l.capacity) {
        return Ok(b.finish());
    }
    if let Some((n, v)) = family.iter().find_map(|s| {
        (0..levels.len()).find_map(|n| s.level(n).iter().find(|&&v| v >= f.at(n)).map(|&v| (n, v)))
    }) {
        return Err(Error::invalid(format!("level {n} value {v} is not a pattern code")));
    }

    // x_S, one code per level
    let xs: Vec<Vec<u64>> = family
        .iter()
        .map(|s| {
            levels
                .iter()
                .enumerate()
                .map(|(n, l)| evade_codes(l, &s.level(n).iter().copied().collect::<Vec<_>>()))
                .collect()
        })
        .collect();

    let escapes = |y: u64, owner: usize| -> bool {
        level_codes(y, &levels, span)
            .iter()
            .zip(&levels)
            .zip(&xs[owner])
            .all(|((&yc, l), &xc)| l.zero_block_code(yc ^ xc).is_some())
    };

    let (checked, failures) = if span <= opts.guard {
        // owner of y: first S in family order whose box contains y
        let mut owner = vec![u32::MAX; 1usize << span];
        for (i, s) in family.iter().enumerate() {
            let mut boxes: Vec<u64> = vec![0];
            for (n, l) in levels.iter().enumerate() {
                boxes = boxes
                    .into_iter()
                    .flat_map(|p| s.level(n).iter().map(move |&v| p << l.len() | v))
                    .collect();
            }
            for y in boxes {
                let o = &mut owner[y as usize];
                if *o == u32::MAX {
                    *o = i as u32;
                }
            }
        }
        if let Some(y) = owner.iter().position(|&o| o == u32::MAX) {
            return Err(Error::Infeasible(format!(
                "A is not a cover: no slalom captures y = {y:0span$b}"
            )));
        }
        let failures = owner
            .par_iter()
            .enumerate()
            .filter(|&(y, &o)| !escapes(y as u64, o as usize))
            .count();
        b.note(format!("exhaustive over all 2^{span} words y"));
        (1u64 << span, failures as u64)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let ys: Vec<u64> = (0..opts.samples).map(|_| rng.gen_range(0..(1u64 << span))).collect();
        let mut failures = 0u64;
        for &y in &ys {
            let codes = level_codes(y, &levels, span);
            let owner = family
                .iter()
                .position(|s| codes.iter().enumerate().all(|(n, v)| s.level(n).contains(v)))
                .ok_or_else(|| {
                    Error::Infeasible(format!("A is not a cover: no slalom captures y = {y:0span$b}"))
                })?;
            if !escapes(y, owner) {
                failures += 1;
            }
        }
        b.note(format!("sampled {} words y with seed {}", opts.samples, opts.seed));
        (opts.samples as u64, failures)
    };
    b.check(Check::new(
        "words y with y + x_S outside U at every level",
        (checked - failures).to_string(),
        Relation::Eq,
        checked.to_string(),
    ));
    b.witness(xs);
    Ok(b.finish())
}

pub(crate) fn replay(cert: &Certificate) -> Result<Certificate> {
    let specs: Vec<LevelSpec> = cert.param("levels")?;
    let levels = specs.iter().map(LevelSpec::build).collect::<Result<Vec<_>>>()?;
    let f = pattern_counts(&levels)?;
    let raw: Vec<Vec<BTreeSet<u64>>> = cert.param("family")?;
    let caps: Vec<u64> = levels.iter().map(|l| l.capacity).collect();
    let family = raw
        .into_iter()
        .map(|lv| Slalom::new(&f, lv, WidthRule::Custom(caps.clone())))
        .collect::<Result<Vec<_>>>()?;
    assemble_noncover_witness(
        &specs,
        &family,
        &NoncoverOptions {
            guard: cert.param("guard")?,
            samples: cert.param("samples")?,
            seed: cert.seed,
        },
    )
}
