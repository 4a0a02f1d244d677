//! The twelve acceptance criteria, one line each. Oracles come from
//! `core/tests/common`, which never calls the library's algorithms.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

use cantorfin::construct::{bj, indep, noncover, shelah};
use cantorfin::cube::{self, BlockSet, Word};
use cantorfin::meagerrep::MeagerRep;
use cantorfin::slalom::{cof_fin, cov_fin, cov_fin_from, GrowthFn, SearchOptions};
use cantorfin::trees::{CutSequence, LevelTree};
use cantorfin::{exact, replay, twoscale, Rational};
use common::{Kind, Naive};
use num_bigint::BigUint;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn criterion(id: u32, limit: f64, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let r = catch_unwind(AssertUnwindSafe(f));
    let secs = t.elapsed().as_secs_f64();
    let (ok, detail) = match r {
        Ok(Ok(d)) => (secs <= limit, d),
        Ok(Err(d)) => (false, d),
        Err(p) => (
            false,
            p.downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()),
        ),
    };
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("criterion {id:>2} [{tag}] {name}: {detail} ({secs:.2} s, limit {limit} s)");
    ok
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn c1_measures() -> Outcome {
    let mut sets = 0;
    for n in 1..=8usize {
        let count = if n <= 5 { 3 } else { 2 };
        let len = count * n;
        let fam = e(indep::build_indep(n, (0, len), count))?;
        let want = exact::one_minus_inv_pow2(n as u64);
        for i in 0..count {
            let support = fam.support(i).to_vec();
            ensure(support.len() == n, || format!("n={n}: support size {}", support.len()))?;
            let set = e(fam.materialize(i, 24))?;
            ensure(set.measure() == want, || format!("n={n} set {i}: measure {}", set.measure()))?;
            ensure(fam.symbolic(i).measure() == want, || format!("n={n}: symbolic measure"))?;
            let hits = common::count_words(len, |w| support.iter().any(|&j| w[j]));
            ensure(set.len() == hits, || format!("n={n}: {} words, oracle {hits}", set.len()))?;
            // hits / 2^len == (2^n - 1) / 2^n
            ensure(
                common::same_ratio(&big(hits), &common::pow2(len as u64), &(common::pow2(n as u64) - 1u32), &common::pow2(n as u64)),
                || format!("n={n}: oracle ratio"),
            )?;
            sets += 1;
        }
    }
    Ok(format!("{sets} sets, n = 1..8, all 1-2^-n"))
}

fn c2_independence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..500 {
        let n = rng.gen_range(1..=3usize);
        let count = rng.gen_range(1..=(12 / n).min(4));
        let len = rng.gen_range(n * count..=12);
        let fam = e(indep::build_indep(n, (0, len), count))?;
        let mut idx: Vec<usize> = (0..count).collect();
        idx.shuffle(&mut rng);
        let size = rng.gen_range(1..=count);
        let chosen = &idx[..size];
        let shifts: Vec<u64> = chosen.iter().map(|_| rng.gen_range(0..1u64 << len)).collect();
        let mut inter = BlockSet::full(0, len).map_err(|e| e.to_string())?;
        let mut family = Vec::new();
        for (&i, &x) in chosen.iter().zip(&shifts) {
            let set = e(fam.materialize(i, 24))?;
            inter = e(inter.intersection(&set.translate_code(x)))?;
            family.push((Word::from_code(0, len, x), set));
        }
        let product = exact::rpow(&exact::one_minus_inv_pow2(n as u64), size as u64);
        ensure(inter.measure() == product, || format!("trial {trial}: {} vs {}", inter.measure(), product))?;
        ensure(e(cube::independent(&family))?, || format!("trial {trial}: library independence check failed"))?;
        let supports: Vec<Vec<usize>> = chosen.iter().map(|&i| fam.support(i).to_vec()).collect();
        let hits = (0..1u64 << len)
            .filter(|&w| {
                supports
                    .iter()
                    .zip(&shifts)
                    .all(|(s, &x)| s.iter().any(|&j| common::bits(w ^ x, len)[j]))
            })
            .count() as u64;
        let num = (common::pow2(n as u64) - 1u32).pow(size as u32);
        let den = common::pow2((n * size) as u64);
        ensure(
            common::same_ratio(&big(hits), &common::pow2(len as u64), &num, &den),
            || format!("trial {trial}: oracle count {hits} on {len} coordinates"),
        )?;
    }
    Ok("500 translated subfamilies, intersection = product".into())
}

fn c3_shelah() -> Outcome {
    let mut trees = 0;
    let mut pairs = 0;
    for m in 1..=8usize {
        for stages in 0..=8usize {
            let Some(min) = shelah::minimal_cuts(m, stages, shelah::Packing::Cyclic) else { continue };
            if min.end() > 16 {
                break;
            }
            pairs += 1;
            let pts = min.points().to_vec();
            let blocks = pts.len() - 1;
            // widen every block by 0 or 1 while the span stays within 16
            for mask in 0..1u32 << blocks {
                let mut cuts = vec![pts[0]];
                for b in 0..blocks {
                    let extra = (mask >> b & 1) as usize;
                    cuts.push(cuts[b] + pts[b + 1] - pts[b] + extra);
                }
                if *cuts.last().unwrap() > 16 {
                    continue;
                }
                let c = e(CutSequence::new(cuts.clone()))?;
                let st = e(shelah::build_shelah_tree(&c, m, stages, shelah::Packing::Cyclic))?;
                let end = c.end();
                let count = e(st.tree.level_count(end))?;
                let prod = shelah::truncated_product(m, stages);
                ensure(Rational::new(count.into(), common::pow2(end as u64).into()) == prod, || {
                    format!("m={m} stages={stages} cuts={cuts:?}: {count} nodes vs {prod}")
                })?;
                let num: BigUint = (m..m + stages).map(|n| common::pow2(n as u64) - 1u32).product();
                let bits: u64 = (m..m + stages).map(|n| n as u64).sum();
                ensure(
                    common::same_ratio(&big(count), &common::pow2(end as u64), &num, &common::pow2(bits)),
                    || format!("m={m} stages={stages} cuts={cuts:?}: oracle product"),
                )?;
                trees += 1;
            }
        }
    }
    Ok(format!("{pairs} (m,K) pairs, {trees} cut sequences within span 16"))
}

/// Largest `M` with `2·(2^n-1)^M > 2^{nM}`, by binary search on integers.
fn oracle_max_m(n: u32) -> u64 {
    let holds = |m: u64| big(2) * (common::pow2(n as u64) - 1u32).pow(m as u32) > common::pow2(n as u64 * m);
    let (mut lo, mut hi) = (0u64, 1u64 << n);
    assert!(holds(lo) && !holds(hi), "M = 0 holds and M = 2^n fails");
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn c4_counting() -> Outcome {
    for n in 1..=30u32 {
        let cb = e(shelah::counting_bound(n))?;
        ensure(cb.holds, || format!("n={n}: bound reported false"))?;
        ensure(cb.max_m <= common::pow2(n as u64), || format!("n={n}: max M = {} > 2^n", cb.max_m))?;
        if n <= 14 {
            let o = oracle_max_m(n);
            ensure(cb.max_m == big(o), || format!("n={n}: max M {} vs oracle {o}", cb.max_m))?;
        }
        ensure(e(shelah::certify_counting_bound(n))?.passed(), || format!("n={n}: certificate failed"))?;
    }
    Ok("n = 1..30 within 2^n, exact oracle agrees for n <= 14".into())
}

/// Both selection inequalities by integer cross-multiplication.
fn oracle_selection(n: u64, fn_: u64, k: u64) -> bool {
    let cap = n << (n + 1);
    let q = common::pow2(k) - 1u32;
    let first = q.pow(cap as u32) * common::pow2(n * fn_)
        >= (common::pow2(n * fn_) - (common::pow2(n) - 1u32).pow(fn_ as u32)) * common::pow2(k * cap);
    let second = (common::pow2(n + 1) - 1u32) * q.pow(cap as u32 - 1) * common::pow2(n)
        >= (common::pow2(n) - 1u32) * common::pow2(n + 1) * common::pow2(k * (cap - 1));
    first && second
}

fn c5_bj() -> Outcome {
    let mut ks = Vec::new();
    for n in 1..=5usize {
        for fn_ in [1usize, 2, 4, 8, 16] {
            let kc = e(bj::choose_k(n, fn_))?;
            let k = kc.k as u64;
            ensure(oracle_selection(n as u64, fn_ as u64, k), || format!("n={n} fn={fn_}: fails at k={k}"))?;
            ensure(k == 1 || !oracle_selection(n as u64, fn_ as u64, k - 1), || {
                format!("n={n} fn={fn_}: already holds at k-1={}", k - 1)
            })?;
            let lvl = e(bj::build_bj_level(n, fn_, &bj::BjOptions::standard()))?;
            let cap = (n as u64) << (n + 1);
            let mu = Rational::new(
                (common::pow2(k) - 1u32).pow(cap as u32).into(),
                common::pow2(k * cap).into(),
            );
            ensure(lvl.u().measure() == mu && lvl.measure_formula() == mu, || format!("n={n} fn={fn_}: mu(U)"))?;
            let target = Rational::one() - exact::rpow(&exact::one_minus_inv_pow2(n as u64), fn_ as u64);
            ensure(mu >= target, || format!("n={n} fn={fn_}: mu(U) below target"))?;
            ensure(e(bj::certify_bj_level(n, fn_, &bj::BjOptions::standard()))?.passed(), || {
                format!("n={n} fn={fn_}: certificate failed")
            })?;
            ks.push(k);
        }
    }
    Ok(format!("25 levels, k in {}..={}", ks.iter().min().unwrap(), ks.iter().max().unwrap()))
}

fn random_word(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> Word {
    Word::new(lo, (lo..hi).map(|_| rng.gen_bool(0.5)).collect())
}

fn c6_evader() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let configs = [(1usize, 1usize), (1, 2), (2, 1), (2, 2), (3, 2)];
    for &(n, fn_) in &configs {
        let lvl = e(bj::build_bj_level(n, fn_, &bj::BjOptions::standard()))?;
        let (lo, hi) = (lvl.lo, lvl.hi());
        for trial in 0..200 {
            let xs: Vec<Word> = (0..lvl.capacity).map(|_| random_word(&mut rng, lo, hi)).collect();
            let x = e(bj::evade(&lvl, &xs))?;
            for (i, xi) in xs.iter().enumerate() {
                ensure(!lvl.u_contains(&e(x.xor(xi))?), || format!("n={n} fn={fn_} trial {trial}: x*+x_{i} in U"))?;
                // some block of U is all zero on x* + x_i
                let zero_block = (0..lvl.capacity as usize).any(|b| {
                    let a = lo + b * lvl.k;
                    (a..a + lvl.k).all(|j| x.get(j) == xi.get(j))
                });
                ensure(zero_block, || format!("n={n} fn={fn_} trial {trial}: oracle finds no zero block"))?;
            }
        }
    }
    // toy levels small enough to materialize X + U
    let toys = [
        bj::build_bj_level(1, 1, &bj::BjOptions::toy(2, 0)),
        bj::build_bj_level(1, 1, &bj::BjOptions::toy(3, 0)),
        bj::build_bj_level(1, 1, &bj::BjOptions::toy(4, 0)),
        bj::build_bj_level(1, 1, &bj::BjOptions::standard()),
        bj::build_bj_level(1, 2, &bj::BjOptions::standard()),
    ];
    let mut largest = 0;
    for lvl in toys {
        let lvl = e(lvl)?;
        let (lo, len) = (lvl.lo, lvl.len());
        ensure(len <= 20, || format!("toy level of {len} coordinates"))?;
        largest = largest.max(len);
        let u = e(lvl.materialize_u(24))?;
        let ucodes: Vec<u64> = u.codes().collect();
        for trial in 0..200 {
            let xs: Vec<u64> = (0..lvl.capacity).map(|_| rng.gen_range(0..1u64 << len)).collect();
            let words: Vec<Word> = xs.iter().map(|&c| Word::from_code(lo, len, c)).collect();
            let x = e(bj::evade(&lvl, &words))?.code();
            let xset = e(BlockSet::from_codes(lo, lo + len, xs.iter().copied(), 24))?;
            let sum = e(cube::sumset(&xset, &u))?;
            ensure(!sum.contains_code(x) && !sum.is_full(), || format!("len {len} trial {trial}: x* in X+U"))?;
            if trial < 5 {
                let naive = common::naive_sumset(&xs, &ucodes);
                ensure(!naive.contains(&x) && naive.len() as u64 == sum.len(), || {
                    format!("len {len} trial {trial}: naive sumset disagrees")
                })?;
            }
        }
    }
    Ok(format!("{} configurations x 200 symbolic, toy levels up to {largest} coordinates materialized", configs.len()))
}

fn binom(n: u64, r: u64) -> u64 {
    (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn c7_covering() -> Outcome {
    let opts = SearchOptions::default();
    let cov = e(cov_fin(&e(GrowthFn::new(vec![2, 2]))?, &[1, 1], 1, &opts))?.value();
    ensure(cov == Some(2), || format!("cov_fin((2,2),(1,1),1) = {cov:?}"))?;
    let cof = e(cof_fin(&e(GrowthFn::new(vec![3, 3]))?, &[2, 2], &opts))?.value();
    ensure(cof == Some(3), || format!("cof_fin((3,3),(2,2)) = {cof:?}"))?;

    let mut corpus: Vec<(Vec<u64>, Vec<u64>, Kind)> = Vec::new();
    // every two-level instance with f <= 4
    for f0 in 1..=4u64 {
        for f1 in 1..=4u64 {
            for w0 in 1..=f0 {
                for w1 in 1..=f1 {
                    for kind in [Kind::Cof, Kind::Cov { t: 1, from: 0 }, Kind::Cov { t: 2, from: 0 }, Kind::Cov { t: 1, from: 1 }] {
                        corpus.push((vec![f0, f1], vec![w0, w1], kind));
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..400 {
        let levels = rng.gen_range(1..=4usize);
        let f: Vec<u64> = (0..levels).map(|_| rng.gen_range(1..=6)).collect();
        let w: Vec<u64> = f.iter().map(|&v| rng.gen_range(1..=v)).collect();
        let kind = if rng.gen_bool(0.5) {
            Kind::Cof
        } else {
            Kind::Cov {
                t: rng.gen_range(1..=levels),
                from: rng.gen_range(0..levels),
            }
        };
        corpus.push((f, w, kind));
    }
    let (mut compared, mut skipped) = (0, 0);
    for (f, w, kind) in &corpus {
        let paths: u64 = f.iter().product();
        if paths > 4096 {
            continue;
        }
        let cands: u64 = f.iter().zip(w).map(|(&fv, &wv)| binom(fv, wv.min(fv))).product();
        if cands * paths > 4_000_000 {
            skipped += 1;
            continue;
        }
        let naive = common::naive_cover(f, w, *kind, 2_000_000);
        if matches!(naive, Naive::OverBudget) {
            skipped += 1;
            continue;
        }
        let g = e(GrowthFn::new(f.clone()))?;
        let got = match *kind {
            Kind::Cof => e(cof_fin(&g, w, &opts))?,
            Kind::Cov { t, from } => e(cov_fin_from(&g, w, t, from, &opts))?,
        }
        .value();
        match naive {
            Naive::Value(v) => ensure(got == Some(v), || format!("{f:?} {w:?} {kind:?}: {got:?} vs naive {v}"))?,
            Naive::Infeasible => ensure(got.is_none(), || format!("{f:?} {w:?} {kind:?}: {got:?} vs infeasible"))?,
            Naive::OverBudget => unreachable!(),
        }
        compared += 1;
    }
    ensure(compared >= 500, || format!("only {compared} instances compared"))?;
    Ok(format!("examples 2 and 3; {compared} instances equal to naive, {skipped} beyond the naive budget"))
}

fn random_cuts(rng: &mut ChaCha8Rng, len: usize) -> Vec<usize> {
    let mut v = vec![0];
    v.extend((1..len).filter(|_| rng.gen_bool(0.4)));
    v.push(len);
    v
}

fn c8_meager() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut included = 0;
    for inst in 0..1000 {
        let len = rng.gen_range(1..=14usize);
        let f = random_cuts(&mut rng, len);
        let g = match inst % 3 {
            // coarsen f so that inclusion is likely
            0 | 1 => {
                let mut g: Vec<usize> = f.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
                g.retain(|&c| c != 0 && c != len);
                g.insert(0, 0);
                g.push(len);
                g
            }
            _ => random_cuts(&mut rng, len),
        };
        let x = rng.gen_range(0..1u64 << len);
        let y = match inst % 3 {
            0 => x,
            _ => x ^ (rng.gen_range(0..1u64 << len) & rng.gen_range(0..1u64 << len) & rng.gen_range(0..1u64 << len)),
        };
        let (fc, gc) = (e(CutSequence::new(f.clone()))?, e(CutSequence::new(g.clone()))?);
        let s1 = rng.gen_range(0..=fc.blocks());
        let s2 = rng.gen_range(0..=gc.blocks());
        let r1 = e(MeagerRep::new(fc, Word::from_code(0, len, x), s1))?;
        let r2 = e(MeagerRep::new(gc, Word::from_code(0, len, y), s2))?;
        if e(r1.includes(&r2))? {
            included += 1;
            ensure(e(r1.includes_oracle(&r2))?, || format!("instance {inst}: criterion unsound"))?;
            let (xb, yb) = (common::bits(x, len), common::bits(y, len));
            for w in 0..1u64 << len {
                let wb = common::bits(w, len);
                ensure(
                    !common::meager_member(&f, &xb, s1, &wb) || common::meager_member(&g, &yb, s2, &wb),
                    || format!("instance {inst}: word {w:b} escapes"),
                )?;
            }
        }
    }
    ensure(included >= 100, || format!("only {included} included instances"))?;

    // translation covariance, every z and every word at span 12
    let len = 12;
    for cfg in 0..2 {
        let cuts = e(CutSequence::new(random_cuts(&mut rng, len)))?;
        let start = rng.gen_range(0..=cuts.blocks()).min(cfg + 1);
        let x = rng.gen_range(0..1u64 << len);
        let r = e(MeagerRep::new(cuts.clone(), Word::from_code(0, len, x), start))?;
        let xb = common::bits(x, len);
        let table: Vec<bool> = (0..1u64 << len)
            .map(|w| r.member(&Word::from_code(0, len, w)))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for (w, &m) in table.iter().enumerate() {
            ensure(m == common::meager_member(cuts.points(), &xb, start, &common::bits(w as u64, len)), || {
                format!("membership of {w:b}")
            })?;
        }
        for z in 0..1u64 << len {
            let t = e(r.translate(&Word::from_code(0, len, z)))?;
            for w in 0..1u64 << len {
                let m = e(t.member(&Word::from_code(0, len, w ^ z)))?;
                ensure(m == table[w as usize], || format!("z={z:b} w={w:b}: translate disagrees"))?;
            }
        }
    }
    Ok(format!("1000 instances ({included} included, 0 violations); covariance exhaustive at span 12"))
}

fn c9_shift_tree() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut checks = 0;
    for _ in 0..300 {
        let h = rng.gen_range(1..=10usize);
        let size = rng.gen_range(1..=(1usize << h).min(40));
        let frontier: Vec<u64> = (0..size).map(|_| rng.gen_range(0..1u64 << h)).collect();
        let t = e(LevelTree::from_frontier(&e(BlockSet::from_codes(0, h, frontier.iter().copied(), 24))?))?;
        let branches: HashSet<u64> = frontier.iter().copied().collect();
        for n in 0..=h {
            ensure(e(t.rational_closure_check(n))?, || format!("h={h} n={n}: closure check failed"))?;
            let mask = (1u64 << (h - n)) - 1;
            let tails: HashSet<u64> = branches.iter().map(|b| b & mask).collect();
            let expected: Vec<u64> = (0..1u64 << h).filter(|w| tails.contains(&(w & mask))).collect();
            let shifted = e(t.shift_tree(n))?;
            let got: Vec<u64> = e(shifted.level(h))?.codes().collect();
            ensure(got == expected, || format!("h={h} n={n}: T^<n> at the horizon"))?;
            // union of translates by words supported on the first n coordinates
            let mut union: Vec<u64> = (0..1u64 << n)
                .flat_map(|q| branches.iter().map(move |b| b ^ (q << (h - n))))
                .collect::<HashSet<_>>()
                .into_iter()
                .collect();
            union.sort();
            let lib: Vec<u64> = e(t.rational_translates_level(n, h))?.codes().collect();
            ensure(union == expected && lib == expected, || format!("h={h} n={n}: rational translates"))?;
            checks += 1;
        }
    }
    Ok(format!("300 trees, {checks} (tree, n) pairs"))
}

fn c10_two_scale() -> Outcome {
    let mut windows_checked = 0;
    let mut clamped = 0;
    for seed in 0..500u64 {
        let windows = 1 + (seed % 4) as usize;
        let frame = e(twoscale::random_frame(windows, 6, seed))?;
        ensure(frame.is_small(), || format!("seed {seed}: random frame is not small"))?;
        for k in 0..windows {
            let j = frame.j(k);
            ensure(j.interval_len() <= 12, || format!("seed {seed}: window of {}", j.interval_len()))?;
            let h = e(frame.heavy_prefixes(k))?;
            let pats: Vec<u64> = j.codes().collect();
            let naive = common::naive_heavy(&pats, j.interval_len(), frame.m(k) - frame.n(k), h.threshold);
            ensure(h.set.codes().collect::<Vec<_>>() == naive, || format!("seed {seed} k={k}: heavy set"))?;
            // |S_k|·2^k <= 2^{m_k-n_k}
            ensure(
                big(naive.len() as u64) * common::pow2(k as u64) <= common::pow2((frame.m(k) - frame.n(k)) as u64),
                || format!("seed {seed} k={k}: |S_k| = {} too large", naive.len()),
            )?;
            clamped += h.clamped as usize;
            windows_checked += 1;
        }
        let zt = e(twoscale::escape_pipeline(&frame, 1))?;
        ensure(e(twoscale::verify_escape(&frame, &zt, 1))?.passed(), || format!("seed {seed}: escape failed"))?;
        for k in 1..windows {
            let jz = e(zt.restrict(frame.n(k), frame.n(k + 1)))?.code();
            let jtz = e(zt.restrict(frame.m(k), frame.m(k + 1)))?.code();
            let j: HashSet<u64> = frame.j(k).codes().collect();
            let jt: HashSet<u64> = frame.jt(k).codes().collect();
            ensure(!j.contains(&jz) && !jt.contains(&jtz), || format!("seed {seed} k={k}: z~ inside J or Jt"))?;
        }
    }
    Ok(format!("500 frames, {windows_checked} windows ({clamped} clamped thresholds), pipeline from k0=1"))
}

fn c11_noncover() -> Outcome {
    let specs = [noncover::LevelSpec::toy(1, 2, 0), noncover::LevelSpec::toy(1, 2, 8)];
    let levels: Vec<bj::BjLevel> = specs.iter().map(|s| s.build()).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let span = levels.last().unwrap().hi() - levels[0].lo;
    ensure(span <= 16, || format!("span {span}"))?;
    let f = e(noncover::pattern_counts(&levels))?;
    let widths: Vec<u64> = levels.iter().map(|l| l.capacity).collect();
    let family = e(noncover::partition_cover(&f, &widths))?;
    // the family captures every path at every level
    for a in 0..f.at(0) {
        for b in 0..f.at(1) {
            ensure(family.iter().any(|s| s.level(0).contains(&a) && s.level(1).contains(&b)), || {
                format!("path ({a},{b}) not captured")
            })?;
        }
    }
    let cert = e(noncover::assemble_noncover_witness(&specs, &family, &noncover::NoncoverOptions::default()))?;
    ensure(cert.passed(), || "certificate failed".into())?;
    let all = cert
        .check("words y with y + x_S outside U at every level")
        .ok_or("missing exhaustive check")?;
    let words = (1u64 << span).to_string();
    ensure(all.lhs == words && all.rhs == words, || format!("{} of {} words", all.lhs, all.rhs))?;
    ensure(e(replay::verify(&cert))?.ok(), || "replay does not reproduce the certificate".into())?;
    Ok(format!("{} slaloms, all {words} words certified", family.len()))
}

fn cantorfin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_cantorfin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn c12_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let r1 = dir.path().join("r1.txt");
    let r2 = dir.path().join("r2.txt");
    std::fs::write(&r1, "cuts 0 1 2 3 4\nwitness 0000\nstart 0\n").map_err(|e| e.to_string())?;
    std::fs::write(&r2, "cuts 0 2 4\nwitness 0000\nstart 0\n").map_err(|e| e.to_string())?;
    let (r1, r2) = (r1.to_str().unwrap().to_string(), r2.to_str().unwrap().to_string());
    let commands: Vec<Vec<&str>> = vec![
        vec!["build", "indep", "--n", "3", "--count", "2", "--block", "6"],
        vec!["build", "shelah-tree", "--m", "1", "--stages", "2"],
        vec!["build", "counting-bound", "--n", "12"],
        vec!["build", "localization-h", "--cuts", "0,2,6", "--words", "010101,111000"],
        vec!["build", "bj-level", "--n", "1", "--fn", "2"],
        vec!["build", "evade", "--n", "1", "--fn", "2"],
        vec!["build", "two-scale", "--windows", "4", "--max-width", "4"],
        vec!["build", "noncover"],
        vec!["solve", "cov", "--f", "2,2", "--w", "1,1", "--t", "1"],
        vec!["solve", "cof", "--f", "3,3", "--w", "2,2"],
        vec!["solve", "match", "--family", "0,1,2,3;1,1,0,0", "--block", "2"],
        vec!["solve", "localize", "--family", "0,1,2;0,1,0", "--f", "3,3,3", "--from", "1"],
        vec!["solve", "includes", "--r1", &r1, "--r2", &r2],
    ];
    for (i, cmd) in commands.iter().enumerate() {
        let mut files = Vec::new();
        for (run, workers) in ["1", "4", "4"].iter().enumerate() {
            let out = dir.path().join(format!("c{i}-{run}.json"));
            let mut args = cmd.clone();
            let out_s = out.to_str().unwrap().to_string();
            args.extend(["--seed", "5", "--workers", workers, "--out", &out_s]);
            let o = cantorfin(&args);
            ensure(o.status.code() == Some(0), || {
                format!("`{}` exited {:?}: {}", cmd.join(" "), o.status.code(), String::from_utf8_lossy(&o.stderr))
            })?;
            files.push(std::fs::read(&out).map_err(|e| e.to_string())?);
            if run == 0 {
                let v = cantorfin(&["verify", &out_s]);
                ensure(v.status.code() == Some(0), || format!("verify of `{}` failed", cmd.join(" ")))?;
            }
        }
        ensure(files.windows(2).all(|p| p[0] == p[1]), || format!("`{}` differs across runs", cmd.join(" ")))?;
    }
    let benches: [&[&str]; 2] = [&["bench", "sumset", "--len", "16", "--repeat", "1"], &["bench", "cof", "--repeat", "1"]];
    for b in benches {
        let mut sums = Vec::new();
        for workers in ["1", "4"] {
            let mut args = b.to_vec();
            args.extend(["--json", "--seed", "5", "--workers", workers]);
            let o = cantorfin(&args);
            ensure(o.status.success(), || format!("`{}` failed", b.join(" ")))?;
            let v: serde_json::Value = serde_json::from_slice(&o.stdout).map_err(|e| e.to_string())?;
            sums.push(v["checksum"].as_str().unwrap_or_default().to_string());
        }
        ensure(sums[0] == sums[1] && !sums[0].is_empty(), || format!("`{}` checksum depends on workers", b.join(" ")))?;
    }
    Ok(format!("{} commands byte-identical over 3 runs (1 and 4 workers), 2 bench checksums", commands.len()))
}

fn main() -> ExitCode {
    let results = [
        criterion(1, 5.0, "indep measures", c1_measures),
        criterion(2, 30.0, "independence", c2_independence),
        criterion(3, 10.0, "shelah tree measure", c3_shelah),
        criterion(4, 10.0, "counting bound", c4_counting),
        criterion(5, 60.0, "level selection", c5_bj),
        criterion(6, 60.0, "evader", c6_evader),
        criterion(7, 120.0, "finite covering numbers", c7_covering),
        criterion(8, 60.0, "meager basis", c8_meager),
        criterion(9, 30.0, "shift-tree identity", c9_shift_tree),
        criterion(10, 60.0, "two-scale counting", c10_two_scale),
        criterion(11, 120.0, "non-cover witness", c11_noncover),
        criterion(12, 120.0, "determinism", c12_determinism),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
