//! Timing runs that double as correctness runs: every report carries a
//! checksum of the computed result.

use std::time::Instant;

use cantorfin::cube::{sumset, BlockSet};
use cantorfin::slalom::{CoverKind, GrowthFn, SearchOptions};
use cantorfin::solve;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::args::{Bench, Cli};
use crate::{CliError, CliResult};

fn set_checksum(s: &BlockSet) -> String {
    let mut h = Sha256::new();
    h.update((s.lo() as u64).to_le_bytes());
    h.update((s.hi() as u64).to_le_bytes());
    for c in s.codes() {
        h.update(c.to_le_bytes());
    }
    hex::encode(h.finalize())
}

/// Sparse `A` with `count` random codes and `B` with density about 1/64.
pub fn sumset_inputs(len: usize, count: usize, seed: u64, guard: usize) -> cantorfin::Result<(BlockSet, BlockSet)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = 1u64 << len.min(63);
    let a: Vec<u64> = (0..count).map(|_| rng.gen_range(0..size)).collect();
    let b: Vec<u64> = (0..(size / 64).max(1)).map(|_| rng.gen_range(0..size)).collect();
    Ok((
        BlockSet::from_codes(0, len, a, guard)?,
        BlockSet::from_codes(0, len, b, guard)?,
    ))
}

pub fn run(cli: &Cli, b: &Bench, workers: usize) -> CliResult<u8> {
    let report = match b {
        Bench::Sumset { len, count, repeat } => {
            if *len > cli.guard_bits {
                return Err(CliError::Core(cantorfin::Error::GuardExceeded {
                    what: "sumset interval length",
                    needed: *len as u64,
                    limit: cli.guard_bits as u64,
                }));
            }
            let (a, bset) = sumset_inputs(*len, *count, cli.seed, cli.guard_bits)?;
            let mut times = Vec::new();
            let mut result = None;
            for _ in 0..(*repeat).max(1) {
                let t = Instant::now();
                let s = sumset(&a, &bset)?;
                times.push(t.elapsed().as_secs_f64() * 1e3);
                result = Some(s);
            }
            let s = result.expect("at least one run");
            serde_json::json!({
                "kernel": "sumset",
                "len": len,
                "seed": cli.seed,
                "workers": workers,
                "a": a.len(),
                "b": bset.len(),
                "sum": s.len(),
                "best_ms": times.iter().cloned().fold(f64::INFINITY, f64::min),
                "checksum": set_checksum(&s),
            })
        }
        Bench::Cof { f, w, repeat } => {
            let g = GrowthFn::new(f.clone())?;
            let opts = SearchOptions {
                workers,
                ..SearchOptions::default()
            };
            let mut times = Vec::new();
            let mut last = None;
            for _ in 0..(*repeat).max(1) {
                let t = Instant::now();
                let (cert, out) = solve::certify_cover(&g, w, CoverKind::Cof, &opts)?;
                times.push(t.elapsed().as_secs_f64() * 1e3);
                last = Some((cert, out));
            }
            let (cert, out) = last.expect("at least one run");
            serde_json::json!({
                "kernel": "cof",
                "f": f,
                "w": w,
                "seed": cli.seed,
                "workers": workers,
                "value": out.value(),
                "best_ms": times.iter().cloned().fold(f64::INFINITY, f64::min),
                "checksum": cert.checksum,
            })
        }
    };
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        let obj = report.as_object().expect("object");
        let line: Vec<String> = obj.iter().map(|(k, v)| format!("{k}={v}")).collect();
        println!("{}", line.join("\t"));
    }
    Ok(0)
}
