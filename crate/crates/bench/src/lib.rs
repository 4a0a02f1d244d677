//! Seeded inputs shared by the benchmarks.

use cantorfin::cube::BlockSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `count` random codes against a summand of density about 1/64.
pub fn sumset_pair(len: usize, count: usize, seed: u64) -> (BlockSet, BlockSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = 1u64 << len;
    let a: Vec<u64> = (0..count).map(|_| rng.gen_range(0..size)).collect();
    let b: Vec<u64> = (0..(size / 64).max(1)).map(|_| rng.gen_range(0..size)).collect();
    (
        BlockSet::from_codes(0, len, a, len).expect("within guard"),
        BlockSet::from_codes(0, len, b, len).expect("within guard"),
    )
}
