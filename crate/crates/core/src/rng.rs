//! Deterministic RNG substreams.
//!
//! Every sampler takes an explicit RNG. Parallel work derives one substream
//! per task from `(master seed, label, index)` so results never depend on
//! thread scheduling or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used throughout the crate.
pub type Stream = ChaCha8Rng;

/// SplitMix64 step; decorrelates nearby seeds before keying ChaCha.
fn splitmix64(state: &mut u64) {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    let _ = z ^ (z >> 31);
}

fn mix(seed: u64, salt: u64) -> u64 {
    let mut state = seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    splitmix64(&mut state);
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Root stream for a master seed.
pub fn master(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Substream for `(seed, label, index)`. Labels keep independent experiment
/// stages (data generation, chains, Monte Carlo distance jobs) decoupled even
/// when they share an index.
pub fn substream(seed: u64, label: &str, index: u64) -> Stream {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, h));
    rng.set_stream(index);
    rng
}
