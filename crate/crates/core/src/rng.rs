//! Seeded randomness. Every stochastic code path in the crate takes an
//! explicit random source so runs are reproducible from a single u64 seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::chunk::ActionChunk;

/// The crate-wide deterministic generator.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream from `(seed, tag, index)` via splitmix64
/// mixing, so e.g. per-epoch streams do not depend on how many draws earlier
/// epochs consumed.
pub fn derive_stream(seed: u64, tag: u64, index: u64) -> ChaCha8Rng {
    let mut state = seed
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(tag.wrapping_mul(0xbf58_476d_1ce4_e5b9))
        .wrapping_add(index.wrapping_mul(0x94d0_49bb_1331_11eb));
    state = splitmix64(&mut state);
    ChaCha8Rng::seed_from_u64(state)
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn standard_normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// An `n_steps x dims` chunk of i.i.d. unit Gaussians.
pub fn gaussian_chunk(rng: &mut impl Rng, n_steps: usize, dims: usize) -> ActionChunk {
    let mut out = ActionChunk::zeros(n_steps, dims);
    for v in out.as_mut_slice() {
        *v = standard_normal(rng);
    }
    out
}
