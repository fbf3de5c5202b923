//! Seeded, counter-based random streams.
//!
//! Every random quantity in the crate is drawn from a ChaCha stream keyed by
//! `(seed, stream)`. Trial `k` of a batch uses seed `seed ^ k`, so any trial
//! can be regenerated on its own.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream identifiers. Keeping them in one place prevents two consumers from
/// silently sharing a stream.
pub mod streams {
    pub const STATE_S1: u64 = 1;
    pub const STATE_S2: u64 = 2;
    pub const BE_PAYLOAD: u64 = 10;
    pub const BE_PHASE3_STATE: u64 = 11;
    pub const BE_RLNC_COEFF: u64 = 12;
    pub const DPC: u64 = 20;
    pub const SR: u64 = 21;
    pub const SR_MIXTURE: u64 = 22;
}

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Seed for trial `k` of a batch started from `seed`.
pub fn trial_seed(seed: u64, k: u64) -> u64 {
    seed ^ k
}
