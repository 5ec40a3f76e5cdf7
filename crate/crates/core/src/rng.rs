//! Seeded random streams.
//!
//! Every experiment derives its randomness from a single `u64` seed. Each
//! consumer (trial, purpose) gets its own ChaCha stream so that, e.g., the
//! measurement pattern and the noise pattern of one instance are drawn from
//! disjoint streams and trials can run in any order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Purpose tags for stream separation within a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Truth = 0,
    Omega = 1,
    Noise = 2,
    Init = 3,
    Points = 4,
    Directions = 5,
    Misc = 6,
}

const PURPOSES: u64 = 8;

/// Stream for `(trial, purpose)` under `seed`.
pub fn stream(seed: u64, trial: u64, purpose: Purpose) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial.wrapping_mul(PURPOSES).wrapping_add(purpose as u64));
    rng
}

/// Plain stream for a seed, used where only one consumer exists.
pub fn from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
