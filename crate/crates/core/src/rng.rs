//! Seedable, splittable randomness: every Monte Carlo trial draws from its
//! own ChaCha stream derived from `(seed, trial)`, so estimates reproduce
//! bit-for-bit regardless of scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}
