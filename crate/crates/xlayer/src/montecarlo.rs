//! Reproducible seeded Monte Carlo plumbing.
//!
//! Every trial draws from its own ChaCha stream derived from (seed, trial
//! index), so results are identical whether trials run serially or across
//! any number of rayon workers.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// RNG for one trial: a fixed 64-bit seed selects the key, the trial index
/// selects the stream.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Run `trials` independent trials in parallel, returning results in trial
/// order.
pub fn parallel_trials<T, F>(trials: u64, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> T + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            f(i, &mut rng)
        })
        .collect()
}
