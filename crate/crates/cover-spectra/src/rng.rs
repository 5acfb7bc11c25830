//! Reproducible random streams.
//!
//! A stream is a ChaCha8 generator keyed by `(seed, trial)` and selecting the
//! ChaCha stream number `stream`. Samplers use stream `j` for the `j`-th base
//! edge orbit of a trial; drivers that need extra randomness for the same trial
//! (walk choice, start index) count down from [`AUX_STREAM`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub const AUX_STREAM: u64 = u64::MAX;

pub fn stream(seed: u64, trial: u64, stream: u64) -> StreamRng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&trial.to_le_bytes());
    key[16..].copy_from_slice(b"cover-spectra-v1");
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

pub fn aux(seed: u64, trial: u64, k: u64) -> StreamRng {
    stream(seed, trial, AUX_STREAM - k)
}
