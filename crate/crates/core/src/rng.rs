//! Named random substreams.
//!
//! Every consumer of randomness gets its own ChaCha8 stream whose key is
//! SHA-256(master seed, label, indices). Streams never share state, so the
//! order in which windows, rounds or policies are processed cannot change any
//! draw.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type StreamRng = ChaCha8Rng;

/// Stream labels used by the simulator.
pub mod label {
    pub const POPULATION: &str = "population";
    pub const CHANNELS: &str = "channels";
    pub const CLASS_MEANS: &str = "data/class-means";
    pub const DATA: &str = "data/ue";
}

/// Derives an independent generator for `(seed, label, indices)`.
pub fn substream(seed: u64, label: &str, indices: &[u64]) -> StreamRng {
    let mut hasher = Sha256::new();
    hasher.update(b"fedsched-substream-v1");
    hasher.update(seed.to_le_bytes());
    hasher.update((label.len() as u64).to_le_bytes());
    hasher.update(label.as_bytes());
    for idx in indices {
        hasher.update(idx.to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}
