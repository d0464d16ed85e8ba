//! Stable per-item seeding: SHA-256 over the global seed and labelled parts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Generator used for every stochastic step. Changing it changes all outputs.
pub type Rng = ChaCha8Rng;

pub fn derive_seed(global: u64, parts: &[&[u8]]) -> u64 {
    let mut h = Sha256::new();
    h.update(global.to_le_bytes());
    for p in parts {
        h.update((p.len() as u32).to_le_bytes());
        h.update(p);
    }
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().unwrap())
}

pub fn rng_from(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
