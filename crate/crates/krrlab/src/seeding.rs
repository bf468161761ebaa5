//! Deterministic RNG stream derivation.
//!
//! Every trial of every cell draws from a ChaCha12 stream keyed by the
//! `(master_seed, cell, trial, purpose)` tuple: the four values occupy
//! disjoint byte lanes of the 32-byte key, so distinct tuples can never
//! collide and worker scheduling cannot change any draw.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// What a derived stream is used for within one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamKind {
    /// Sample-point draws.
    Design,
    /// Observation-noise draws.
    Labels,
    /// k-th independent noise vector of the Monte Carlo oracle.
    McNoise(u32),
}

impl StreamKind {
    fn tag(self) -> u64 {
        match self {
            StreamKind::Design => 0,
            StreamKind::Labels => 1,
            StreamKind::McNoise(k) => 2 + k as u64,
        }
    }
}

/// Identifies one trial of one sweep cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialKey {
    pub master_seed: u64,
    pub cell: u64,
    pub trial: u64,
}

impl TrialKey {
    pub fn rng(&self, kind: StreamKind) -> ChaCha12Rng {
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&self.master_seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.cell.to_le_bytes());
        key[16..24].copy_from_slice(&self.trial.to_le_bytes());
        key[24..32].copy_from_slice(&kind.tag().to_le_bytes());
        ChaCha12Rng::from_seed(key)
    }
}

/// FNV-1a hash of a canonical cell descriptor string. Content-derived so
/// removing a cell from a config leaves every other cell's streams intact.
pub fn cell_hash(canonical: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for byte in canonical.as_bytes() {
        h ^= *byte as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}
