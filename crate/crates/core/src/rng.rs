//! Seed derivation for reproducible, order-independent sampling.
//!
//! Every random stage draws from its own ChaCha stream keyed by
//! `(master seed, replication index, stage tag)`. Adding a stage or running
//! replications on a different number of workers never shifts another
//! stage's draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifies one sampling stage inside a replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Stage {
    Labels = 1,
    Theta = 2,
    Edges = 3,
    Observe = 4,
    Mask = 5,
    Folds = 6,
}

pub type StreamRng = ChaCha8Rng;

/// Returns the generator for `stage` of replication `replication`.
pub fn stream(master: u64, replication: u64, stage: Stage) -> StreamRng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master.to_le_bytes());
    key[8..16].copy_from_slice(&replication.to_le_bytes());
    key[16..24].copy_from_slice(&(stage as u64).to_le_bytes());
    key[24..].copy_from_slice(b"netprop\0");
    ChaCha8Rng::from_seed(key)
}
