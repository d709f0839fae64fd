//! Pluggable randomness for minted IRIs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uuid::Uuid;

/// Source of version-4 UUIDs used as suffixes of minted IRIs.
pub trait IdSource: Send + Sync {
    fn next_uuid(&mut self) -> Uuid;
}

/// Operating-system randomness.
#[derive(Debug, Default)]
pub struct RandomIds;

impl IdSource for RandomIds {
    fn next_uuid(&mut self) -> Uuid {
        Uuid::new_v4()
    }
}

/// Reproducible sequence from a seed.
#[derive(Debug, Clone)]
pub struct SeededIds(ChaCha8Rng);

impl SeededIds {
    pub fn new(seed: u64) -> Self {
        SeededIds(ChaCha8Rng::seed_from_u64(seed))
    }
}

impl IdSource for SeededIds {
    fn next_uuid(&mut self) -> Uuid {
        let mut bytes = [0u8; 16];
        self.0.fill(&mut bytes);
        uuid::Builder::from_random_bytes(bytes).into_uuid()
    }
}
