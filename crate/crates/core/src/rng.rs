//! Seeds and deterministic seed derivation.
//!
//! Every random stream in the crate is a `ChaCha8Rng` seeded through
//! [`RngSeed::rng`]. Child seeds for restarts and experiment cells are derived
//! with [`RngSeed::derive`], which folds each coordinate into the parent with the
//! SplitMix64 finalizer:
//!
//! ```text
//! h = seed
//! for c in coords: h = splitmix64(h ^ splitmix64(c + 0x9E3779B97F4A7C15))
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Derives an independent child seed from integer coordinates.
    pub fn derive(self, coords: &[u64]) -> RngSeed {
        let mut h = self.0;
        for &c in coords {
            h = splitmix64(h ^ splitmix64(c.wrapping_add(0x9E37_79B9_7F4A_7C15)));
        }
        RngSeed(h)
    }
}

impl From<u64> for RngSeed {
    fn from(seed: u64) -> Self {
        RngSeed(seed)
    }
}

impl std::fmt::Display for RngSeed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// SplitMix64 output function.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
