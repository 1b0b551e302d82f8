//! Seeded, keyed random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 stream whose key is
//! derived from a master seed and a path of integer indices (for example
//! `(stream tag, b1, b2)` for a candidate projection). The stream for a task
//! therefore does not depend on the order in which tasks are executed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Stream tags used when deriving keyed sub-seeds.
pub mod streams {
    pub const RP_CANDIDATE: u64 = 0x5250_0001;
    pub const PRECISION_SUMMAND: u64 = 0x5250_0002;
    pub const SKETCH: u64 = 0x5250_0003;
    pub const TEST_SPLIT: u64 = 0x5250_0010;
    pub const TRAIN_SPLIT: u64 = 0x5250_0011;
    pub const METHOD: u64 = 0x5250_0012;
    pub const SWEEP: u64 = 0x5250_0013;
    pub const SIMULATION: u64 = 0x5250_0020;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngSeed {
    /// Derive the seed of the sub-stream addressed by `key`.
    pub fn derive(self, key: &[u64]) -> RngSeed {
        let mut h = splitmix(self.0);
        for &k in key {
            h = splitmix(h ^ splitmix(k.wrapping_add(0x632B_E59B_D9B4_E019)));
        }
        RngSeed(h)
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

impl From<u64> for RngSeed {
    fn from(v: u64) -> Self {
        RngSeed(v)
    }
}
