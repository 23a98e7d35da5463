//! Seeds and counter-based stream splitting.
//!
//! Every random operation takes a [`Seed`] and builds its own ChaCha8 stream
//! from it. Child seeds are read from a keyed ChaCha stream at a fixed word
//! position, so `child(a, b)` depends only on `(self, a, b)` and never on how
//! many other children were derived before it.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Stream `stream` of this seed's ChaCha key.
    pub fn stream(self, stream: u64) -> ChaCha8Rng {
        let mut rng = self.rng();
        rng.set_stream(stream);
        rng
    }

    pub fn child(self, stream: u64, index: u64) -> Seed {
        let mut rng = self.stream(stream);
        rng.set_word_pos(u128::from(index) * 2);
        Seed(rng.next_u64())
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

impl std::fmt::Display for Seed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}
