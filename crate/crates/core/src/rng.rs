//! Seeded, label-addressed random streams.
//!
//! A stream is identified by a root seed and a `/`-separated label path. The
//! ChaCha key is the SHA-256 digest of both, so adding a new stream label
//! never shifts the numbers drawn by an existing one.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    #[serde(default)]
    pub stream_label: String,
}

impl RngSeed {
    pub fn new(seed: u64, stream_label: impl Into<String>) -> Self {
        Self {
            seed,
            stream_label: stream_label.into(),
        }
    }

    pub fn root(seed: u64) -> Self {
        Self::new(seed, "")
    }

    /// Child stream `self.stream_label/part`.
    pub fn derive(&self, part: impl AsRef<str>) -> Self {
        let part = part.as_ref();
        let stream_label = if self.stream_label.is_empty() {
            part.to_string()
        } else {
            format!("{}/{}", self.stream_label, part)
        };
        Self {
            seed: self.seed,
            stream_label,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut hasher = Sha256::new();
        hasher.update(self.seed.to_le_bytes());
        hasher.update((self.stream_label.len() as u64).to_le_bytes());
        hasher.update(self.stream_label.as_bytes());
        let key: [u8; 32] = hasher.finalize().into();
        ChaCha8Rng::from_seed(key)
    }
}

impl Default for RngSeed {
    fn default() -> Self {
        Self::root(0)
    }
}
