//! Named, independent random streams derived from a master seed.
//!
//! Every consumer of randomness (data sampling, model initialisation,
//! masking, regularisation draws, corruption, query sets, DAG variants)
//! gets its own ChaCha stream. The stream id is a hash of a label and a
//! list of integer coordinates, so adding a consumer never shifts the
//! numbers drawn by another one.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Well-known stream labels.
pub mod stream {
    pub const DATA: &str = "data";
    pub const TRAIN: &str = "train";
    pub const INIT: &str = "model-init";
    pub const MASKING: &str = "masking";
    pub const REGULARISATION: &str = "regularisation";
    pub const CORRUPTION: &str = "corruption";
    pub const QUERY_SET: &str = "query-set";
    pub const DAG_VARIANT: &str = "dag-variant";
}

/// FNV-1a over the label bytes followed by the little-endian coordinates.
fn stream_id(label: &str, coords: &[u64]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    let mut eat = |b: u8| {
        h ^= u64::from(b);
        h = h.wrapping_mul(PRIME);
    };
    for b in label.bytes() {
        eat(b);
    }
    eat(0xff);
    for c in coords {
        for b in c.to_le_bytes() {
            eat(b);
        }
    }
    h
}

/// Stream `label` at `coords` under `master`.
pub fn derive(master: u64, label: &str, coords: &[u64]) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream_id(label, coords));
    rng
}

/// Plain seeded generator, used where a caller supplies a single seed.
pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
