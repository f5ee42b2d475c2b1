//! Seeded random streams.
//!
//! Every consumer derives an independent ChaCha stream from `(seed, stream)`,
//! so draws never depend on call interleaving. Stream assignment:
//!
//! * optimizer: stream `b` produces the `b`-th candidate batch (batch 0 is the
//!   initial set, each later round takes the next index);
//! * scripted oracles: stream `ORACLE_STREAM_BASE + q` for their `q`-th query;
//! * prior sampling and k-means take a caller-supplied stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub(crate) const ORACLE_STREAM_BASE: u64 = 1 << 48;

/// Deterministic generator for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `count` draws from N(0, std^2).
pub fn normal_vec<R: rand::Rng + ?Sized>(rng: &mut R, count: usize, std: f64) -> Vec<f64> {
    (0..count)
        .map(|_| {
            let e: f64 = StandardNormal.sample(rng);
            std * e
        })
        .collect()
}
