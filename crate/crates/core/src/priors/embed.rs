//! Deterministic trigram-hash embedder.
//!
//! Not semantic: texts that share character trigrams point in similar
//! directions, nothing more. Used for demos and tests in place of a real text
//! encoder.

use super::Embedding;
use crate::error::{Error, Result};

pub const DEFAULT_EMBEDDING_DIM: usize = 768;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
const HASH_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

fn fnv1a(bytes: impl IntoIterator<Item = u8>) -> u64 {
    let mut h = FNV_OFFSET ^ HASH_SEED;
    for b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Embeds `text` into [`DEFAULT_EMBEDDING_DIM`] dimensions.
pub fn toy_embed(text: &str) -> Result<Embedding> {
    toy_embed_with_dim(text, DEFAULT_EMBEDDING_DIM)
}

/// Signed feature hashing of lowercase character trigrams (padded with one
/// space on each side), L2-normalized.
pub fn toy_embed_with_dim(text: &str, dim: usize) -> Result<Embedding> {
    if text.trim().is_empty() {
        return Err(Error::Domain("cannot embed empty text".into()));
    }
    if dim == 0 {
        return Err(Error::Config("embedding dimension must be positive".into()));
    }
    let chars: Vec<char> = std::iter::once(' ')
        .chain(text.trim().to_lowercase().chars())
        .chain(std::iter::once(' '))
        .collect();
    let mut v = vec![0.0; dim];
    for w in chars.windows(3) {
        let mut buf = [0u8; 12];
        let mut len = 0;
        for c in w {
            len += c.encode_utf8(&mut buf[len..]).len();
        }
        let h = fnv1a(buf[..len].iter().copied());
        let sign = if h >> 63 == 0 { 1.0 } else { -1.0 };
        v[(h % dim as u64) as usize] += sign;
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        // All trigrams cancelled; fall back to the first bucket touched.
        let h = fnv1a(text.bytes());
        v[(h % dim as u64) as usize] = 1.0;
    } else {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    Embedding::new(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::priors::cosine_similarity;

    #[test]
    fn deterministic_unit_norm() {
        let a = toy_embed("a person walks forward").unwrap();
        let b = toy_embed("a person walks forward").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.dim(), DEFAULT_EMBEDDING_DIM);
        for text in ["x", "ab", "someone kicks with the right leg", "ÜNÏCÖDE ☃ text"] {
            let e = toy_embed(text).unwrap();
            assert!((e.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_text_rejected() {
        assert!(matches!(toy_embed(""), Err(Error::Domain(_))));
        assert!(matches!(toy_embed("   "), Err(Error::Domain(_))));
    }

    #[test]
    fn shared_trigrams_are_closer() {
        let base = toy_embed("a person walks forward").unwrap();
        let near = toy_embed("a person walks forwards").unwrap();
        let far = toy_embed("someone kicks with the right leg").unwrap();
        let s_near = cosine_similarity(base.as_slice(), near.as_slice());
        let s_far = cosine_similarity(base.as_slice(), far.as_slice());
        assert!(s_near > s_far, "{s_near} vs {s_far}");
    }
}
