//! Counter-based, splittable randomness.
//!
//! Every random draw in the crate is a pure function of a root seed, a chain of
//! purpose tags and a draw index. A [`StreamKey`] names one node of that tree;
//! [`StreamKey::rng`] opens an independent ChaCha8 stream for a single index, so
//! work items can be evaluated in any order (or in parallel) and still produce
//! identical numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Order-sensitive hash of a word sequence.
pub fn hash_words(seed: u64, words: impl IntoIterator<Item = u64>) -> u64 {
    let mut h = mix64(seed ^ GOLDEN);
    for w in words {
        h = mix64(h.wrapping_add(GOLDEN) ^ mix64(w));
    }
    h
}

fn fnv1a(tag: &str) -> u64 {
    tag.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// A node in the seed tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey(u64);

impl StreamKey {
    pub fn root(seed: u64) -> Self {
        StreamKey(mix64(seed ^ 0x5a17_c0de_0000_0001))
    }

    /// Derives an independent key for a named purpose.
    pub fn child(self, tag: &str) -> Self {
        StreamKey(hash_words(self.0, [fnv1a(tag)]))
    }

    /// Derives an independent key for a numbered sub-task (sweep entry, sample, ...).
    pub fn child_index(self, index: u64) -> Self {
        StreamKey(hash_words(self.0, [0x1d3e_0000_0000_0000 ^ index]))
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    /// Opens the generator for draw `index` under this key.
    pub fn rng(self, index: u64) -> ChaCha8Rng {
        let mut seed = [0u8; 32];
        let mut s = self.0;
        for chunk in seed.chunks_exact_mut(8) {
            s = s.wrapping_add(GOLDEN);
            chunk.copy_from_slice(&mix64(s).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(seed);
        rng.set_stream(index);
        rng
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn draws_are_pure_functions_of_key_and_index() {
        let key = StreamKey::root(7).child("scenario");
        let a: Vec<u64> = (0..5).map(|i| key.rng(i).random()).collect();
        let mut b: Vec<u64> = (0..5).rev().map(|i| key.rng(i).random()).collect();
        b.reverse();
        assert_eq!(a, b);
    }

    #[test]
    fn children_are_distinct() {
        let root = StreamKey::root(1);
        assert_ne!(root.child("a"), root.child("b"));
        assert_ne!(root.child_index(0), root.child_index(1));
        assert_ne!(StreamKey::root(1), StreamKey::root(2));
        let x: u64 = root.child("a").rng(0).random();
        let y: u64 = root.child("b").rng(0).random();
        assert_ne!(x, y);
    }

    #[test]
    fn streams_for_neighbouring_indices_differ() {
        let key = StreamKey::root(3);
        let x: [u64; 4] = key.rng(10).random();
        let y: [u64; 4] = key.rng(11).random();
        assert_ne!(x, y);
    }
}
