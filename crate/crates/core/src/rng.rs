//! Seeds, named streams and coin sources.
//!
//! All randomness in the crate is derived from a single 64-bit seed. A
//! [`SeedSpec`] is split into named [`StreamKey`]s (e.g. `"walk"`, `"q"`,
//! `"jitter"`), each of which can be further split by an integer index so
//! that sample `i` of an experiment owns its own independent streams no
//! matter which worker computes it.
//!
//! Coins are counter-based: the `k`-th coin of a stream is a pure function of
//! `(key, k)`, and a rectangle coin of the discrete web is a pure function of
//! `(key, anchor)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Root seed of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub seed: u64,
}

impl SeedSpec {
    pub const fn new(seed: u64) -> Self {
        SeedSpec { seed }
    }

    /// Derive the stream with the given label.
    pub fn stream(&self, label: &str) -> StreamKey {
        StreamKey(mix64(self.seed ^ mix64(fnv1a(label))))
    }
}

impl From<u64> for SeedSpec {
    fn from(seed: u64) -> Self {
        SeedSpec { seed }
    }
}

/// Key of a named stream; cheap to copy and to split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey(pub u64);

impl StreamKey {
    /// Independent sub-stream number `i`.
    pub fn index(self, i: u64) -> StreamKey {
        StreamKey(mix64(self.0 ^ mix64(i.wrapping_mul(0xD6E8_FEB8_6659_FD93))))
    }

    /// Sub-stream with a textual label.
    pub fn child(self, label: &str) -> StreamKey {
        StreamKey(mix64(self.0 ^ fnv1a(label)))
    }

    /// The `counter`-th 64-bit word of this stream.
    #[inline]
    pub fn word(self, counter: u64) -> u64 {
        mix64(self.0.wrapping_add(mix64(counter)))
    }

    /// Uniform in `[0, 1)` from word `counter`.
    #[inline]
    pub fn uniform(self, counter: u64) -> f64 {
        (self.word(counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A conventional PRNG seeded from this key, for drawing from
    /// distributions.
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

/// What the walk knows when it has to toss a coin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoinRequest {
    /// Zero-based number of this coin (`k` before the toss).
    pub index: u64,
    /// Current position of the walker.
    pub site: i64,
    /// Common value `ℓ⁻ = ℓ⁺` of the two neighbouring edges.
    pub height: i64,
}

/// Source of fair coins. `true` means "step to the right".
pub trait CoinSource {
    fn toss(&mut self, req: CoinRequest) -> bool;
}

impl<C: CoinSource + ?Sized> CoinSource for &mut C {
    fn toss(&mut self, req: CoinRequest) -> bool {
        (**self).toss(req)
    }
}

/// Coins addressed by their order of appearance: coin `k` is bit `k % 64`
/// of word `k / 64` of the stream.
#[derive(Debug, Clone)]
pub struct StreamCoins {
    key: StreamKey,
    cached_block: u64,
    cached_word: u64,
}

impl StreamCoins {
    pub fn new(key: StreamKey) -> Self {
        StreamCoins {
            key,
            cached_block: u64::MAX,
            cached_word: 0,
        }
    }

    #[inline]
    pub fn bit(&mut self, index: u64) -> bool {
        let block = index >> 6;
        if block != self.cached_block {
            self.cached_block = block;
            self.cached_word = self.key.word(block);
        }
        (self.cached_word >> (index & 63)) & 1 == 1
    }
}

impl CoinSource for StreamCoins {
    #[inline]
    fn toss(&mut self, req: CoinRequest) -> bool {
        self.bit(req.index)
    }
}

/// Hash of a rectangle anchor `(edge_idx + 1/2, h)` of the discrete web
/// into a single fair bit. `true` is an upwards filling.
#[inline]
pub fn anchor_bit(key: StreamKey, edge_idx: i64, h: i64) -> bool {
    let a = (edge_idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let b = (h as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    mix64(key.0 ^ mix64(a ^ b.rotate_left(29))) & 1 == 1
}

/// Coins addressed by the web rectangle the walker sits at the bottom of.
///
/// At a coin time the walker at site `x` with `ℓ⁻ = ℓ⁺ = h` is at the bottom
/// of the rectangle anchored at `(x − 1/2, h + 1)`; an upwards filling sends
/// it to the right. This is the addressing used by
/// [`crate::web::WebStore`], so a walk driven by `AnchorCoins` and the maze
/// explorer over a store with the same key follow the same path.
#[derive(Debug, Clone, Copy)]
pub struct AnchorCoins {
    pub key: StreamKey,
}

impl AnchorCoins {
    pub fn new(key: StreamKey) -> Self {
        AnchorCoins { key }
    }
}

impl CoinSource for AnchorCoins {
    #[inline]
    fn toss(&mut self, req: CoinRequest) -> bool {
        anchor_bit(self.key, req.site - 1, req.height + 1)
    }
}

/// A fixed sequence of coins, mostly for tests and the exact enumeration.
#[derive(Debug, Clone, Default)]
pub struct ScriptedCoins {
    coins: Vec<bool>,
    cursor: usize,
}

impl ScriptedCoins {
    pub fn new(coins: Vec<bool>) -> Self {
        ScriptedCoins { coins, cursor: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.coins.len() - self.cursor
    }
}

impl CoinSource for ScriptedCoins {
    fn toss(&mut self, _req: CoinRequest) -> bool {
        let c = *self
            .coins
            .get(self.cursor)
            .expect("scripted coin sequence exhausted");
        self.cursor += 1;
        c
    }
}

/// Mirror of another source: every coin is flipped.
#[derive(Debug, Clone)]
pub struct Flipped<C>(pub C);

impl<C: CoinSource> CoinSource for Flipped<C> {
    fn toss(&mut self, req: CoinRequest) -> bool {
        !self.0.toss(req)
    }
}
