//! Seeded random streams.
//!
//! One engine seed fixes every random decision. Independent consumers get
//! independent ChaCha8 streams derived from that seed, so the draw one
//! consumer makes never shifts another's sequence. Stream indices are
//! partitioned by convention:
//!
//! * indices below 1<<63: method-level sampling (one stream per
//!   permutation/sample batch);
//! * indices at or above 1<<63: per-evaluation baseline draws
//!   ([`baseline_stream`]), salted with the evaluation index.
//!
//! Because an evaluation's stream depends only on its pre-assigned index,
//! results are bit-identical no matter how evaluations are scheduled
//! across workers.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Marks baseline-draw streams; method streams must stay below this bit.
pub const BASELINE_STREAM_BIT: u64 = 1 << 63;

/// The `index`-th stream of the generator family seeded by `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Stream used for the baseline draw of evaluation `eval_index`.
pub fn baseline_stream(seed: u64, eval_index: u64) -> ChaCha8Rng {
    stream(seed, BASELINE_STREAM_BIT | eval_index)
}

/// SplitMix64 sequence. Used for toy-model parameter initialization so the
/// exact parameter bytes are pinned by these three constants and the fill
/// order, independent of any RNG crate's internals.
///
/// state += 0x9E3779B97F4A7C15;
/// z = state; z = (z ^ z>>30) * 0xBF58476D1CE4E5B9;
/// z = (z ^ z>>27) * 0x94D049BB133111EB; output z ^ z>>31.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1): top 53 bits scaled by 2^-53.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [-0.5, 0.5).
    pub fn next_centered(&mut self) -> f64 {
        self.next_f64() - 0.5
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible() {
        let a: Vec<u64> = (0..8).map(|_| stream(7, 3).random::<u64>()).collect();
        assert!(a.iter().all(|v| *v == a[0]));
        let mut r1 = stream(7, 3);
        let mut r2 = stream(7, 3);
        for _ in 0..100 {
            assert_eq!(r1.random::<u64>(), r2.random::<u64>());
        }
    }

    #[test]
    fn streams_differ_by_index_and_seed() {
        let mut base = stream(7, 0);
        let mut other_stream = stream(7, 1);
        let mut other_seed = stream(8, 0);
        let a: Vec<u64> = (0..4).map(|_| base.random()).collect();
        let b: Vec<u64> = (0..4).map(|_| other_stream.random()).collect();
        let c: Vec<u64> = (0..4).map(|_| other_seed.random()).collect();
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn baseline_streams_do_not_collide_with_method_streams() {
        let mut m = stream(7, 5);
        let mut b = baseline_stream(7, 5);
        let a: Vec<u64> = (0..4).map(|_| m.random()).collect();
        let c: Vec<u64> = (0..4).map(|_| b.random()).collect();
        assert_ne!(a, c);
    }

    #[test]
    fn splitmix_known_sequence() {
        // First outputs for seed 0 of the reference SplitMix64 sequence.
        let mut sm = SplitMix64::new(0);
        assert_eq!(sm.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(sm.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(sm.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn splitmix_centered_range() {
        let mut sm = SplitMix64::new(42);
        for _ in 0..10_000 {
            let v = sm.next_centered();
            assert!((-0.5..0.5).contains(&v));
        }
    }
}
