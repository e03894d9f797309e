//! Counter-based deterministic random streams.
//!
//! Every random draw in this crate is keyed: a stream is opened from a tuple
//! (domain tag, master seed, indices such as sample number / coordinate /
//! retry counter) and yields variates independent of any other stream. Two
//! runs with the same keys produce bit-identical values no matter in which
//! order the streams are consumed, which is what makes samples, noise draws,
//! and whole experiment grids reproducible and order-independent.
//!
//! The generator is SplitMix64: the state advances by a fixed odd constant
//! and the output is a 3-round avalanche of the counter. Keys are absorbed
//! through the same finalizer, one word at a time.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Domain-separation tags so that streams for different purposes never
/// collide even when their numeric indices do.
pub mod tag {
    pub const OPTIMAL_DRAW: u64 = 0x01;
    pub const STANDARD_DRAW: u64 = 0x02;
    pub const NOISE: u64 = 0x03;
    pub const SEQUENCE: u64 = 0x04;
    pub const REPETITION: u64 = 0x05;
    pub const MONTE_CARLO: u64 = 0x06;
    pub const TARGET: u64 = 0x07;
}

/// A keyed SplitMix64 stream.
#[derive(Clone, Debug)]
pub struct Stream {
    state: u64,
}

impl Stream {
    /// Open a stream from a key. Each word is absorbed through the avalanche
    /// function, so keys differing in any single word give unrelated streams.
    pub fn from_key(words: &[u64]) -> Self {
        let mut s: u64 = 0x243f_6a88_85a3_08d3; // pi fraction, arbitrary nonzero
        for &w in words {
            s = mix(s.wrapping_add(GOLDEN).wrapping_add(w));
        }
        Stream { state: s }
    }

    /// Derive a fresh 64-bit seed from a key (used to give repetitions and
    /// sub-experiments their own master seeds).
    pub fn derive(words: &[u64]) -> u64 {
        Stream::from_key(words).next_u64()
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    /// Uniform on the open interval (0, 1); never returns 0 or 1, so it is
    /// safe to feed into logs and inverse CDFs.
    #[inline]
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Uniform on [lo, hi].
    #[inline]
    pub fn next_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_open01()
    }

    /// Standard normal via Box–Muller (one variate per call; the partner is
    /// discarded to keep the draw count predictable).
    #[inline]
    pub fn next_standard_normal(&mut self) -> f64 {
        let u1 = self.next_open01();
        let u2 = self.next_open01();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Uniform integer in [0, n).
    pub fn next_below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        // Rejection to kill modulo bias; at most a couple of retries.
        let n = n as u64;
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return (v % n) as usize;
            }
        }
    }
}
