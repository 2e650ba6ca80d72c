//! Counter-based deterministic random source.
//!
//! Every value is a pure function of (seed, counter), so streams can be
//! replayed, split by tag, or indexed out of order — the properties the
//! drop-mask and random-projection code rely on for order-independent
//! determinism. Integer outputs are platform-independent.

use super::Matrix;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a over a byte string, used to derive per-tag substreams.
fn hash_tag(tag: &str) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for b in tag.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Seeded counter-based RNG state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RngState {
    seed: u64,
    counter: u64,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self { seed, counter: 0 }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Independent substream keyed by a tag; counter starts at 0.
    pub fn derive(&self, tag: &str) -> Self {
        Self {
            seed: mix(self.seed ^ hash_tag(tag)),
            counter: 0,
        }
    }

    /// Independent substream keyed by an index.
    pub fn derive_index(&self, index: u64) -> Self {
        Self {
            seed: mix(self.seed ^ index.wrapping_mul(GOLDEN) ^ 0x5851_F42D_4C95_7F2D),
            counter: 0,
        }
    }

    /// Raw 64-bit value at an absolute counter position (does not advance).
    pub fn value_at(&self, counter: u64) -> u64 {
        mix(mix(self.seed) ^ counter.wrapping_mul(GOLDEN))
    }

    fn next_u64(&mut self) -> u64 {
        let v = self.value_at(self.counter);
        self.counter += 1;
        v
    }

    /// Uniform in [0, 1); consumes one counter step.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [0, 1) at an absolute counter position (does not advance).
    pub fn uniform_at(&self, counter: u64) -> f64 {
        (self.value_at(counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via the Box-Muller transform; consumes exactly two
    /// counter steps per value (the sine twin is discarded so that value k of
    /// a stream depends on counters 2k and 2k+1 only).
    pub fn gaussian(&mut self) -> f64 {
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// rows x cols matrix of standard normals, row-major fill order;
    /// consumes 2*rows*cols counter steps.
    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(rows, cols, |_, _| self.gaussian())
    }
}
