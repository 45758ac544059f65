//! Reproducible randomness.
//!
//! Every random draw in the crate goes through [`SbmRng`], a thin wrapper over
//! ChaCha8 (a counter-based stream cipher generator, stable across platforms
//! and `rand` releases for a given seed). Uniform doubles take the top 53 bits
//! of a `u64`; Gaussians use the Box–Muller transform on two such uniforms.
//!
//! Multi-replicate experiments derive per-run seeds with [`derive_seed`], a
//! SplitMix64 finalizer chain, so runs can be scheduled in any order.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `seed = mix64(mix64(base ^ mix64(a)) ^ b)`.
///
/// Used as `derive_seed(base_seed, point_index, replicate_index)` by sweeps and
/// with fixed stream tags to split one user seed into independent streams.
pub fn derive_seed(base: u64, a: u64, b: u64) -> u64 {
    mix64(mix64(base ^ mix64(a)) ^ b)
}

/// Stream tags used with [`derive_seed`] to separate the draws of one run.
pub mod stream {
    pub const GRAPH: u64 = 0x6772_6170_68;
    pub const ALGORITHM: u64 = 0x616c_676f;
}

#[derive(Clone, Debug)]
pub struct SbmRng {
    inner: ChaCha8Rng,
    spare_gaussian: Option<f64>,
}

impl SbmRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
            spare_gaussian: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `(0, 1]`.
    pub fn uniform_open0(&mut self) -> f64 {
        1.0 - self.uniform()
    }

    /// Uniform integer in `[0, bound)`.
    pub fn below(&mut self, bound: u64) -> u64 {
        self.inner.gen_range(0..bound)
    }

    /// Standard normal draw via Box–Muller; the second value of each pair is cached.
    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare_gaussian.take() {
            return z;
        }
        let u1 = self.uniform_open0();
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.spare_gaussian = Some(radius * angle.sin());
        radius * angle.cos()
    }

    pub fn gaussian_vec(&mut self, len: usize) -> Vec<f64> {
        (0..len).map(|_| self.gaussian()).collect()
    }

    /// Number of failures before the first success of a Bernoulli(`p`) sequence.
    ///
    /// `p` must lie in `(0, 1)`; callers handle the endpoints.
    pub fn geometric_skip(&mut self, log_one_minus_p: f64) -> u64 {
        let u = self.uniform_open0();
        let k = (u.ln() / log_one_minus_p).floor();
        if k >= u64::MAX as f64 {
            u64::MAX
        } else {
            k as u64
        }
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}
