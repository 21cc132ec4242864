//! Seeded random streams.
//!
//! Every random quantity in the crate is drawn from ChaCha8 (a counter-based
//! generator) keyed by a 64-bit seed, with an independent 64-bit stream id per
//! consumer (one per Monte-Carlo trial, one per jittered sequence). Parallel
//! trials therefore reproduce bit for bit regardless of scheduling.
//!
//! Derived variates use fixed bit recipes so other implementations can
//! reproduce them from the raw `u64` stream:
//!
//! * unit uniform: `(x >> 11) * 2^-53`, in `[0, 1)`
//! * Rademacher sign: `+1` if the top bit of `x` is set, `-1` otherwise

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct StreamRng {
    inner: ChaCha8Rng,
}

impl StreamRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn rademacher(&mut self) -> f64 {
        if self.next_u64() >> 63 == 1 {
            1.0
        } else {
            -1.0
        }
    }

    /// Complex number with modulus uniform in `[0, max_modulus)` and uniform phase.
    pub fn complex(&mut self, max_modulus: f64) -> Complex64 {
        let r = self.uniform(0.0, max_modulus);
        let theta = self.uniform(0.0, std::f64::consts::TAU);
        Complex64::from_polar(r, theta)
    }

    /// Standard complex Gaussian with independent real and imaginary parts (Box-Muller).
    pub fn complex_gaussian(&mut self) -> Complex64 {
        let u1 = 1.0 - self.unit();
        let u2 = self.unit();
        let r = (-2.0 * u1.ln()).sqrt();
        Complex64::from_polar(r, std::f64::consts::TAU * u2)
    }
}
