//! Deterministic pseudo-random numbers for reproducible trials.
//!
//! A single 64-bit seed plus a stream index fully determine every draw, so
//! Monte-Carlo trials can run in any order (or concurrently) and still
//! reproduce bit-identical results. The generator is xoshiro256** seeded
//! through SplitMix64; streams are derived by mixing the seed with the
//! stream index before expansion.

use crate::scalar::{Scalar, C};

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mix a base seed with a stream index into an independent sub-seed.
///
/// Used for counter-based splitting: trial `k` of a run seeded with `s`
/// always draws from `derive_stream(s, k)` no matter which worker runs it.
pub fn derive_stream(seed: u64, stream: u64) -> u64 {
    let mut state = seed ^ stream.wrapping_mul(GOLDEN);
    let a = splitmix64(&mut state);
    let b = splitmix64(&mut state);
    a ^ b.rotate_left(32)
}

/// xoshiro256** generator.
#[derive(Debug, Clone)]
pub struct Rng {
    s: [u64; 4],
}

impl Rng {
    /// Expand a 64-bit seed into the 256-bit state with SplitMix64.
    pub fn new(seed: u64) -> Self {
        let mut state = seed;
        let mut s = [0u64; 4];
        for slot in &mut s {
            *slot = splitmix64(&mut state);
        }
        Rng { s }
    }

    /// Generator for stream `stream` of a run seeded with `seed`.
    pub fn from_stream(seed: u64, stream: u64) -> Self {
        Rng::new(derive_stream(seed, stream))
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = (self.s[1].wrapping_mul(5)).rotate_left(7).wrapping_mul(9);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_unit<T: Scalar>(&mut self) -> T {
        T::from_f64_lit((self.next_u64() >> 11) as f64 / (1u64 << 53) as f64)
    }

    /// Uniform angle in `(0, 2π]`.
    pub fn next_angle<T: Scalar>(&mut self) -> T {
        let u: T = self.next_unit();
        (T::one() - u) * T::from_f64_lit(2.0) * T::PI()
    }

    /// Standard normal pair via Box-Muller.
    pub fn next_gaussian_pair<T: Scalar>(&mut self) -> (T, T) {
        loop {
            let u1: T = self.next_unit();
            let u2: T = self.next_unit();
            if u1 > T::from_f64_lit(1e-300) {
                let r = (-(T::one() + T::one()) * u1.ln()).sqrt();
                let phi = T::from_f64_lit(2.0) * T::PI() * u2;
                return (r * phi.cos(), r * phi.sin());
            }
        }
    }

    /// Standard circularly-symmetric complex Gaussian, `E|z|² = 1`.
    pub fn next_cn01<T: Scalar>(&mut self) -> C<T> {
        let (re, im) = self.next_gaussian_pair::<T>();
        let half = T::from_f64_lit(0.5);
        C::new(re * half.sqrt(), im * half.sqrt())
    }

    /// Zero-mean Laplacian with the given standard deviation
    /// (scale = std/√2), by inverse-CDF sampling.
    pub fn next_laplacian<T: Scalar>(&mut self, std_dev: T) -> T {
        let scale = std_dev / T::from_f64_lit(2.0).sqrt();
        let u: T = self.next_unit::<T>() - T::from_f64_lit(0.5);
        let mag = -(T::one() - (u.abs() + u.abs())).ln() * scale;
        if u < T::zero() {
            -mag
        } else {
            mag
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sequence() {
        let mut a = Rng::new(42);
        let mut b = Rng::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn streams_are_order_independent() {
        let direct = Rng::from_stream(7, 3).next_u64();
        // Drawing from other streams first must not change stream 3.
        let _ = Rng::from_stream(7, 0).next_u64();
        let _ = Rng::from_stream(7, 1).next_u64();
        assert_eq!(Rng::from_stream(7, 3).next_u64(), direct);
        assert_ne!(
            Rng::from_stream(7, 3).next_u64(),
            Rng::from_stream(7, 4).next_u64()
        );
    }

    #[test]
    fn unit_draws_stay_in_range() {
        let mut rng = Rng::new(1);
        for _ in 0..10_000 {
            let u: f64 = rng.next_unit();
            assert!((0.0..1.0).contains(&u));
            let a: f64 = rng.next_angle();
            assert!(a > 0.0 && a <= 2.0 * std::f64::consts::PI);
        }
    }

    #[test]
    fn gaussian_moments() {
        let mut rng = Rng::new(9);
        let n = 200_000;
        let mut sum = 0.0f64;
        let mut sum_sq = 0.0f64;
        for _ in 0..n {
            let (a, b) = rng.next_gaussian_pair::<f64>();
            sum += a + b;
            sum_sq += a * a + b * b;
        }
        let mean = sum / (2.0 * n as f64);
        let var = sum_sq / (2.0 * n as f64);
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn laplacian_variance_matches_std() {
        let mut rng = Rng::new(11);
        let std_dev = 0.13f64; // 7.5 degrees in radians, roughly
        let n = 200_000;
        let mut sum_sq = 0.0f64;
        for _ in 0..n {
            let x = rng.next_laplacian(std_dev);
            sum_sq += x * x;
        }
        let var = sum_sq / n as f64;
        assert!((var - std_dev * std_dev).abs() < 0.002, "var {var}");
    }

    #[test]
    fn complex_gaussian_unit_power() {
        let mut rng = Rng::new(5);
        let n = 100_000;
        let mut sum = 0.0f64;
        for _ in 0..n {
            sum += rng.next_cn01::<f64>().norm_sqr();
        }
        assert!((sum / n as f64 - 1.0).abs() < 0.02);
    }
}
