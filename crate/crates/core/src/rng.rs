//! Seeded random-number contract.
//!
//! Every stochastic component in the crate draws from a [`SeededRng`]: a
//! ChaCha8 stream cipher (counter-based, platform-independent) keyed by
//! expanding a 64-bit seed through SplitMix64. Substreams for a given
//! (trial, epoch, purpose) triple are derived by hashing the master seed
//! with the triple, so independent parts of an experiment get independent,
//! reproducible streams — and two consumers that must see *identical*
//! draws (the optimized and control networks during homeostasis) simply
//! derive the same substream twice.
//!
//! All distributions are built from the raw uniform stream inside this
//! module (Box–Muller for normals, inversion for Poisson) so the draw
//! sequence is part of this crate's contract rather than an upstream
//! library's.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Identifier of the generator backing [`SeededRng`], for provenance records.
pub const ALGORITHM: &str = "chacha8/splitmix64-keyed";

/// The role a derived substream plays in an experiment.
///
/// Tags feed the substream hash; renumbering them changes every derived
/// stream, so variants must keep their discriminants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamPurpose {
    NeuronClasses = 1,
    RefWeights = 2,
    NaiveWeights = 3,
    Currents = 4,
    LocalDelta = 5,
    ControlRelocation = 6,
    Homeostasis = 7,
    PifBuild = 8,
    PifDrive = 9,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn mix(parts: &[u64]) -> u64 {
    let mut h = 0x243F_6A88_85A3_08D3; // pi fractional bits, arbitrary fixed offset
    for &p in parts {
        h = splitmix64(h ^ p);
    }
    h
}

/// Deterministic random generator with a documented cross-platform stream.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    /// Build a generator from a 64-bit seed. Equal seeds yield equal streams
    /// on every platform.
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        let mut s = seed;
        for chunk in key.chunks_exact_mut(8) {
            s = splitmix64(s);
            chunk.copy_from_slice(&s.to_le_bytes());
        }
        SeededRng { seed, inner: ChaCha8Rng::from_seed(key) }
    }

    /// Derive the substream for `(trial, epoch, purpose)` under `master`.
    ///
    /// Purposes without an epoch component (weight initialization, input
    /// currents) pass `epoch = 0`.
    pub fn substream(master: u64, trial: u64, epoch: u64, purpose: StreamPurpose) -> Self {
        Self::new(mix(&[master, trial, epoch, purpose as u64]))
    }

    /// The seed this generator was constructed with.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `[lo, hi)`.
    #[inline]
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Normal draw via Box–Muller (cosine branch; two uniforms per call).
    pub fn normal(&mut self, mean: f64, sd: f64) -> f64 {
        let u1 = 1.0 - self.uniform(); // (0, 1], keeps ln finite
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        mean + sd * r * (std::f64::consts::TAU * u2).cos()
    }

    /// Poisson draw by CDF inversion. Intended for small means (the
    /// simulators use mean 1).
    pub fn poisson(&mut self, mean: f64) -> u64 {
        let u = self.uniform();
        let mut k = 0u64;
        let mut p = (-mean).exp();
        let mut cdf = p;
        while u >= cdf {
            k += 1;
            p *= mean / k as f64;
            cdf += p;
            if k > 1_000_000 {
                break; // unreachable for the means used here
            }
        }
        k
    }

    /// Uniform index in `[0, n)` by rejection (no modulo bias).
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "index range must be non-empty");
        let n = n as u64;
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let x = self.next_u64();
            if x < zone {
                return (x % n) as usize;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_seeds_equal_streams() {
        let mut a = SeededRng::new(0xDEAD_BEEF);
        let mut b = SeededRng::new(0xDEAD_BEEF);
        for _ in 0..1_000_000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn different_purposes_differ() {
        let mut a = SeededRng::substream(1, 2, 3, StreamPurpose::LocalDelta);
        let mut b = SeededRng::substream(1, 2, 3, StreamPurpose::Homeostasis);
        let same = (0..16).all(|_| a.next_u64() == b.next_u64());
        assert!(!same);
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut rng = SeededRng::new(7);
        for _ in 0..10_000 {
            let u = rng.uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn normal_zero_sd_is_mean() {
        let mut rng = SeededRng::new(7);
        for _ in 0..100 {
            assert_eq!(rng.normal(2.5, 0.0), 2.5);
        }
    }

    #[test]
    fn normal_moments() {
        let mut rng = SeededRng::new(11);
        let n = 200_000;
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in 0..n {
            let x = rng.normal(1.0, 2.0);
            sum += x;
            sq += x * x;
        }
        let mean = sum / n as f64;
        let var = sq / n as f64 - mean * mean;
        assert!((mean - 1.0).abs() < 0.02, "mean {mean}");
        assert!((var - 4.0).abs() < 0.08, "var {var}");
    }

    #[test]
    fn poisson_unit_mean_moments() {
        let mut rng = SeededRng::new(13);
        let n = 200_000;
        let mut sum = 0u64;
        let mut sq = 0u64;
        for _ in 0..n {
            let k = rng.poisson(1.0);
            sum += k;
            sq += k * k;
        }
        let mean = sum as f64 / n as f64;
        let var = sq as f64 / n as f64 - mean * mean;
        assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn index_in_range_and_covers() {
        let mut rng = SeededRng::new(3);
        let mut seen = [false; 7];
        for _ in 0..1000 {
            seen[rng.index(7)] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }
}
