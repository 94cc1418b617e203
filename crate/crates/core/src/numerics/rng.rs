//! Seeded, splittable random streams.
//!
//! Every stream is a ChaCha12 generator (a counter-based stream cipher RNG)
//! keyed by a 64-bit seed. Child streams are derived from the parent's seed
//! and a label via a SplitMix64 hash, so components (data generation,
//! initialisation, user sampling, hop sampling, ...) consume independent
//! streams and adding draws to one never perturbs another.

use rand::distributions::Uniform;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha12Rng,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

fn hash_label(label: &str) -> u64 {
    // FNV-1a
    let mut h: u64 = 0xcbf29ce484222325;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

impl RngStream {
    pub fn seed_from(seed: u64) -> Self {
        RngStream {
            seed,
            inner: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Derive an independent child stream. The child depends only on this
    /// stream's seed and the label, never on how much the parent has drawn.
    pub fn split(&self, label: &str) -> RngStream {
        RngStream::seed_from(splitmix64(self.seed ^ hash_label(label)))
    }

    /// Like [`split`](Self::split) with an index folded in, for per-run or
    /// per-worker streams.
    pub fn split_indexed(&self, label: &str, index: u64) -> RngStream {
        RngStream::seed_from(splitmix64(
            self.seed ^ hash_label(label) ^ splitmix64(index),
        ))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.gen()
    }

    /// Uniform in [0, 1).
    pub fn uniform_f64(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    /// Uniform in [0, n). Panics if n = 0.
    pub fn uniform_usize(&mut self, n: usize) -> usize {
        assert!(n > 0, "uniform_usize: empty range");
        self.inner.sample(Uniform::new(0, n))
    }

    pub fn normal(&mut self, mean: f64, std_dev: f64) -> f64 {
        Normal::new(mean, std_dev)
            .expect("normal: invalid std dev")
            .sample(&mut self.inner)
    }

    /// Poisson draw; lambda = 0 always yields 0.
    pub fn poisson(&mut self, lambda: f64) -> u64 {
        if lambda == 0.0 {
            return 0;
        }
        Poisson::new(lambda)
            .expect("poisson: invalid lambda")
            .sample(&mut self.inner) as u64
    }

    pub fn shuffle<T>(&mut self, slice: &mut [T]) {
        // Fisher-Yates
        for i in (1..slice.len()).rev() {
            let j = self.uniform_usize(i + 1);
            slice.swap(i, j);
        }
    }

    /// Uniform sample of `k` distinct indices from `0..n`, returned in
    /// ascending order (partial Fisher-Yates, then sort).
    pub fn sample_without_replacement(&mut self, n: usize, k: usize) -> Result<Vec<usize>> {
        if k > n {
            return Err(Error::invalid(format!(
                "sample_without_replacement: k={k} exceeds pool {n}"
            )));
        }
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.uniform_usize(n - i);
            pool.swap(i, j);
        }
        let mut picked = pool[..k].to_vec();
        picked.sort_unstable();
        Ok(picked)
    }
}
