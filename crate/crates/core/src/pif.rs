//! Probabilistic integrate-and-fire generator tuned to criticality.
//!
//! An all-excitatory random network whose weight matrix is divided by its
//! largest eigenvalue so the spectral radius is 1. State updates are
//!
//! ```text
//! s_i(t+1) = step( sum_j W_ij s_j(t) + I_i(t) - xi_i(t) )
//! ```
//!
//! with `xi ~ U[0,1)`, `I = input_scale * Poisson(input_mean)`, and
//! `step(x) = 1` iff `x >= 0` (a spike on an exact zero argument; a
//! measure-zero event under the continuous noise, fixed for determinism).

use crate::error::{Error, Result};
use crate::raster::Raster;
use crate::rng::SeededRng;

pub const DEFAULT_CONNECTION_PROB: f64 = 0.10;
pub const DEFAULT_WEIGHT_MAX: f64 = 0.02;
pub const DEFAULT_INPUT_MEAN: f64 = 1.0;
pub const DEFAULT_INPUT_SCALE: f64 = 0.001;

/// Nonnegative, dimensionless synaptic weights, indexed `(post, pre)`.
/// Unlike the signed LIF matrix, the diagonal participates: connections are
/// drawn for every ordered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PifNetwork {
    n: usize,
    w: Vec<f64>,
    connection_prob: f64,
    spectral_radius: f64,
}

impl PifNetwork {
    pub fn n_neurons(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, post: usize, pre: usize) -> f64 {
        self.w[post * self.n + pre]
    }

    /// Spectral radius after tuning, re-measured on the divided matrix.
    pub fn spectral_radius(&self) -> f64 {
        self.spectral_radius
    }

    pub fn connection_prob(&self) -> f64 {
        self.connection_prob
    }
}

/// Largest eigenvalue modulus of a nonnegative matrix by power iteration
/// from a uniform positive start. Converges to the spectral radius
/// (dominant eigenvalue real and nonnegative for such matrices); relative
/// tolerance 1e-9.
pub fn power_iteration_radius(w: &[f64], n: usize) -> f64 {
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut u = vec![0.0f64; n];
    let mut lambda_prev = 0.0;
    for _ in 0..100_000 {
        for (i, ui) in u.iter_mut().enumerate() {
            let row = &w[i * n..(i + 1) * n];
            *ui = row.iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return 0.0;
        }
        for (vi, ui) in v.iter_mut().zip(&u) {
            *vi = ui / norm;
        }
        if (norm - lambda_prev).abs() <= 1e-9 * norm.max(1e-300) {
            return norm;
        }
        lambda_prev = norm;
    }
    lambda_prev
}

/// Build a random network and divide every entry by the measured largest
/// eigenvalue modulus. Each ordered pair (including the diagonal) connects
/// independently with probability `p`; connected weights are `U[0,
/// weight_max)`. A draw whose spectral radius is zero is rejected so the
/// caller can retry with the next substream.
pub fn build_pif(rng: &mut SeededRng, n: usize, p: f64, weight_max: f64) -> Result<PifNetwork> {
    if n == 0 {
        return Err(Error::InvalidParam { name: "n_neurons", reason: "must be positive".into() });
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParam { name: "connection_prob", reason: format!("{p} outside (0, 1]") });
    }
    if weight_max < 0.0 {
        return Err(Error::InvalidParam { name: "weight_max", reason: format!("{weight_max} negative") });
    }
    let mut w = vec![0.0f64; n * n];
    for entry in w.iter_mut() {
        if rng.uniform() < p {
            *entry = rng.uniform_in(0.0, weight_max);
        }
    }
    let lambda = power_iteration_radius(&w, n);
    if lambda < 1e-12 {
        return Err(Error::ZeroSpectralRadius);
    }
    for entry in w.iter_mut() {
        *entry /= lambda;
    }
    let tuned = power_iteration_radius(&w, n);
    if (tuned - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidParam {
            name: "spectral_radius",
            reason: format!("post-tuning radius {tuned} not within 1e-6 of 1"),
        });
    }
    Ok(PifNetwork { n, w, connection_prob: p, spectral_radius: tuned })
}

/// Simulate the network from the all-zero state.
///
/// Per step, per neuron (ascending), one Poisson input draw then one
/// uniform threshold draw; that order is part of the stream contract.
pub fn simulate_pif(
    net: &PifNetwork,
    rng: &mut SeededRng,
    n_steps: usize,
    input_mean: f64,
    input_scale: f64,
) -> Result<Raster> {
    if n_steps == 0 {
        return Err(Error::InvalidParam { name: "n_steps", reason: "must be >= 1".into() });
    }
    let n = net.n;
    let mut raster = Raster::zeros(n, n_steps)?;
    let mut prev: Vec<usize> = Vec::new();
    let mut next: Vec<usize> = Vec::new();
    let mut syn = vec![0.0f64; n];

    for t in 1..n_steps {
        syn.fill(0.0);
        for &j in &prev {
            for (i, acc) in syn.iter_mut().enumerate() {
                *acc += net.w[i * n + j];
            }
        }
        next.clear();
        for (i, acc) in syn.iter().enumerate() {
            let input = input_scale * rng.poisson(input_mean) as f64;
            let noise = rng.uniform();
            if acc + input - noise >= 0.0 {
                raster.set_spike(i, t);
                next.push(i);
            }
        }
        std::mem::swap(&mut prev, &mut next);
    }
    Ok(raster)
}

/// Split a raster into equal time chunks. The step count must divide evenly.
pub fn split_raster(raster: &Raster, n_chunks: usize) -> Result<Vec<Raster>> {
    if n_chunks == 0 || raster.n_steps() % n_chunks != 0 {
        return Err(Error::InvalidParam {
            name: "n_chunks",
            reason: format!("{} steps not divisible into {n_chunks} chunks", raster.n_steps()),
        });
    }
    let chunk = raster.n_steps() / n_chunks;
    (0..n_chunks).map(|c| raster.time_slice(c * chunk, (c + 1) * chunk)).collect()
}
