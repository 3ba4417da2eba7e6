//! Spike-train similarity measures and summary statistics.
//!
//! Activity signals are binary trains convolved with a symmetric Gaussian
//! kernel `K(t) = exp(-t^2 / (2 sigma^2))`, truncated at `|t| <= ceil(6
//! sigma)` (relative truncation error below 1e-7). Outside `[0, T)` the
//! train is treated as zero; no edge renormalization is applied. Distances
//! are discrete sums of squared signal differences — a per-timestep sum
//! with no dt factor, so values are in timestep units.

use crate::error::{Error, Result};
use crate::raster::Raster;
use crate::weights::WeightMatrix;

/// Kernel standard deviation used throughout: 5*sqrt(2) timesteps.
pub fn default_kernel_sigma() -> f64 {
    5.0 * std::f64::consts::SQRT_2
}

fn kernel(sigma: f64) -> Vec<f64> {
    let radius = (6.0 * sigma).ceil() as i64;
    (-radius..=radius)
        .map(|dt| (-(dt as f64).powi(2) / (2.0 * sigma * sigma)).exp())
        .collect()
}

/// Gaussian activity signal of one spike train over `n_steps` timesteps.
pub fn activity_signal(spike_times: &[usize], n_steps: usize, sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParam { name: "sigma", reason: format!("{sigma} not positive") });
    }
    let k = kernel(sigma);
    let radius = (k.len() / 2) as i64;
    let mut signal = vec![0.0; n_steps];
    for &s in spike_times {
        let s = s as i64;
        for (off, kv) in k.iter().enumerate() {
            let t = s + off as i64 - radius;
            if t >= 0 && (t as usize) < n_steps {
                signal[t as usize] += kv;
            }
        }
    }
    Ok(signal)
}

fn check_shapes(a: &Raster, b: &Raster) -> Result<()> {
    if a.n_neurons() != b.n_neurons() || a.n_steps() != b.n_steps() {
        return Err(Error::ShapeMismatch {
            expected: format!("{}x{}", a.n_neurons(), a.n_steps()),
            found: format!("{}x{}", b.n_neurons(), b.n_steps()),
        });
    }
    Ok(())
}

/// Pairwise distance: per-neuron squared signal differences summed over
/// neurons and time.
pub fn pairwise_distance(a: &Raster, b: &Raster, sigma: f64) -> Result<f64> {
    check_shapes(a, b)?;
    let mut total = 0.0;
    for i in 0..a.n_neurons() {
        let sa = activity_signal(&a.spike_times(i), a.n_steps(), sigma)?;
        let sb = activity_signal(&b.spike_times(i), b.n_steps(), sigma)?;
        total += sa.iter().zip(&sb).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
    }
    Ok(total)
}

/// Aggregate distance: signals summed over neurons first, then squared
/// differences summed over time.
pub fn aggregate_distance(a: &Raster, b: &Raster, sigma: f64) -> Result<f64> {
    check_shapes(a, b)?;
    let mut sum_a = vec![0.0; a.n_steps()];
    let mut sum_b = vec![0.0; b.n_steps()];
    for i in 0..a.n_neurons() {
        for (acc, v) in sum_a.iter_mut().zip(activity_signal(&a.spike_times(i), a.n_steps(), sigma)?) {
            *acc += v;
        }
        for (acc, v) in sum_b.iter_mut().zip(activity_signal(&b.spike_times(i), b.n_steps(), sigma)?) {
            *acc += v;
        }
    }
    Ok(sum_a.iter().zip(&sum_b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Inter-spike intervals per neuron, concatenated in neuron order.
pub fn isi(raster: &Raster) -> Vec<usize> {
    let mut gaps = Vec::new();
    for i in 0..raster.n_neurons() {
        let ts = raster.spike_times(i);
        gaps.extend(ts.windows(2).map(|w| w[1] - w[0]));
    }
    gaps
}

/// Survival function of the Kolmogorov distribution, `2 sum (-1)^(k-1)
/// exp(-2 k^2 x^2)`.
fn kolmogorov_sf(x: f64) -> f64 {
    if x < 1e-8 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64 * x).powi(2)).exp();
        s += if k % 2 == 1 { term } else { -term };
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov–Smirnov test.
///
/// Returns `(statistic, p_value)`: the statistic is the supremum ECDF
/// difference; the p-value comes from the asymptotic Kolmogorov
/// distribution at effective size `n_a * n_b / (n_a + n_b)`.
pub fn ks_two_sample(a: &[usize], b: &[usize]) -> Result<(f64, f64)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: a.len().min(b.len()) });
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_unstable();
    ys.sort_unstable();
    let (n, m) = (xs.len(), ys.len());

    let mut stat: f64 = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while i < n && j < m {
        let v = xs[i].min(ys[j]);
        while i < n && xs[i] == v {
            i += 1;
        }
        while j < m && ys[j] == v {
            j += 1;
        }
        let diff = (i as f64 / n as f64 - j as f64 / m as f64).abs();
        if diff > stat {
            stat = diff;
        }
    }
    // past this point one ECDF is 1 and the other only rises toward 1,
    // so no larger gap can appear

    let effective = (n * m) as f64 / (n + m) as f64;
    let p = kolmogorov_sf(effective.sqrt() * stat);
    Ok((stat, p))
}

/// Mean and population variance of per-neuron spike counts.
pub fn spike_stats(raster: &Raster) -> (f64, f64) {
    let counts = raster.per_neuron_counts();
    let n = counts.len() as f64;
    let mean = counts.iter().sum::<usize>() as f64 / n;
    let var = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

/// Component-wise sum of squared entry differences between weight matrices.
pub fn weight_frobenius(a: &WeightMatrix, b: &WeightMatrix) -> Result<f64> {
    if a.n_neurons() != b.n_neurons() {
        return Err(Error::ShapeMismatch {
            expected: format!("{0}x{0}", a.n_neurons()),
            found: format!("{0}x{0}", b.n_neurons()),
        });
    }
    Ok(a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Euclidean distance between unit-mass ISI histograms binned at
/// `bin_width` over the union support.
pub fn isi_hist_l2(a: &[usize], b: &[usize], bin_width: usize) -> Result<f64> {
    if bin_width == 0 {
        return Err(Error::InvalidParam { name: "bin_width", reason: "must be >= 1".into() });
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: a.len().min(b.len()) });
    }
    let lo = *a.iter().chain(b).min().unwrap();
    let hi = *a.iter().chain(b).max().unwrap();
    let n_bins = (hi - lo) / bin_width + 1;
    let hist = |xs: &[usize]| {
        let mut h = vec![0.0; n_bins];
        for &x in xs {
            h[(x - lo) / bin_width] += 1.0;
        }
        let total = xs.len() as f64;
        for v in &mut h {
            *v /= total;
        }
        h
    };
    let ha = hist(a);
    let hb = hist(b);
    Ok(ha.iter().zip(&hb).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
}
