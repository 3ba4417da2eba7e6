//! Avalanche segmentation and power-law criticality statistics.
//!
//! Summed network spiking `F(t)` is thresholded at a percentile of its own
//! values (nearest-rank); an avalanche is a maximal run of timesteps with
//! `F(t)` strictly above the threshold. Sizes follow `P(S) ~ S^-tau` and
//! durations `P(D) ~ D^-alpha` near criticality, and the crackling-noise
//! relation predicts `beta = (alpha - 1)/(tau - 1)` for the scaling of
//! mean size with duration.

use crate::error::{Error, Result};
use crate::raster::Raster;

/// One contiguous above-threshold run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Avalanche {
    /// Total spikes over the run.
    pub size: u64,
    /// Run length in timesteps.
    pub duration: usize,
}

/// All avalanches of one raster plus the threshold that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct AvalancheSet {
    pub events: Vec<Avalanche>,
    pub threshold: u32,
}

impl AvalancheSet {
    pub fn sizes(&self) -> Vec<u64> {
        self.events.iter().map(|a| a.size).collect()
    }

    pub fn durations(&self) -> Vec<u64> {
        self.events.iter().map(|a| a.duration as u64).collect()
    }
}

/// Nearest-rank percentile of a sample.
fn nearest_rank(sorted: &[u32], percentile: f64) -> u32 {
    let n = sorted.len();
    let rank = ((percentile / 100.0) * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

/// Segment a raster into avalanches at the given percentile of summed
/// activity (the reference analysis uses the 20th).
///
/// "Exceeds" is strict: timesteps with `F(t)` equal to the threshold end a
/// run. A constant `F` therefore yields no avalanches.
pub fn segment_avalanches(raster: &Raster, percentile: f64) -> Result<AvalancheSet> {
    if !(0.0..=100.0).contains(&percentile) {
        return Err(Error::InvalidParam {
            name: "percentile",
            reason: format!("{percentile} outside [0, 100]"),
        });
    }
    let f = raster.summed_per_step();
    let mut sorted = f.clone();
    sorted.sort_unstable();
    let threshold = nearest_rank(&sorted, percentile);

    let mut events = Vec::new();
    let mut run_size = 0u64;
    let mut run_len = 0usize;
    for &ft in &f {
        if ft > threshold {
            run_size += ft as u64;
            run_len += 1;
        } else if run_len > 0 {
            events.push(Avalanche { size: run_size, duration: run_len });
            run_size = 0;
            run_len = 0;
        }
    }
    if run_len > 0 {
        events.push(Avalanche { size: run_size, duration: run_len });
    }
    Ok(AvalancheSet { events, threshold })
}

/// Hurwitz-style zeta `sum_{k >= xmin} k^-s`, direct summation with an
/// integral tail correction.
fn zeta_from(s: f64, xmin: u64) -> f64 {
    const CUTOFF: u64 = 20_000;
    let mut sum = 0.0;
    for k in xmin..=CUTOFF {
        sum += (k as f64).powf(-s);
    }
    sum + (CUTOFF as f64 + 0.5).powf(1.0 - s) / (s - 1.0)
}

pub const MIN_FIT_SAMPLES: usize = 50;

/// Discrete power-law exponent by maximum likelihood.
///
/// Maximizes `-n ln zeta(tau, xmin) - tau sum ln x` by golden-section
/// search over `tau in (1, 20]`, resolved to 1e-4 or better. Degenerate
/// samples (zero variance) and fits that run into the upper bracket are
/// reported as failures.
pub fn fit_power_law_mle(samples: &[u64], xmin: u64) -> Result<f64> {
    let xs: Vec<u64> = samples.iter().copied().filter(|&x| x >= xmin).collect();
    if xs.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples { needed: MIN_FIT_SAMPLES, got: xs.len() });
    }
    if xs.iter().all(|&x| x == xs[0]) {
        return Err(Error::FitDiverged { reason: "all samples equal".into() });
    }
    let n = xs.len() as f64;
    let sum_ln: f64 = xs.iter().map(|&x| (x as f64).ln()).sum();
    let log_lik = |tau: f64| -n * zeta_from(tau, xmin).ln() - tau * sum_ln;

    // golden-section search on a concave objective
    let (mut lo, mut hi) = (1.000_1f64, 20.0f64);
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - phi * (hi - lo);
    let mut b = lo + phi * (hi - lo);
    let mut fa = log_lik(a);
    let mut fb = log_lik(b);
    while hi - lo > 1e-6 {
        if fa > fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = log_lik(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = log_lik(b);
        }
    }
    let tau = 0.5 * (lo + hi);
    if tau > 19.9 {
        return Err(Error::FitDiverged { reason: format!("estimate {tau} at search bound") });
    }
    Ok(tau)
}

/// Power-law exponent by least-squares regression of the log histogram
/// (unit bins, zero bins dropped). The negated slope estimates the
/// exponent.
pub fn fit_power_law_regression(samples: &[u64], xmin: u64) -> Result<f64> {
    let xs: Vec<u64> = samples.iter().copied().filter(|&x| x >= xmin).collect();
    if xs.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples { needed: MIN_FIT_SAMPLES, got: xs.len() });
    }
    let max = *xs.iter().max().unwrap();
    let mut counts = vec![0u64; (max - xmin + 1) as usize];
    for &x in &xs {
        counts[(x - xmin) as usize] += 1;
    }
    let points: Vec<(f64, f64)> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| (((i as u64 + xmin) as f64).ln(), (c as f64).ln()))
        .collect();
    if points.len() < 2 {
        return Err(Error::FitDiverged { reason: "fewer than two occupied bins".into() });
    }
    let (slope, _) = least_squares(&points);
    Ok(-slope)
}

/// Least-squares slope and intercept of `(x, y)` points.
fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    (slope, (sy - slope * sx) / n)
}

/// Mean avalanche size per duration, for durations with at least
/// `min_count` avalanches. Returns `(duration, mean_size, count)` ascending.
pub fn mean_size_by_duration(set: &AvalancheSet, min_count: usize) -> Vec<(usize, f64, usize)> {
    use std::collections::BTreeMap;
    let mut by_dur: BTreeMap<usize, (u64, usize)> = BTreeMap::new();
    for a in &set.events {
        let e = by_dur.entry(a.duration).or_insert((0, 0));
        e.0 += a.size;
        e.1 += 1;
    }
    by_dur
        .into_iter()
        .filter(|(_, (_, c))| *c >= min_count)
        .map(|(d, (s, c))| (d, s as f64 / c as f64, c))
        .collect()
}

/// Fitted criticality exponents for one avalanche set.
///
/// `tau` and `alpha` are the maximum-likelihood size and duration
/// exponents (`tau_regression` / `alpha_regression` carry the log-log
/// regression variants); `beta_pred = (alpha - 1)/(tau - 1)` by
/// construction, and `beta_obs` is the regression slope of log mean size
/// against log duration over durations with at least three avalanches.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct AvalancheFit {
    pub tau: f64,
    pub alpha: f64,
    pub tau_regression: f64,
    pub alpha_regression: f64,
    pub beta_pred: f64,
    pub beta_obs: f64,
    pub n_avalanches: usize,
}

pub fn fit_beta(set: &AvalancheSet) -> Result<AvalancheFit> {
    if set.events.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples { needed: MIN_FIT_SAMPLES, got: set.events.len() });
    }
    let durations = set.durations();
    let distinct = {
        let mut d = durations.clone();
        d.sort_unstable();
        d.dedup();
        d.len()
    };
    if distinct < 5 {
        return Err(Error::FitDiverged { reason: format!("only {distinct} distinct durations") });
    }
    let sizes = set.sizes();
    let tau = fit_power_law_mle(&sizes, 1)?;
    let alpha = fit_power_law_mle(&durations, 1)?;
    let tau_regression = fit_power_law_regression(&sizes, 1)?;
    let alpha_regression = fit_power_law_regression(&durations, 1)?;
    if tau <= 1.0 + 1e-3 {
        return Err(Error::FitDiverged { reason: format!("tau {tau} too close to 1") });
    }
    let beta_pred = (alpha - 1.0) / (tau - 1.0);

    let pts: Vec<(f64, f64)> = mean_size_by_duration(set, 3)
        .into_iter()
        .map(|(d, s, _)| ((d as f64).ln(), s.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::FitDiverged { reason: "too few duration bins for beta_obs".into() });
    }
    let (beta_obs, _) = least_squares(&pts);

    Ok(AvalancheFit {
        tau,
        alpha,
        tau_regression,
        alpha_regression,
        beta_pred,
        beta_obs,
        n_avalanches: set.events.len(),
    })
}

/// Survival function `P(X >= x)` over the distinct values of a sample, for
/// log-log plotting.
pub fn survival(samples: &[u64]) -> Vec<(u64, f64)> {
    let mut xs = samples.to_vec();
    xs.sort_unstable();
    let n = xs.len() as f64;
    let mut out = Vec::new();
    let mut i = 0;
    while i < xs.len() {
        let v = xs[i];
        out.push((v, (xs.len() - i) as f64 / n));
        while i < xs.len() && xs[i] == v {
            i += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed_segmentation() {
        // F = [0,0,3,4,0,2,0]; sorted [0,0,0,0,2,3,4]; 20th percentile
        // nearest-rank = 0, so runs above 0 are [3,4] and [2]
        let mut spikes = Vec::new();
        for (t, &count) in [0usize, 0, 3, 4, 0, 2, 0].iter().enumerate() {
            for i in 0..count {
                spikes.push((i, t));
            }
        }
        let r = Raster::from_spike_times(&spikes, 4, 7).unwrap();
        let set = segment_avalanches(&r, 20.0).unwrap();
        assert_eq!(set.threshold, 0);
        assert_eq!(
            set.events,
            vec![Avalanche { size: 7, duration: 2 }, Avalanche { size: 2, duration: 1 }]
        );
    }

    #[test]
    fn all_zero_raster_has_no_avalanches() {
        let r = Raster::zeros(3, 50).unwrap();
        let set = segment_avalanches(&r, 20.0).unwrap();
        assert!(set.events.is_empty());
    }

    #[test]
    fn constant_activity_has_no_avalanches() {
        // F constant: never strictly above its own percentile
        let spikes: Vec<(usize, usize)> = (0..50).map(|t| (0, t)).collect();
        let r = Raster::from_spike_times(&spikes, 2, 50).unwrap();
        let set = segment_avalanches(&r, 20.0).unwrap();
        assert!(set.events.is_empty());
    }

    #[test]
    fn segmentation_partitions_above_threshold_steps() {
        let mut spikes = Vec::new();
        let pattern = [0, 1, 5, 2, 0, 0, 3, 3, 1, 0, 7, 0];
        for (t, &count) in pattern.iter().enumerate() {
            for i in 0..count {
                spikes.push((i, t));
            }
        }
        let r = Raster::from_spike_times(&spikes, 8, pattern.len()).unwrap();
        let set = segment_avalanches(&r, 20.0).unwrap();
        let f = r.summed_per_step();
        let above = f.iter().filter(|&&v| v > set.threshold).count();
        let covered: usize = set.events.iter().map(|a| a.duration).sum();
        assert_eq!(above, covered);
    }

    #[test]
    fn beta_identity_matches_reported_instance() {
        let beta: f64 = (1.327 - 1.0) / (1.242 - 1.0);
        assert!((beta - 1.351).abs() < 5e-4, "{beta}");
    }

    #[test]
    fn degenerate_sample_flagged() {
        let samples = vec![3u64; 100];
        assert!(matches!(fit_power_law_mle(&samples, 1), Err(Error::FitDiverged { .. })));
    }

    #[test]
    fn too_few_samples_reports_count() {
        let samples = vec![1u64, 2, 3];
        assert_eq!(
            fit_power_law_mle(&samples, 1).unwrap_err(),
            Error::TooFewSamples { needed: 50, got: 3 }
        );
    }

    #[test]
    fn exact_power_relation_recovers_slope() {
        // deterministic S = D^1.5 over duration bins
        let mut events = Vec::new();
        for d in 1..=40usize {
            let s = ((d as f64).powf(1.5)).round() as u64;
            for _ in 0..3 {
                events.push(Avalanche { size: s.max(1), duration: d });
            }
        }
        let set = AvalancheSet { events, threshold: 0 };
        let pts: Vec<(f64, f64)> = mean_size_by_duration(&set, 3)
            .into_iter()
            .map(|(d, s, _)| ((d as f64).ln(), s.ln()))
            .collect();
        let (slope, _) = least_squares(&pts);
        assert!((slope - 1.5).abs() < 0.01, "slope {slope}");
    }

    #[test]
    fn survival_is_monotone_and_starts_at_one() {
        let s = survival(&[1, 1, 2, 5, 5, 9]);
        assert_eq!(s[0], (1, 1.0));
        for w in s.windows(2) {
            assert!(w[1].1 < w[0].1);
        }
    }

    #[test]
    fn mle_consistency_improves_with_sample_size() {
        // inverse-CDF sampler over a finite support, tau = 1.8
        let tau = 1.8;
        let cutoff = 200_000u64;
        let mut cdf = Vec::with_capacity(cutoff as usize);
        let mut acc = 0.0;
        for k in 1..=cutoff {
            acc += (k as f64).powf(-tau);
            cdf.push(acc);
        }
        let total = acc;
        let mut rng = crate::rng::SeededRng::new(77);
        let mut draw = |n: usize| -> Vec<u64> {
            (0..n)
                .map(|_| {
                    let u = rng.uniform() * total;
                    (cdf.partition_point(|&c| c < u) + 1) as u64
                })
                .collect()
        };
        let small = fit_power_law_mle(&draw(1_000), 1).unwrap();
        let large = fit_power_law_mle(&draw(100_000), 1).unwrap();
        assert!((large - tau).abs() <= (small - tau).abs() + 0.02, "small {small} large {large}");
        assert!((large - tau).abs() < 0.05, "large-sample estimate {large}");
    }
}
