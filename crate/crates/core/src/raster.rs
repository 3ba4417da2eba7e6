//! Binary spike rasters.

use crate::error::{Error, Result};

/// A binary spike matrix: `n_neurons` rows by `n_steps` timestep columns.
///
/// Rasters are the currency between the simulators, the trainer, and the
/// analysis code. Dimensions are fixed at construction; entries are set by
/// the builders and simulators and never unset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    n_neurons: usize,
    n_steps: usize,
    spikes: Vec<bool>, // row-major: [neuron * n_steps + step]
}

impl Raster {
    /// All-zero raster. Both dimensions must be positive.
    pub fn zeros(n_neurons: usize, n_steps: usize) -> Result<Self> {
        if n_neurons == 0 {
            return Err(Error::InvalidParam { name: "n_neurons", reason: "must be positive".into() });
        }
        if n_steps == 0 {
            return Err(Error::InvalidParam { name: "n_steps", reason: "must be positive".into() });
        }
        Ok(Raster { n_neurons, n_steps, spikes: vec![false; n_neurons * n_steps] })
    }

    /// Build from a list of `(neuron, timestep)` coordinates. Duplicates
    /// collapse; out-of-range coordinates are rejected.
    pub fn from_spike_times(
        times: &[(usize, usize)],
        n_neurons: usize,
        n_steps: usize,
    ) -> Result<Self> {
        let mut r = Self::zeros(n_neurons, n_steps)?;
        for &(neuron, step) in times {
            if neuron >= n_neurons {
                return Err(Error::IndexOutOfRange { what: "neuron", index: neuron, limit: n_neurons });
            }
            if step >= n_steps {
                return Err(Error::IndexOutOfRange { what: "timestep", index: step, limit: n_steps });
            }
            r.spikes[neuron * n_steps + step] = true;
        }
        Ok(r)
    }

    pub fn n_neurons(&self) -> usize {
        self.n_neurons
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    #[inline]
    pub fn spike(&self, neuron: usize, step: usize) -> bool {
        self.spikes[neuron * self.n_steps + step]
    }

    /// Mark a spike. Used by the simulators while filling a raster.
    #[inline]
    pub fn set_spike(&mut self, neuron: usize, step: usize) {
        self.spikes[neuron * self.n_steps + step] = true;
    }

    /// Whether any neuron spiked in `[lo, hi]` (inclusive window, clamped).
    #[inline]
    pub fn spiked_in_window(&self, neuron: usize, lo: usize, hi: usize) -> bool {
        let hi = hi.min(self.n_steps - 1);
        let row = &self.spikes[neuron * self.n_steps..(neuron + 1) * self.n_steps];
        row[lo..=hi].iter().any(|&s| s)
    }

    /// Ascending spike times of one neuron.
    pub fn spike_times(&self, neuron: usize) -> Vec<usize> {
        let row = &self.spikes[neuron * self.n_steps..(neuron + 1) * self.n_steps];
        row.iter().enumerate().filter(|(_, &s)| s).map(|(t, _)| t).collect()
    }

    pub fn spike_count(&self, neuron: usize) -> usize {
        let row = &self.spikes[neuron * self.n_steps..(neuron + 1) * self.n_steps];
        row.iter().filter(|&&s| s).count()
    }

    pub fn total_spikes(&self) -> usize {
        self.spikes.iter().filter(|&&s| s).count()
    }

    pub fn per_neuron_counts(&self) -> Vec<usize> {
        (0..self.n_neurons).map(|i| self.spike_count(i)).collect()
    }

    /// Summed network spiking per timestep.
    pub fn summed_per_step(&self) -> Vec<u32> {
        let mut f = vec![0u32; self.n_steps];
        for i in 0..self.n_neurons {
            let row = &self.spikes[i * self.n_steps..(i + 1) * self.n_steps];
            for (t, &s) in row.iter().enumerate() {
                if s {
                    f[t] += 1;
                }
            }
        }
        f
    }

    /// Time-slice `[lo, hi)` as a new raster.
    pub fn time_slice(&self, lo: usize, hi: usize) -> Result<Self> {
        if lo >= hi || hi > self.n_steps {
            return Err(Error::InvalidParam {
                name: "time_slice",
                reason: format!("range {lo}..{hi} invalid for {} steps", self.n_steps),
            });
        }
        let mut out = Self::zeros(self.n_neurons, hi - lo)?;
        for i in 0..self.n_neurons {
            let src = &self.spikes[i * self.n_steps + lo..i * self.n_steps + hi];
            out.spikes[i * (hi - lo)..(i + 1) * (hi - lo)].copy_from_slice(src);
        }
        Ok(out)
    }

    /// Concatenate rasters along time. All parts must share `n_neurons`.
    pub fn concat_time(parts: &[Raster]) -> Result<Self> {
        let first = parts.first().ok_or(Error::InvalidParam {
            name: "parts",
            reason: "cannot concatenate zero rasters".into(),
        })?;
        let n = first.n_neurons;
        let total: usize = parts.iter().map(|r| r.n_steps).sum();
        let mut out = Self::zeros(n, total)?;
        let mut offset = 0;
        for r in parts {
            if r.n_neurons != n {
                return Err(Error::ShapeMismatch {
                    expected: format!("{n} neurons"),
                    found: format!("{} neurons", r.n_neurons),
                });
            }
            for i in 0..n {
                let src = &r.spikes[i * r.n_steps..(i + 1) * r.n_steps];
                out.spikes[i * total + offset..i * total + offset + r.n_steps].copy_from_slice(src);
            }
            offset += r.n_steps;
        }
        Ok(out)
    }
}
