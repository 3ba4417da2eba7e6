//! Signed synaptic weight matrices with per-neuron class labels.

use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Whether a presynaptic neuron excites or inhibits its targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum NeuronClass {
    Excitatory,
    Inhibitory,
}

/// Synaptic strengths in volts, indexed `(post, pre)`.
///
/// Column `j` carries the sign of neuron `j`'s class: excitatory columns are
/// `>= 0`, inhibitory columns `<= 0`, and the diagonal is zero (no
/// self-synapses). Every mutation goes through [`WeightMatrix::apply_delta`],
/// which clips at zero rather than letting an entry change sign.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    n: usize,
    w: Vec<f64>, // row-major: [post * n + pre]
    classes: Vec<NeuronClass>,
}

impl WeightMatrix {
    pub fn zeros(n: usize, classes: Vec<NeuronClass>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParam { name: "n_neurons", reason: "must be positive".into() });
        }
        if classes.len() != n {
            return Err(Error::ShapeMismatch {
                expected: format!("{n} classes"),
                found: format!("{}", classes.len()),
            });
        }
        Ok(WeightMatrix { n, w: vec![0.0; n * n], classes })
    }

    /// Build from raw entries, enforcing the class-sign and zero-diagonal
    /// invariants.
    pub fn from_parts(n: usize, w: Vec<f64>, classes: Vec<NeuronClass>) -> Result<Self> {
        if w.len() != n * n {
            return Err(Error::ShapeMismatch {
                expected: format!("{} entries", n * n),
                found: format!("{}", w.len()),
            });
        }
        let m = WeightMatrix { n, w, classes: classes.clone() };
        if classes.len() != n {
            return Err(Error::ShapeMismatch {
                expected: format!("{n} classes"),
                found: format!("{}", classes.len()),
            });
        }
        m.check_invariants()?;
        Ok(m)
    }

    /// Draw a class vector with `round(n * inhibitory_fraction)` inhibitory
    /// neurons chosen by partial Fisher–Yates shuffle.
    pub fn sample_classes(rng: &mut SeededRng, n: usize, inhibitory_fraction: f64) -> Vec<NeuronClass> {
        let k = ((n as f64) * inhibitory_fraction).round() as usize;
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..k.min(n) {
            let j = i + rng.index(n - i);
            idx.swap(i, j);
        }
        let mut classes = vec![NeuronClass::Excitatory; n];
        for &i in idx.iter().take(k) {
            classes[i] = NeuronClass::Inhibitory;
        }
        classes
    }

    /// Off-diagonal magnitudes `|W| ~ U[lo, hi)` volts, signed by column
    /// class. Draws run row-major; the diagonal consumes no draw.
    pub fn sample_uniform(
        rng: &mut SeededRng,
        n: usize,
        classes: Vec<NeuronClass>,
        lo_v: f64,
        hi_v: f64,
    ) -> Result<Self> {
        Self::sample_with(rng, n, classes, |r| r.uniform_in(lo_v, hi_v))
    }

    /// Off-diagonal magnitudes `|W| ~ N(mean, sd)` volts clipped at zero,
    /// signed by column class.
    pub fn sample_gaussian(
        rng: &mut SeededRng,
        n: usize,
        classes: Vec<NeuronClass>,
        mean_v: f64,
        sd_v: f64,
    ) -> Result<Self> {
        Self::sample_with(rng, n, classes, |r| r.normal(mean_v, sd_v).max(0.0))
    }

    fn sample_with(
        rng: &mut SeededRng,
        n: usize,
        classes: Vec<NeuronClass>,
        mut magnitude: impl FnMut(&mut SeededRng) -> f64,
    ) -> Result<Self> {
        let mut m = Self::zeros(n, classes)?;
        for post in 0..n {
            for pre in 0..n {
                if post == pre {
                    continue;
                }
                let mag = magnitude(rng);
                m.w[post * n + pre] = match m.classes[pre] {
                    NeuronClass::Excitatory => mag,
                    NeuronClass::Inhibitory => -mag,
                };
            }
        }
        Ok(m)
    }

    /// Zero out `count` distinct off-diagonal entries chosen uniformly.
    pub fn zero_random_offdiagonal(&mut self, rng: &mut SeededRng, count: usize) {
        let mut positions: Vec<(usize, usize)> = (0..self.n)
            .flat_map(|i| (0..self.n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j)
            .collect();
        let count = count.min(positions.len());
        for k in 0..count {
            let pick = k + rng.index(positions.len() - k);
            positions.swap(k, pick);
            let (i, j) = positions[k];
            self.w[i * self.n + j] = 0.0;
        }
    }

    pub fn n_neurons(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, post: usize, pre: usize) -> f64 {
        self.w[post * self.n + pre]
    }

    /// Row of incoming weights for one postsynaptic neuron.
    #[inline]
    pub fn row(&self, post: usize) -> &[f64] {
        &self.w[post * self.n..(post + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn class(&self, neuron: usize) -> NeuronClass {
        self.classes[neuron]
    }

    pub fn classes(&self) -> &[NeuronClass] {
        &self.classes
    }

    /// Add `delta` volts to `(post, pre)`, clipping at zero so the entry
    /// keeps its column's sign. The diagonal is not a valid target.
    #[inline]
    pub fn apply_delta(&mut self, post: usize, pre: usize, delta_v: f64) {
        debug_assert_ne!(post, pre, "no self-synapses");
        let v = &mut self.w[post * self.n + pre];
        *v += delta_v;
        match self.classes[pre] {
            NeuronClass::Excitatory => {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
            NeuronClass::Inhibitory => {
                if *v > 0.0 {
                    *v = 0.0;
                }
            }
        }
    }

    pub fn check_invariants(&self) -> Result<()> {
        for post in 0..self.n {
            for pre in 0..self.n {
                let v = self.w[post * self.n + pre];
                if post == pre && v != 0.0 {
                    return Err(Error::InvalidParam {
                        name: "weights",
                        reason: format!("diagonal entry ({post},{pre}) is {v}, expected 0"),
                    });
                }
                let bad = match self.classes[pre] {
                    NeuronClass::Excitatory => v < 0.0,
                    NeuronClass::Inhibitory => v > 0.0,
                };
                if bad {
                    return Err(Error::InvalidParam {
                        name: "weights",
                        reason: format!(
                            "entry ({post},{pre}) = {v} violates {:?} column sign",
                            self.classes[pre]
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}
