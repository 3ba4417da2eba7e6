//! A small laboratory for spiking neural networks.
//!
//! The crate provides the pieces needed to run spike-train learning
//! experiments end to end:
//!
//! - [`raster`] / [`weights`] / [`params`]: the shared domain types — binary
//!   spike rasters, signed synaptic weight matrices with excitatory/inhibitory
//!   column classes, and neuron model parameters.
//! - [`rng`]: the seeded random-number contract every stochastic component
//!   draws from, with named substreams per (trial, epoch, purpose).
//! - [`lif`]: deterministic leaky integrate-and-fire network simulation under
//!   externally supplied input currents.
//! - [`pif`]: a probabilistic integrate-and-fire generator tuned to spectral
//!   radius 1, used to produce reference spike trains near criticality.
//! - [`matcher`]: the dynamic program that optimally pairs spikes between a
//!   reference and an observed train under a per-spike cost cap.
//! - [`trainer`]: the pre-synaptic-pool learning loop — local induce/eliminate
//!   updates, network-wide homeostasis, and a control network that receives
//!   the same updates at random synapses.
//! - [`metrics`]: Gaussian-kernel activity signals, pairwise/aggregate spike
//!   train distances, ISI statistics, a two-sample KS test, and weight-matrix
//!   differences.
//! - [`avalanche`]: percentile-threshold avalanche segmentation and power-law
//!   exponent fits (MLE and log-log regression).
//! - [`io`]: the sparse raster text format and the dense weight CSV format.

pub mod avalanche;
pub mod error;
pub mod io;
pub mod lif;
pub mod matcher;
pub mod metrics;
pub mod params;
pub mod pif;
pub mod raster;
pub mod rng;
pub mod trainer;
pub mod weights;

pub use error::{Error, Result};
pub use params::NeuronParams;
pub use raster::Raster;
pub use rng::SeededRng;
pub use weights::{NeuronClass, WeightMatrix};
