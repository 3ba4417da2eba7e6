//! Neuron model parameters.

use crate::error::{Error, Result};

/// Leaky integrate-and-fire parameters, stated in their customary units.
/// The simulator converts to volts/amperes/seconds internally.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NeuronParams {
    /// Membrane time constant, ms.
    pub tau_ms: f64,
    /// Membrane resistance, MΩ.
    pub r_m_mohm: f64,
    /// Spike threshold, mV.
    pub v_th_mv: f64,
    /// Euler step size, ms.
    pub dt_ms: f64,
    /// Fraction of neurons assigned inhibitory.
    pub inhibitory_fraction: f64,
}

impl Default for NeuronParams {
    fn default() -> Self {
        NeuronParams {
            tau_ms: 30.0,
            r_m_mohm: 100.0,
            v_th_mv: 30.0,
            dt_ms: 3.0,
            inhibitory_fraction: 0.2,
        }
    }
}

impl NeuronParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tau_ms", self.tau_ms),
            ("r_m_mohm", self.r_m_mohm),
            ("v_th_mv", self.v_th_mv),
            ("dt_ms", self.dt_ms),
        ] {
            if !(v > 0.0) {
                return Err(Error::InvalidParam { name, reason: format!("{v} is not strictly positive") });
            }
        }
        if !(0.0..=1.0).contains(&self.inhibitory_fraction) {
            return Err(Error::InvalidParam {
                name: "inhibitory_fraction",
                reason: format!("{} outside [0, 1]", self.inhibitory_fraction),
            });
        }
        Ok(())
    }

    pub fn dt_over_tau(&self) -> f64 {
        self.dt_ms / self.tau_ms
    }

    pub fn r_m_ohm(&self) -> f64 {
        self.r_m_mohm * 1e6
    }

    pub fn v_th_volts(&self) -> f64 {
        self.v_th_mv * 1e-3
    }

    /// Simulated seconds per timestep.
    pub fn dt_seconds(&self) -> f64 {
        self.dt_ms * 1e-3
    }
}
