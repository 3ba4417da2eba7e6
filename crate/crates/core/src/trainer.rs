//! The pre-synaptic-pool learning loop.
//!
//! Each epoch: simulate the network being optimized, pair its output
//! against the reference train neuron by neuron, then
//!
//! 1. for every unpaired reference spike at time `t` on neuron `i`,
//!    stochastically strengthen `W_ij` for every `j != i` that spiked in
//!    the observed output during `[t - z, t]` (both ends inclusive) —
//!    trying to induce the missing spike;
//! 2. for every unpaired observed spike, symmetrically weaken the same
//!    kind of pre-synaptic pool — trying to eliminate the extra spike;
//! 3. apply a network-wide homeostatic nudge: with `x` total reference
//!    spikes and `y` total observed spikes, every off-diagonal weight
//!    moves by a fresh `U[0, |x - y| * unit)` volts, upward when the
//!    network under-fires and downward when it over-fires.
//!
//! All updates act on the signed weight value and clip at zero instead of
//! changing sign; for an inhibitory column "increase" therefore means
//! toward zero, which raises excitability just as it does for an
//! excitatory column.
//!
//! A control network shadows the run: every local update is re-applied at
//! a uniformly random off-diagonal synapse with the same presynaptic
//! class, and the homeostatic pass is replayed draw-for-draw from an
//! identically seeded substream. The control thus receives the same
//! number and magnitudes of changes, differing only in where the local
//! ones land.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io;
use crate::lif::{simulate_lif, InputCurrents};
use crate::matcher::{unpaired_report, PairingResult};
use crate::params::NeuronParams;
use crate::raster::Raster;
use crate::rng::{SeededRng, StreamPurpose};
use crate::weights::WeightMatrix;

/// The four initial weight configurations of the recovery experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum InitConfig {
    /// Both `|W| ~ U[0, 5) mV`.
    Uniform,
    /// Both `|W| ~ N(0.4, 0.4) mV`, clipped at zero.
    Gaussian,
    /// Both `|W| ~ U[0, 5) mV`, then half the naive off-diagonal entries
    /// are zeroed.
    Sparse,
    /// Reference `|W| ~ U[0, 5) mV`, naive `|W| ~ U[0, 2.5) mV`.
    NaiveHalfMax,
}

impl InitConfig {
    pub const ALL: [InitConfig; 4] =
        [InitConfig::Uniform, InitConfig::Gaussian, InitConfig::Sparse, InitConfig::NaiveHalfMax];

    pub fn name(&self) -> &'static str {
        match self {
            InitConfig::Uniform => "uniform",
            InitConfig::Gaussian => "gaussian",
            InitConfig::Sparse => "sparse",
            InitConfig::NaiveHalfMax => "naive-half-max",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|c| c.name() == name)
    }
}

/// Learning-rule hyperparameters.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PspmParams {
    /// Pairing cost cap, timesteps.
    pub a_cap: u64,
    /// Pre-synaptic pool window, timesteps.
    pub z: usize,
    /// Local update magnitudes are `U[0, delta_max_v)` volts.
    pub delta_max_v: f64,
    /// Homeostatic per-weight bound is `|x - y| * homeo_unit_v` volts.
    pub homeo_unit_v: f64,
    /// Training epochs.
    pub epochs: usize,
}

impl Default for PspmParams {
    fn default() -> Self {
        PspmParams { a_cap: 15, z: 10, delta_max_v: 1e-7, homeo_unit_v: 1e-11, epochs: 150 }
    }
}

impl PspmParams {
    pub fn validate(&self) -> Result<()> {
        if self.a_cap == 0 {
            return Err(Error::InvalidParam { name: "a_cap", reason: "must be positive".into() });
        }
        if self.z == 0 {
            return Err(Error::InvalidParam { name: "z", reason: "must be positive".into() });
        }
        if !(self.delta_max_v > 0.0) {
            return Err(Error::InvalidParam {
                name: "delta_max_v",
                reason: format!("{} not positive", self.delta_max_v),
            });
        }
        if !(self.homeo_unit_v > 0.0) {
            return Err(Error::InvalidParam {
                name: "homeo_unit_v",
                reason: format!("{} not positive", self.homeo_unit_v),
            });
        }
        Ok(())
    }
}

/// Why a local weight change was made.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum UpdateKind {
    /// Strengthening toward a missing reference spike.
    Induce,
    /// Weakening away from an extra observed spike.
    Eliminate,
}

impl UpdateKind {
    pub fn name(&self) -> &'static str {
        match self {
            UpdateKind::Induce => "induce",
            UpdateKind::Eliminate => "eliminate",
        }
    }
}

/// One local weight change in the optimized network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalUpdate {
    pub epoch: usize,
    pub post: usize,
    pub pre: usize,
    /// Signed delta in volts, as drawn (before any clipping).
    pub delta_v: f64,
    pub kind: UpdateKind,
}

/// One epoch's homeostatic pass, summarized by its signed per-weight bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomeoUpdate {
    pub epoch: usize,
    /// `sign(x - y) * |x - y| * homeo_unit_v`; each off-diagonal weight
    /// received a fresh uniform draw from zero to this bound.
    pub bound_v: f64,
}

/// Full update history of one trial.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct UpdateLog {
    pub local: Vec<LocalUpdate>,
    pub homeo: Vec<HomeoUpdate>,
}

/// Reference, naive, and control weights for one trial. The control starts
/// as an exact copy of the naive network, and all three share one
/// inhibitory neuron set.
#[derive(Debug, Clone)]
pub struct TrialWeights {
    pub reference: WeightMatrix,
    pub naive: WeightMatrix,
    pub control: WeightMatrix,
}

const MV: f64 = 1e-3;

/// Draw the initial weight matrices for one recovery trial.
pub fn init_trial(
    config: InitConfig,
    n_neurons: usize,
    inhibitory_fraction: f64,
    master_seed: u64,
    trial: u64,
) -> Result<TrialWeights> {
    let mut class_rng = SeededRng::substream(master_seed, trial, 0, StreamPurpose::NeuronClasses);
    let classes = WeightMatrix::sample_classes(&mut class_rng, n_neurons, inhibitory_fraction);

    let mut ref_rng = SeededRng::substream(master_seed, trial, 0, StreamPurpose::RefWeights);
    let mut naive_rng = SeededRng::substream(master_seed, trial, 0, StreamPurpose::NaiveWeights);

    let (reference, naive) = match config {
        InitConfig::Uniform => (
            WeightMatrix::sample_uniform(&mut ref_rng, n_neurons, classes.clone(), 0.0, 5.0 * MV)?,
            WeightMatrix::sample_uniform(&mut naive_rng, n_neurons, classes, 0.0, 5.0 * MV)?,
        ),
        InitConfig::Gaussian => (
            WeightMatrix::sample_gaussian(&mut ref_rng, n_neurons, classes.clone(), 0.4 * MV, 0.4 * MV)?,
            WeightMatrix::sample_gaussian(&mut naive_rng, n_neurons, classes, 0.4 * MV, 0.4 * MV)?,
        ),
        InitConfig::Sparse => {
            let reference =
                WeightMatrix::sample_uniform(&mut ref_rng, n_neurons, classes.clone(), 0.0, 5.0 * MV)?;
            let mut naive =
                WeightMatrix::sample_uniform(&mut naive_rng, n_neurons, classes, 0.0, 5.0 * MV)?;
            naive.zero_random_offdiagonal(&mut naive_rng, n_neurons * (n_neurons - 1) / 2);
            (reference, naive)
        }
        InitConfig::NaiveHalfMax => (
            WeightMatrix::sample_uniform(&mut ref_rng, n_neurons, classes.clone(), 0.0, 5.0 * MV)?,
            WeightMatrix::sample_uniform(&mut naive_rng, n_neurons, classes, 0.0, 2.5 * MV)?,
        ),
    };
    let control = naive.clone();
    Ok(TrialWeights { reference, naive, control })
}

/// Pool of presynaptic candidates for a spike at `t`: every `j != post`
/// with an observed spike in `[t - z, t]`.
fn presynaptic_pool(observed: &Raster, post: usize, t: usize, z: usize) -> Vec<usize> {
    let lo = t.saturating_sub(z);
    (0..observed.n_neurons())
        .filter(|&j| j != post && observed.spiked_in_window(j, lo, t))
        .collect()
}

/// Apply the induce/eliminate rules for one epoch. Neurons are visited in
/// ascending order; per neuron, unpaired reference spikes first (ascending
/// time), then unpaired observed spikes. Each implicated synapse gets a
/// fresh delta, applied and clipped immediately.
pub fn local_updates(
    observed: &Raster,
    reference: &Raster,
    pairing: &[PairingResult],
    weights: &mut WeightMatrix,
    params: &PspmParams,
    epoch: usize,
    rng: &mut SeededRng,
) -> Vec<LocalUpdate> {
    let mut log = Vec::new();
    for post in 0..weights.n_neurons() {
        let ref_times = reference.spike_times(post);
        let obs_times = observed.spike_times(post);
        let pr = &pairing[post];
        for &k in &pr.unpaired_ref {
            let t = ref_times[k];
            for j in presynaptic_pool(observed, post, t, params.z) {
                let delta = rng.uniform_in(0.0, params.delta_max_v);
                weights.apply_delta(post, j, delta);
                log.push(LocalUpdate { epoch, post, pre: j, delta_v: delta, kind: UpdateKind::Induce });
            }
        }
        for &l in &pr.unpaired_obs {
            let t = obs_times[l];
            for j in presynaptic_pool(observed, post, t, params.z) {
                let delta = rng.uniform_in(0.0, params.delta_max_v);
                weights.apply_delta(post, j, -delta);
                log.push(LocalUpdate {
                    epoch,
                    post,
                    pre: j,
                    delta_v: -delta,
                    kind: UpdateKind::Eliminate,
                });
            }
        }
    }
    log
}

/// Network-wide homeostatic pass. Draws run row-major over off-diagonal
/// entries (the diagonal consumes no draw), so a replay from an equally
/// seeded generator applies identical deltas.
pub fn homeostatic_update(
    ref_spikes: usize,
    obs_spikes: usize,
    weights: &mut WeightMatrix,
    params: &PspmParams,
    epoch: usize,
    rng: &mut SeededRng,
) -> Option<HomeoUpdate> {
    if ref_spikes == obs_spikes {
        return None;
    }
    let gap = ref_spikes.abs_diff(obs_spikes) as f64;
    let sign = if ref_spikes > obs_spikes { 1.0 } else { -1.0 };
    let bound = gap * params.homeo_unit_v;
    let n = weights.n_neurons();
    for post in 0..n {
        for pre in 0..n {
            if post == pre {
                continue;
            }
            let draw = rng.uniform_in(0.0, bound);
            weights.apply_delta(post, pre, sign * draw);
        }
    }
    Some(HomeoUpdate { epoch, bound_v: sign * bound })
}

/// Mirror one epoch's updates into the control network: each local change
/// lands at a uniformly random off-diagonal synapse whose presynaptic
/// class matches the original's, and the homeostatic pass is replayed
/// from `homeo_rng` (seed it identically to the optimized pass).
pub fn control_shadow(
    local: &[LocalUpdate],
    homeo_bound: Option<&HomeoUpdate>,
    control: &mut WeightMatrix,
    params: &PspmParams,
    reloc_rng: &mut SeededRng,
    homeo_rng: &mut SeededRng,
) {
    let n = control.n_neurons();
    for entry in local {
        let class = control.class(entry.pre);
        let candidates: Vec<usize> =
            (0..n).filter(|&j| control.class(j) == class).collect();
        let (post, pre) = loop {
            let pre = candidates[reloc_rng.index(candidates.len())];
            let post = reloc_rng.index(n);
            if post != pre {
                break (post, pre);
            }
        };
        control.apply_delta(post, pre, entry.delta_v);
    }
    if let Some(h) = homeo_bound {
        let sign = if h.bound_v >= 0.0 { 1.0 } else { -1.0 };
        let bound = h.bound_v.abs();
        let _ = params;
        for post in 0..n {
            for pre in 0..n {
                if post == pre {
                    continue;
                }
                let draw = homeo_rng.uniform_in(0.0, bound);
                control.apply_delta(post, pre, sign * draw);
            }
        }
    }
}

/// Per-epoch progress counters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub pairing_cost: u64,
    pub unpaired_ref: usize,
    pub unpaired_obs: usize,
    pub ref_spikes: usize,
    pub obs_spikes: usize,
    pub local_updates: usize,
}

/// Everything produced by one trial.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    /// Ground-truth weights, when the reference came from a LIF network.
    pub reference_weights: Option<WeightMatrix>,
    /// Naive weights as initialized.
    pub naive_weights: WeightMatrix,
    /// Optimized weights after the final epoch.
    pub optimized_weights: WeightMatrix,
    /// Control weights after the final epoch.
    pub control_weights: WeightMatrix,
    pub reference_raster: Raster,
    pub naive_raster: Raster,
    pub optimized_raster: Raster,
    pub control_raster: Raster,
    pub update_log: UpdateLog,
    pub epoch_stats: Vec<EpochStats>,
    pub neuron_params: NeuronParams,
    pub pspm_params: PspmParams,
    pub master_seed: u64,
    pub trial: u64,
}

/// Run the learning loop for one trial.
///
/// The same input currents drive every simulation. After the last epoch
/// the optimized and control networks are simulated once more to produce
/// the final observed and control rasters.
#[allow(clippy::too_many_arguments)]
pub fn run_pspm(
    reference_raster: &Raster,
    reference_weights: Option<WeightMatrix>,
    naive: WeightMatrix,
    control: WeightMatrix,
    currents: &InputCurrents,
    neuron_params: &NeuronParams,
    pspm_params: &PspmParams,
    master_seed: u64,
    trial: u64,
) -> Result<TrialRecord> {
    pspm_params.validate()?;
    if reference_raster.n_neurons() != naive.n_neurons()
        || reference_raster.n_steps() != currents.n_steps()
        || currents.n_neurons() != naive.n_neurons()
        || control.n_neurons() != naive.n_neurons()
    {
        return Err(Error::ShapeMismatch {
            expected: format!("{}x{}", naive.n_neurons(), reference_raster.n_steps()),
            found: format!(
                "raster {}x{}, currents {}x{}",
                reference_raster.n_neurons(),
                reference_raster.n_steps(),
                currents.n_neurons(),
                currents.n_steps()
            ),
        });
    }

    let naive_raster = simulate_lif(&naive, neuron_params, currents)?;
    let naive_weights = naive.clone();
    let mut optimized = naive;
    let mut control = control;
    let mut log = UpdateLog::default();
    let mut epoch_stats = Vec::with_capacity(pspm_params.epochs);
    let ref_spikes = reference_raster.total_spikes();

    for epoch in 0..pspm_params.epochs {
        let observed = simulate_lif(&optimized, neuron_params, currents)?;
        let pairing = unpaired_report(reference_raster, &observed, pspm_params.a_cap)?;

        let mut local_rng =
            SeededRng::substream(master_seed, trial, epoch as u64, StreamPurpose::LocalDelta);
        let locals = local_updates(
            &observed,
            reference_raster,
            &pairing,
            &mut optimized,
            pspm_params,
            epoch,
            &mut local_rng,
        );

        let obs_spikes = observed.total_spikes();
        let mut homeo_rng =
            SeededRng::substream(master_seed, trial, epoch as u64, StreamPurpose::Homeostasis);
        let homeo = homeostatic_update(
            ref_spikes,
            obs_spikes,
            &mut optimized,
            pspm_params,
            epoch,
            &mut homeo_rng,
        );

        let mut reloc_rng =
            SeededRng::substream(master_seed, trial, epoch as u64, StreamPurpose::ControlRelocation);
        let mut homeo_replay =
            SeededRng::substream(master_seed, trial, epoch as u64, StreamPurpose::Homeostasis);
        control_shadow(&locals, homeo.as_ref(), &mut control, pspm_params, &mut reloc_rng, &mut homeo_replay);

        epoch_stats.push(EpochStats {
            epoch,
            pairing_cost: pairing.iter().map(|p| p.total_cost).sum(),
            unpaired_ref: pairing.iter().map(|p| p.unpaired_ref.len()).sum(),
            unpaired_obs: pairing.iter().map(|p| p.unpaired_obs.len()).sum(),
            ref_spikes,
            obs_spikes,
            local_updates: locals.len(),
        });
        log.local.extend(locals);
        log.homeo.extend(homeo);
    }

    let optimized_raster = simulate_lif(&optimized, neuron_params, currents)?;
    let control_raster = simulate_lif(&control, neuron_params, currents)?;

    Ok(TrialRecord {
        reference_weights,
        naive_weights,
        optimized_weights: optimized,
        control_weights: control,
        reference_raster: reference_raster.clone(),
        naive_raster,
        optimized_raster,
        control_raster,
        update_log: log,
        epoch_stats,
        neuron_params: neuron_params.clone(),
        pspm_params: pspm_params.clone(),
        master_seed,
        trial,
    })
}

impl TrialRecord {
    /// Persist the record as a directory.
    ///
    /// Layout: `raster_{r,n,o,c}.txt` (sparse text),
    /// `weights_{reference,naive,optimized,control}.csv`,
    /// `update_log.csv` (`epoch,i,j,delta_v,kind`; homeostasis rows carry
    /// `i = j = -1` and the signed per-weight bound), `epoch_stats.csv`,
    /// and `trial.json` with seeds and parameters. Raster and update-log
    /// output can be switched off for bulk runs.
    pub fn write_dir(&self, dir: &Path, persist_rasters: bool, persist_update_log: bool) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        if persist_rasters {
            io::write_raster(&dir.join("raster_r.txt"), &self.reference_raster)?;
            io::write_raster(&dir.join("raster_n.txt"), &self.naive_raster)?;
            io::write_raster(&dir.join("raster_o.txt"), &self.optimized_raster)?;
            io::write_raster(&dir.join("raster_c.txt"), &self.control_raster)?;
        }
        if let Some(w) = &self.reference_weights {
            io::write_weights(&dir.join("weights_reference.csv"), w)?;
        }
        io::write_weights(&dir.join("weights_naive.csv"), &self.naive_weights)?;
        io::write_weights(&dir.join("weights_optimized.csv"), &self.optimized_weights)?;
        io::write_weights(&dir.join("weights_control.csv"), &self.control_weights)?;

        if persist_update_log {
            let path = dir.join("update_log.csv");
            let mut out = std::io::BufWriter::new(
                fs::File::create(&path).map_err(|e| Error::io(&path, e))?,
            );
            (|| -> std::io::Result<()> {
                writeln!(out, "epoch,i,j,delta_v,kind")?;
                for u in &self.update_log.local {
                    writeln!(out, "{},{},{},{},{}", u.epoch, u.post, u.pre, u.delta_v, u.kind.name())?;
                }
                for h in &self.update_log.homeo {
                    writeln!(out, "{},-1,-1,{},homeostasis", h.epoch, h.bound_v)?;
                }
                out.flush()
            })()
            .map_err(|e| Error::io(&path, e))?;
        }

        let path = dir.join("epoch_stats.csv");
        let mut out =
            std::io::BufWriter::new(fs::File::create(&path).map_err(|e| Error::io(&path, e))?);
        (|| -> std::io::Result<()> {
            writeln!(out, "epoch,pairing_cost,unpaired_ref,unpaired_obs,ref_spikes,obs_spikes,local_updates")?;
            for s in &self.epoch_stats {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    s.epoch,
                    s.pairing_cost,
                    s.unpaired_ref,
                    s.unpaired_obs,
                    s.ref_spikes,
                    s.obs_spikes,
                    s.local_updates
                )?;
            }
            out.flush()
        })()
        .map_err(|e| Error::io(&path, e))?;

        let meta = serde_json::json!({
            "master_seed": self.master_seed,
            "trial": self.trial,
            "rng_algorithm": crate::rng::ALGORITHM,
            "neuron_params": self.neuron_params,
            "pspm_params": self.pspm_params,
            "local_updates": self.update_log.local.len(),
            "homeostatic_epochs": self.update_log.homeo.len(),
        });
        let path = dir.join("trial.json");
        fs::write(&path, serde_json::to_string_pretty(&meta).expect("serializable") + "\n")
            .map_err(|e| Error::io(&path, e))
    }
}
