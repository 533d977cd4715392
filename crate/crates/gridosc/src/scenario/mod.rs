//! Scenario files, experiment orchestration and reporting.
//!
//! A scenario binds a network dataset (built-in name, file path or inline
//! data), the aggregated pile placement, the attack and load-process blocks,
//! per-machine defense controllers and the simulation configuration. Files
//! are JSON with a versioned `schema` field; unknown keys are rejected.

pub mod datasets;
mod reproduce;

pub use reproduce::{reproduce, reproduce_ids};

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::attack::{LoadProcess, MmaCommand};
use crate::dynamics::{
    simulate, Activation, ControllerSetup, DetectionConfig, PileParams, PileSpec, PowerSystem,
    SimConfig, Simulation, Trace,
};
use crate::error::{Error, Result};
use crate::miadrc::{compute_b, MiadrcGains, MultiIndexCoeffs};
use crate::modal::{decompose, linearize, ModalDecomposition, ModeInfo};
use datasets::{builtin_network, NetworkData, NetworkFile};

pub const SCHEMA_VERSION: u32 = 1;

// ---------------------------------------------------------------------------
// File schema
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema: u32,
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub network: NetworkRef,
    #[serde(default)]
    pub network_mods: NetworkMods,
    #[serde(default)]
    pub pile: Option<PileBlock>,
    #[serde(default)]
    pub load_process: Option<LoadProcessBlock>,
    #[serde(default)]
    pub attack: Option<AttackBlock>,
    #[serde(default)]
    pub miadrc: BTreeMap<String, MiadrcBlock>,
    pub sim: SimConfig,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NetworkRef {
    /// A built-in dataset name.
    Name(String),
    /// An inline network description.
    Inline(Box<NetworkFile>),
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkMods {
    /// Replace the load at a bus.
    #[serde(default)]
    pub loads: Vec<datasets::LoadEntry>,
    /// Override scheduled machine outputs by label.
    #[serde(default)]
    pub dispatch: Vec<DispatchEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispatchEntry {
    pub label: String,
    pub p: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PileBlock {
    pub bus: usize,
    pub base_load: f64,
    /// Series filter reactance in pu on the pile MVA base.
    #[serde(default = "default_filter_x")]
    pub filter_x: f64,
    #[serde(default)]
    pub params: PileParams,
    /// Generation pickup policy: listed machines share the pile load above
    /// `reference` equally on top of their scheduled output.
    #[serde(default)]
    pub pickup: Option<PickupBlock>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PickupBlock {
    pub gens: Vec<String>,
    #[serde(default)]
    pub reference: f64,
}

fn default_filter_x() -> f64 {
    0.1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadProcessBlock {
    pub mean: f64,
    #[serde(default)]
    pub sigma: f64,
    #[serde(default = "default_bandwidth")]
    pub bandwidth_hz: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_bandwidth() -> f64 {
    5.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackBlock {
    pub i_pct: f64,
    pub freq_hz: f64,
    #[serde(default)]
    pub phase_rad: f64,
    pub t_start: f64,
    pub t_stop: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MiadrcBlock {
    #[serde(default = "default_true")]
    pub enabled: bool,
    #[serde(default)]
    pub auto_detect: bool,
    #[serde(default)]
    pub enable_time_s: Option<f64>,
    #[serde(default)]
    pub gains: GainsBlock,
    #[serde(default)]
    pub coeffs: CoeffsBlock,
    #[serde(default)]
    pub detection: Option<DetectionConfig>,
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GainsBlock {
    pub h: f64,
    pub w_c: f64,
    pub r0: f64,
    pub c: f64,
    /// Input gain; omitted means "compute from the operating point".
    pub b: Option<f64>,
}

impl Default for GainsBlock {
    fn default() -> Self {
        let g = MiadrcGains::default();
        GainsBlock { h: g.h, w_c: g.w_c, r0: g.r0, c: g.c, b: None }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoeffsBlock {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl Default for CoeffsBlock {
    fn default() -> Self {
        let c = MultiIndexCoeffs::default();
        CoeffsBlock { c1: c.c1, c2: c.c2, c3: c.c3 }
    }
}

impl ScenarioFile {
    pub fn from_json(json: &str) -> Result<ScenarioFile> {
        let file: ScenarioFile = serde_json::from_str(json).map_err(|e| Error::Schema {
            path: e.to_string(),
            message: "scenario does not match the schema".into(),
        })?;
        if file.schema != SCHEMA_VERSION {
            return Err(Error::Schema {
                path: "schema".into(),
                message: format!("unsupported schema version {}", file.schema),
            });
        }
        file.validate()?;
        Ok(file)
    }

    pub fn from_path(path: &Path) -> Result<ScenarioFile> {
        let json = std::fs::read_to_string(path)?;
        Self::from_json(&json)
    }

    fn validate(&self) -> Result<()> {
        if let Some(a) = &self.attack {
            if a.t_start < 0.0 || a.t_stop > self.sim.t_end || a.t_stop <= a.t_start {
                return Err(Error::Schema {
                    path: "attack".into(),
                    message: format!(
                        "attack window [{}, {}) must sit inside [0, {}]",
                        a.t_start, a.t_stop, self.sim.t_end
                    ),
                });
            }
            if self.pile.is_none() {
                return Err(Error::Schema {
                    path: "attack".into(),
                    message: "an attack requires a pile block".into(),
                });
            }
        }
        Ok(())
    }

    /// Canonical content hash of the scenario definition.
    pub fn content_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("scenario serializes");
        hex_digest(json.as_bytes())
    }

    /// Address a scalar parameter for sweeps. Supported paths:
    /// `pile.base_load`, `pile.filter_x`, `pile.params.kp3`,
    /// `pile.params.ki3`, `attack.i_pct`, `attack.freq_hz`,
    /// `load_process.sigma`, `load_process.mean`.
    pub fn set_path(&mut self, path: &str, value: f64) -> Result<()> {
        let missing = |what: &str| Error::Schema {
            path: path.to_string(),
            message: format!("scenario has no {what} block"),
        };
        match path {
            "pile.base_load" => {
                self.pile.as_mut().ok_or_else(|| missing("pile"))?.base_load = value
            }
            "pile.filter_x" => {
                self.pile.as_mut().ok_or_else(|| missing("pile"))?.filter_x = value
            }
            "pile.params.kp3" => {
                self.pile.as_mut().ok_or_else(|| missing("pile"))?.params.kp3 = value
            }
            "pile.params.ki3" => {
                self.pile.as_mut().ok_or_else(|| missing("pile"))?.params.ki3 = value
            }
            "attack.i_pct" => {
                self.attack.as_mut().ok_or_else(|| missing("attack"))?.i_pct = value
            }
            "attack.freq_hz" => {
                self.attack.as_mut().ok_or_else(|| missing("attack"))?.freq_hz = value
            }
            "load_process.sigma" => {
                self.load_process
                    .as_mut()
                    .ok_or_else(|| missing("load_process"))?
                    .sigma = value
            }
            "load_process.mean" => {
                self.load_process
                    .as_mut()
                    .ok_or_else(|| missing("load_process"))?
                    .mean = value
            }
            other => {
                return Err(Error::Schema {
                    path: other.to_string(),
                    message: "unknown parameter path; see set_path docs".into(),
                })
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

/// A scenario resolved into an assembled dynamic model plus run inputs.
pub struct BuiltScenario {
    pub file: ScenarioFile,
    pub system: PowerSystem,
    pub attack: Option<MmaCommand>,
    pub load: LoadProcess,
    pub controllers: Vec<(usize, ControllerSetup)>,
}

/// Resolve the network reference, apply modifications and pickup policy,
/// assemble the dynamic model and instantiate controllers.
pub fn build_scenario(file: &ScenarioFile) -> Result<BuiltScenario> {
    let mut data: NetworkData = match &file.network {
        NetworkRef::Name(name) => builtin_network(name)?,
        NetworkRef::Inline(nf) => nf.as_ref().clone().into_data(),
    };
    for l in &file.network_mods.loads {
        data.set_load(l.bus, l.p, l.q);
    }
    for d in &file.network_mods.dispatch {
        let idx = data.machine_index(&d.label).ok_or_else(|| Error::Schema {
            path: format!("network_mods.dispatch.{}", d.label),
            message: "unknown machine label".into(),
        })?;
        data.machines[idx].p_set = d.p;
    }

    let pile_spec = file.pile.as_ref().map(|p| PileSpec {
        bus: p.bus,
        base_load: p.base_load,
        filter_x: p.filter_x,
        params: p.params,
    });
    if let Some(p) = &file.pile {
        if let Some(pickup) = &p.pickup {
            let extra = p.base_load - pickup.reference;
            let share = extra / pickup.gens.len().max(1) as f64;
            for label in &pickup.gens {
                let idx = data.machine_index(label).ok_or_else(|| Error::Schema {
                    path: format!("pile.pickup.{label}"),
                    message: "unknown machine label".into(),
                })?;
                data.machines[idx].p_set += share;
            }
        }
    }

    let system = PowerSystem::assemble(
        &data.buses,
        &data.branches,
        &data.loads,
        &data.machines,
        pile_spec.as_ref(),
    )?;

    let attack = match &file.attack {
        Some(a) => Some(MmaCommand::new(
            a.i_pct,
            2.0 * std::f64::consts::PI * a.freq_hz,
            a.phase_rad,
            a.t_start,
            a.t_stop,
        )?),
        None => None,
    };

    let load = match &file.load_process {
        Some(lp) => LoadProcess {
            p_a0_mean: lp.mean,
            sigma: lp.sigma,
            bandwidth_w: 2.0 * std::f64::consts::PI * lp.bandwidth_hz,
            seed: lp.seed,
        },
        None => LoadProcess::constant(
            file.pile.as_ref().map(|p| p.base_load).unwrap_or(0.0),
        ),
    };
    if let (Some(p), Some(lp)) = (&file.pile, &file.load_process) {
        if (p.base_load - lp.mean).abs() > 1e-9 {
            return Err(Error::Schema {
                path: "load_process.mean".into(),
                message: format!(
                    "load-process mean {} must equal the pile base load {}",
                    lp.mean, p.base_load
                ),
            });
        }
    }

    let mut controllers = Vec::new();
    for (label, block) in &file.miadrc {
        if !block.enabled {
            continue;
        }
        let gen = system
            .gen_labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Schema {
                path: format!("miadrc.{label}"),
                message: "unknown machine label".into(),
            })?;
        let coeffs = MultiIndexCoeffs::new(block.coeffs.c1, block.coeffs.c2, block.coeffs.c3)?;
        let b = match block.gains.b {
            Some(b) => b,
            None => compute_b(&system, &system.equilibrium, gen, &coeffs)?,
        };
        let mut gains = MiadrcGains::bandwidth(block.gains.w_c, block.gains.h, block.gains.r0, b);
        gains.c = block.gains.c;
        let activation = if block.auto_detect {
            Activation::Auto(block.detection.clone().unwrap_or_default())
        } else {
            let t_on = block.enable_time_s.ok_or_else(|| Error::Schema {
                path: format!("miadrc.{label}.enable_time_s"),
                message: "scripted activation needs enable_time_s".into(),
            })?;
            Activation::At(t_on)
        };
        controllers.push((gen, ControllerSetup { gains, coeffs, activation }));
    }

    Ok(BuiltScenario {
        file: file.clone(),
        system,
        attack,
        load,
        controllers,
    })
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModeSummary {
    pub frequency_hz: f64,
    pub damping_ratio: f64,
    pub eigen_re: f64,
    pub eigen_im: f64,
}

/// Exportable modal report matching the documented JSON schema.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModeReport {
    pub frequency_hz: f64,
    pub damping_ratio: f64,
    pub shape: Vec<ShapeEntry>,
    pub participation: Vec<ParticipationEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShapeEntry {
    pub state: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParticipationEntry {
    pub state: String,
    pub value: f64,
}

impl ModeReport {
    pub fn from_info(info: &ModeInfo) -> ModeReport {
        ModeReport {
            frequency_hz: info.frequency,
            damping_ratio: info.damping_ratio,
            shape: info
                .shape
                .iter()
                .zip(&info.shape_labels)
                .map(|(c, l)| ShapeEntry { state: l.clone(), re: c.re, im: c.im })
                .collect(),
            participation: info
                .participation
                .iter()
                .zip(&info.participation_labels)
                .map(|(v, l)| ParticipationEntry { state: l.clone(), value: *v })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Metrics {
    /// Steady oscillation amplitude per recorded channel over the metric
    /// window.
    pub amplitudes: BTreeMap<String, f64>,
    /// `1 - controlled/uncontrolled` steady amplitude, when a defense ran.
    pub suppression_rate: Option<f64>,
    /// Largest terminal-voltage oscillation amplitude among controlled
    /// machines.
    pub controlled_voltage_amplitude: Option<f64>,
    /// Metric window (last 5 s of the attack window).
    pub window: (f64, f64),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub scenario_name: String,
    pub scenario_hash: String,
    pub modes: Vec<ModeSummary>,
    pub metrics: Metrics,
    pub trace: Trace,
    /// Twin run with all controllers disabled (present when any ran).
    pub baseline: Option<Trace>,
    /// Hash over the trace bytes and metrics (determinism witness).
    pub report_hash: String,
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

/// The steady-state metric window: the last 5 s of the attack window, or
/// the last quarter of the run without an attack.
pub fn metric_window(file: &ScenarioFile) -> (f64, f64) {
    match &file.attack {
        Some(a) => ((a.t_stop - 5.0).max(a.t_start), a.t_stop),
        None => (0.75 * file.sim.t_end, file.sim.t_end),
    }
}

/// Power flow, initialization, simulation and metrics for one scenario.
/// Deterministic for fixed seeds. When controllers are configured the
/// no-defense twin is also run to anchor the suppression metric.
pub fn run_scenario(file: &ScenarioFile) -> Result<ExperimentReport> {
    let built = build_scenario(file)?;
    let sim = Simulation {
        system: &built.system,
        attack: built.attack,
        load: built.load,
        controllers: built.controllers.clone(),
    };
    let trace = simulate(&sim, &file.sim)?;

    let baseline = if built.controllers.is_empty() {
        None
    } else {
        let bare = Simulation {
            system: &built.system,
            attack: built.attack,
            load: built.load,
            controllers: Vec::new(),
        };
        Some(simulate(&bare, &file.sim)?)
    };

    let (t0, t1) = metric_window(file);
    let mut amplitudes = BTreeMap::new();
    for (name, _) in &trace.channels {
        if let Some(a) = trace.amplitude(name, t0, t1) {
            amplitudes.insert(name.clone(), a);
        }
    }
    let mut suppression_rate = None;
    let mut controlled_voltage_amplitude = None;
    if let Some(base) = &baseline {
        // anchor on the largest uncontrolled machine-power swing
        let mut best: Option<(String, f64)> = None;
        for (name, _) in &base.channels {
            if name.ends_with(".Pe") && !name.starts_with("pile") {
                if let Some(a) = base.amplitude(name, t0, t1) {
                    if best.as_ref().map(|(_, b)| a > *b).unwrap_or(true) {
                        best = Some((name.clone(), a));
                    }
                }
            }
        }
        if let Some((channel, unc)) = best {
            let ctl = trace.amplitude(&channel, t0, t1).unwrap_or(0.0);
            if unc > 0.0 {
                suppression_rate = Some(1.0 - ctl / unc);
            }
        }
        let mut vmax: f64 = 0.0;
        for (gen, _) in &built.controllers {
            let name = format!("{}.Vt", built.system.gen_labels[*gen]);
            if let Some(a) = trace.amplitude(&name, t0, t1) {
                vmax = vmax.max(a);
            }
        }
        controlled_voltage_amplitude = Some(vmax);
    }

    // modal summary of the oscillatory band
    let modes = match linearize(&built.system).and_then(|m| decompose(&m)) {
        Ok(dec) => dec
            .oscillatory_in_band(0.1, 3.0)
            .into_iter()
            .map(|i| {
                let info = dec.mode_info(i);
                ModeSummary {
                    frequency_hz: info.frequency,
                    damping_ratio: info.damping_ratio,
                    eigen_re: info.eigenvalue.re,
                    eigen_im: info.eigenvalue.im,
                }
            })
            .collect(),
        Err(_) => Vec::new(),
    };

    let metrics = Metrics {
        amplitudes,
        suppression_rate,
        controlled_voltage_amplitude,
        window: (t0, t1),
    };
    let mut hash_input = trace.csv_string().into_bytes();
    hash_input.extend_from_slice(serde_json::to_string(&metrics)?.as_bytes());
    let report_hash = hex_digest(&hash_input);

    Ok(ExperimentReport {
        scenario_name: file.name.clone(),
        scenario_hash: file.content_hash(),
        modes,
        metrics,
        trace,
        baseline,
        report_hash,
    })
}

/// Modal analysis of a built scenario: full decomposition for reporting.
pub fn modal_report(file: &ScenarioFile) -> Result<(ModalDecomposition, Vec<ModeReport>)> {
    let built = build_scenario(file)?;
    let model = linearize(&built.system)?;
    let dec = decompose(&model)?;
    let reports = dec
        .oscillatory_in_band(0.05, 5.0)
        .into_iter()
        .map(|i| ModeReport::from_info(&dec.mode_info(i)))
        .collect();
    Ok((dec, reports))
}

/// Sweep a scalar scenario parameter, re-running the modal analysis at each
/// value and tracking the inter-area (or requested) mode.
pub fn sweep_scenario(
    file: &ScenarioFile,
    path: &str,
    values: &[f64],
    track: TrackedMode,
) -> Result<Vec<ModeInfo>> {
    let build = |v: f64| -> Result<crate::modal::LinearModel> {
        let mut f = file.clone();
        f.set_path(path, v)?;
        if path == "pile.base_load" {
            if let Some(lp) = f.load_process.as_mut() {
                lp.mean = v;
            }
        }
        let built = build_scenario(&f)?;
        linearize(&built.system)
    };
    // pick the initial mode on the first point
    let first = build(values[0])?;
    let dec = decompose(&first)?;
    let initial = match track {
        TrackedMode::InterArea => inter_area_mode(&dec).ok_or_else(|| Error::Config(
            "no inter-area mode found at the first sweep point".into(),
        ))?,
        TrackedMode::Pile => {
            crate::modal::pile_mode(&dec)
                .map(|(i, _)| i)
                .ok_or_else(|| Error::Config("no pile mode found".into()))?
        }
        TrackedMode::NearestTo(f_hz) => nearest_mode(&dec, f_hz)
            .ok_or_else(|| Error::Config("no oscillatory mode found".into()))?,
    };
    crate::modal::mode_sweep(build, values, initial)
}

#[derive(Clone, Copy, Debug)]
pub enum TrackedMode {
    InterArea,
    Pile,
    NearestTo(f64),
}

/// The two-area inter-area mode: (G1, G2) swing against (G3, G4).
pub fn inter_area_mode(dec: &ModalDecomposition) -> Option<usize> {
    group_opposition_mode(dec, &["G1", "G2"], &["G3", "G4"], 0.1, 1.5)
}

/// Oscillatory mode whose speed shape puts `group_a` in anti-phase with
/// `group_b`, with every member carrying weight.
pub fn group_opposition_mode(
    dec: &ModalDecomposition,
    group_a: &[&str],
    group_b: &[&str],
    f_lo: f64,
    f_hi: f64,
) -> Option<usize> {
    let pos = |label: &str| {
        dec.state_labels
            .iter()
            .position(|l| l == &format!("{label}.omega"))
    };
    let ia: Vec<usize> = group_a.iter().filter_map(|l| pos(l)).collect();
    let ib: Vec<usize> = group_b.iter().filter_map(|l| pos(l)).collect();
    if ia.len() != group_a.len() || ib.len() != group_b.len() {
        return None;
    }
    let mut best: Option<(usize, f64)> = None;
    for m in dec.oscillatory_in_band(f_lo, f_hi) {
        let all: Vec<num_complex::Complex64> = ia
            .iter()
            .chain(ib.iter())
            .map(|&i| dec.u_right[[i, m]])
            .collect();
        let max_mag = all.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if max_mag == 0.0 {
            continue;
        }
        // rotate so the first group-a member is real positive
        let rot = num_complex::Complex64::from_polar(
            1.0,
            -dec.u_right[[ia[0], m]].arg(),
        );
        let sa: Vec<f64> = ia
            .iter()
            .map(|&i| (dec.u_right[[i, m]] * rot).re / max_mag)
            .collect();
        let sb: Vec<f64> = ib
            .iter()
            .map(|&i| (dec.u_right[[i, m]] * rot).re / max_mag)
            .collect();
        if sa.iter().all(|&v| v > 0.05) && sb.iter().all(|&v| v < -0.05) {
            let weight = sa
                .iter()
                .map(|v| v.abs())
                .chain(sb.iter().map(|v| v.abs()))
                .fold(f64::INFINITY, f64::min);
            if best.map(|(_, w)| weight > w).unwrap_or(true) {
                best = Some((m, weight));
            }
        }
    }
    best.map(|(m, _)| m)
}

/// Oscillatory mode closest in frequency to `f_hz`.
pub fn nearest_mode(dec: &ModalDecomposition, f_hz: f64) -> Option<usize> {
    dec.oscillatory_in_band(0.01, 1e3)
        .into_iter()
        .min_by(|&a, &b| {
            let fa = (dec.lambda[a].im / (2.0 * std::f64::consts::PI) - f_hz).abs();
            let fb = (dec.lambda[b].im / (2.0 * std::f64::consts::PI) - f_hz).abs();
            fa.partial_cmp(&fb).unwrap()
        })
}

// ---------------------------------------------------------------------------
// Bundled scenarios
// ---------------------------------------------------------------------------

const BUNDLED: &[(&str, &str)] = &[
    ("kundur2area_base", include_str!("../../scenarios/kundur2area_base.json")),
    ("kundur2area_heavy", include_str!("../../scenarios/kundur2area_heavy.json")),
    ("kundur2area_sweep", include_str!("../../scenarios/kundur2area_sweep.json")),
    ("kundur_heavy_mma", include_str!("../../scenarios/kundur_heavy_mma.json")),
    ("kundur_base_mma", include_str!("../../scenarios/kundur_base_mma.json")),
    ("kundur_mma_miadrc", include_str!("../../scenarios/kundur_mma_miadrc.json")),
    ("pile_bench", include_str!("../../scenarios/pile_bench.json")),
    ("ieee39_mma", include_str!("../../scenarios/ieee39_mma.json")),
    ("ieee39_mma_miadrc", include_str!("../../scenarios/ieee39_mma_miadrc.json")),
];

/// Load a bundled scenario by name.
pub fn bundled_scenario(name: &str) -> Result<ScenarioFile> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, json)| ScenarioFile::from_json(json))
        .unwrap_or_else(|| {
            Err(Error::Config(format!(
                "unknown bundled scenario {name:?}; available: {:?}",
                bundled_names()
            )))
        })
}

pub fn bundled_names() -> Vec<&'static str> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

/// Bundled scenario names plus any `*.json` files in `user_dir`.
pub fn list_scenarios(user_dir: Option<&Path>) -> Vec<String> {
    let mut names: Vec<String> = bundled_names().iter().map(|s| s.to_string()).collect();
    if let Some(dir) = user_dir {
        if let Ok(entries) = std::fs::read_dir(dir) {
            for e in entries.flatten() {
                let p = e.path();
                if p.extension().map(|x| x == "json").unwrap_or(false) {
                    if let Some(stem) = p.file_stem().and_then(|s| s.to_str()) {
                        names.push(stem.to_string());
                    }
                }
            }
        }
    }
    names.sort();
    names.dedup();
    names
}
