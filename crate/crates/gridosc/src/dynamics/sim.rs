//! Fixed-step simulation loop: attack schedule, per-machine defense
//! controllers and channel recording.

use super::{Integrator, PowerSystem, SimConfig, SystemState, Trace};
use crate::attack::{attack_reference, sample_base_load, LoadProcess, MmaCommand};
use crate::error::{Error, Result};
use crate::miadrc::{
    controller_step, multi_index_output, DetectionGate, MiadrcGains, MiadrcState,
    MultiIndexCoeffs,
};

pub use crate::miadrc::DetectionConfig;

/// When a controller closes its switch.
#[derive(Clone, Debug)]
pub enum Activation {
    /// Scripted enable time in seconds.
    At(f64),
    /// Online detection drives the switch.
    Auto(DetectionConfig),
}

#[derive(Clone, Debug)]
pub struct ControllerSetup {
    pub gains: MiadrcGains,
    pub coeffs: MultiIndexCoeffs,
    pub activation: Activation,
}

/// One time-domain experiment over an assembled system.
pub struct Simulation<'a> {
    pub system: &'a PowerSystem,
    pub attack: Option<MmaCommand>,
    pub load: LoadProcess,
    /// (machine index, controller) pairs.
    pub controllers: Vec<(usize, ControllerSetup)>,
}

impl<'a> Simulation<'a> {
    pub fn new(system: &'a PowerSystem) -> Self {
        let load = LoadProcess::constant(
            system.pile.as_ref().map(|p| p.base_load).unwrap_or(0.0),
        );
        Simulation { system, attack: None, load, controllers: Vec::new() }
    }
}

struct CtlRuntime {
    gen: usize,
    gains: MiadrcGains,
    coeffs: MultiIndexCoeffs,
    state: MiadrcState,
    activation: Activation,
    gate: Option<DetectionGate>,
    h_steps: usize,
}

enum Chan {
    GenState(usize, usize),
    GenPe(usize),
    GenVt(usize),
    GenId(usize),
    GenIq(usize),
    GenUe(usize),
    GenY(usize),
    GenCtl(usize, usize), // v1 v2 chi1 chi2 chi3
    PileState(usize),
    PilePe,
    PileQe,
    PileVbus,
    Pref,
}

fn resolve_channels(system: &PowerSystem, names: &[String]) -> Result<Vec<(String, Chan)>> {
    let mut out = Vec::with_capacity(names.len());
    for name in names {
        let (dev, sig) = name
            .split_once('.')
            .ok_or_else(|| Error::Config(format!("channel {name:?} lacks a '.' separator")))?;
        let chan = if dev == "pile" {
            if system.pile.is_none() {
                return Err(Error::Config(format!(
                    "channel {name:?} requested but the scenario has no pile"
                )));
            }
            match sig {
                "x_pll" => Chan::PileState(0),
                "theta_pll" => Chan::PileState(1),
                "x1" => Chan::PileState(2),
                "id" => Chan::PileState(3),
                "x2" => Chan::PileState(4),
                "iq" => Chan::PileState(5),
                "Pe" => Chan::PilePe,
                "Qe" => Chan::PileQe,
                "Vbus" => Chan::PileVbus,
                "Pref" => Chan::Pref,
                _ => {
                    return Err(Error::Config(format!("unknown pile signal {sig:?}")));
                }
            }
        } else {
            let g = system
                .gen_labels
                .iter()
                .position(|l| l == dev)
                .ok_or_else(|| Error::Config(format!("unknown device {dev:?}")))?;
            match sig {
                "delta" => Chan::GenState(g, 0),
                "omega" => Chan::GenState(g, 1),
                "Eqp" => Chan::GenState(g, 2),
                "Ef" => Chan::GenState(g, 3),
                "Pe" => Chan::GenPe(g),
                "Vt" => Chan::GenVt(g),
                "id" => Chan::GenId(g),
                "iq" => Chan::GenIq(g),
                "ue" => Chan::GenUe(g),
                "y" => Chan::GenY(g),
                "v1" => Chan::GenCtl(g, 0),
                "v2" => Chan::GenCtl(g, 1),
                "chi1" => Chan::GenCtl(g, 2),
                "chi2" => Chan::GenCtl(g, 3),
                "chi3" => Chan::GenCtl(g, 4),
                _ => {
                    return Err(Error::Config(format!("unknown generator signal {sig:?}")));
                }
            }
        };
        out.push((name.clone(), chan));
    }
    Ok(out)
}

fn default_channels(system: &PowerSystem) -> Vec<String> {
    let mut names = Vec::new();
    for l in &system.gen_labels {
        for s in ["Pe", "omega", "Vt", "delta", "ue"] {
            names.push(format!("{l}.{s}"));
        }
    }
    if system.pile.is_some() {
        for s in ["Pe", "Pref", "Vbus"] {
            names.push(format!("pile.{s}"));
        }
    }
    names
}

/// Run the experiment and record the requested channels at every step.
///
/// Deterministic for a fixed load-process seed. Controllers advance at their
/// own period, which must be an integer multiple of `dt`; their output is
/// held between updates.
pub fn simulate(sim: &Simulation, cfg: &SimConfig) -> Result<Trace> {
    if !(cfg.dt > 0.0 && cfg.dt <= 0.01) {
        return Err(Error::Config(format!("dt {} outside (0, 0.01]", cfg.dt)));
    }
    if cfg.t_end <= 0.0 {
        return Err(Error::Config("t_end must be positive".into()));
    }
    let system = sim.system;
    let dt = cfg.dt;
    let n_steps = (cfg.t_end / dt).round() as usize;

    // stochastic base command, sampled on the step grid plus one guard point
    let grid: Vec<f64> = (0..=n_steps + 1).map(|k| k as f64 * dt).collect();
    let base = sample_base_load(&sim.load, &grid);
    let base_at = |t: f64| -> f64 {
        let s = (t / dt).clamp(0.0, (base.len() - 1) as f64);
        let i = (s.floor() as usize).min(base.len() - 2);
        let frac = s - i as f64;
        base[i] * (1.0 - frac) + base[i + 1] * frac
    };
    let p_ref_at = |t: f64| -> f64 {
        let b = base_at(t);
        match &sim.attack {
            Some(cmd) => attack_reference(t, b, cmd),
            None => b,
        }
    };

    // controllers
    let mut ctls: Vec<CtlRuntime> = Vec::new();
    for (gen, setup) in &sim.controllers {
        if *gen >= system.n_gens() {
            return Err(Error::Config(format!("controller on unknown machine {gen}")));
        }
        let h = setup.gains.h;
        let ratio = h / dt;
        if (ratio - ratio.round()).abs() > 1e-9 || ratio < 1.0 {
            return Err(Error::Config(format!(
                "controller period {h} s is not an integer multiple of dt {dt} s"
            )));
        }
        let gate = match &setup.activation {
            Activation::Auto(cfg_det) => Some(DetectionGate::new(cfg_det.clone(), dt)?),
            Activation::At(_) => None,
        };
        ctls.push(CtlRuntime {
            gen: *gen,
            gains: setup.gains.clone(),
            coeffs: setup.coeffs,
            state: MiadrcState::default(),
            activation: setup.activation.clone(),
            gate,
            h_steps: ratio.round() as usize,
        });
    }

    let names = if cfg.record_signals.is_empty() {
        default_channels(system)
    } else {
        cfg.record_signals.clone()
    };
    let channels = resolve_channels(system, &names)?;

    let mut state = system.equilibrium.clone();
    let mut u_e = vec![0.0_f64; system.n_gens()];
    let mut time = Vec::with_capacity(n_steps + 1);
    let mut data: Vec<Vec<f64>> = channels.iter().map(|_| Vec::with_capacity(n_steps + 1)).collect();

    let record = |state: &SystemState,
                  t: f64,
                  u_e: &[f64],
                  ctls: &[CtlRuntime],
                  data: &mut [Vec<f64>]|
     -> Result<()> {
        let (gen_alg, pile_part) = system.algebraics(state)?;
        let p_ref_now = p_ref_at(t);
        for ((_, chan), col) in channels.iter().zip(data.iter_mut()) {
            let v = match chan {
                Chan::GenState(g, 0) => state.gens[*g].delta,
                Chan::GenState(g, 1) => state.gens[*g].omega,
                Chan::GenState(g, 2) => state.gens[*g].e_qp,
                Chan::GenState(g, _) => state.gens[*g].e_f,
                Chan::GenPe(g) => gen_alg[*g].p_e,
                Chan::GenVt(g) => gen_alg[*g].u_t,
                Chan::GenId(g) => gen_alg[*g].i_d,
                Chan::GenIq(g) => gen_alg[*g].i_q,
                Chan::GenUe(g) => u_e[*g],
                Chan::GenY(g) => multi_index_output(
                    &state.gens[*g],
                    &gen_alg[*g],
                    &system.equilibrium.gens[*g],
                    &system.eq_algebraics[*g],
                    &ctls
                        .iter()
                        .find(|c| c.gen == *g)
                        .map(|c| c.coeffs)
                        .unwrap_or_default(),
                ),
                Chan::GenCtl(g, j) => ctls
                    .iter()
                    .find(|c| c.gen == *g)
                    .map(|c| match j {
                        0 => c.state.td.0,
                        1 => c.state.td.1,
                        2 => c.state.eso.0,
                        3 => c.state.eso.1,
                        _ => c.state.eso.2,
                    })
                    .unwrap_or(0.0),
                Chan::PileState(j) => {
                    let p = state.pile.as_ref().expect("pile presence checked");
                    [p.x_pll, p.theta_pll, p.x1, p.i_d, p.x2, p.i_q][*j]
                }
                Chan::PilePe => pile_part.as_ref().map(|(a, _)| a.p_e).unwrap_or(0.0),
                Chan::PileQe => pile_part.as_ref().map(|(a, _)| a.q_e).unwrap_or(0.0),
                Chan::PileVbus => pile_part.as_ref().map(|(_, v)| v.norm()).unwrap_or(0.0),
                Chan::Pref => p_ref_now,
            };
            col.push(v);
        }
        Ok(())
    };

    record(&state, 0.0, &u_e, &ctls, &mut data)?;
    time.push(0.0);

    let mut x = state.to_vec();
    for step in 0..n_steps {
        let t = step as f64 * dt;

        // detection sampling and switch logic, then controller updates
        if !ctls.is_empty() {
            let (gen_alg, _) = system.algebraics(&state)?;
            for c in ctls.iter_mut() {
                let engaged = match &c.activation {
                    Activation::At(t_on) => t >= *t_on,
                    Activation::Auto(_) => {
                        let gate = c.gate.as_mut().expect("auto activation has a gate");
                        gate.observe(step, gen_alg[c.gen].p_e)
                    }
                };
                if engaged && !c.state.enabled {
                    c.state = MiadrcState::default();
                    c.state.enabled = true;
                } else if !engaged && c.state.enabled {
                    c.state = MiadrcState::default();
                    u_e[c.gen] = 0.0;
                }
                if c.state.enabled && step % c.h_steps == 0 {
                    let y = multi_index_output(
                        &state.gens[c.gen],
                        &gen_alg[c.gen],
                        &system.equilibrium.gens[c.gen],
                        &system.eq_algebraics[c.gen],
                        &c.coeffs,
                    );
                    let (_, ue) = controller_step(&mut c.state, &c.gains, y);
                    u_e[c.gen] = ue;
                }
            }
        }

        match cfg.integrator {
            Integrator::Rk4 => {
                let p0 = p_ref_at(t);
                let ph = p_ref_at(t + dt / 2.0);
                let p1 = p_ref_at(t + dt);
                let k1 = system.rhs_flat(&x, p0, &u_e)?;
                let x2: Vec<f64> = x.iter().zip(&k1).map(|(a, k)| a + dt / 2.0 * k).collect();
                let k2 = system.rhs_flat(&x2, ph, &u_e)?;
                let x3: Vec<f64> = x.iter().zip(&k2).map(|(a, k)| a + dt / 2.0 * k).collect();
                let k3 = system.rhs_flat(&x3, ph, &u_e)?;
                let x4: Vec<f64> = x.iter().zip(&k3).map(|(a, k)| a + dt * k).collect();
                let k4 = system.rhs_flat(&x4, p1, &u_e)?;
                for i in 0..x.len() {
                    x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
            Integrator::Trapezoidal => {
                let p0 = p_ref_at(t);
                let p1 = p_ref_at(t + dt);
                let f0 = system.rhs_flat(&x, p0, &u_e)?;
                // predictor then fixed-point corrections
                let mut xn: Vec<f64> =
                    x.iter().zip(&f0).map(|(a, k)| a + dt * k).collect();
                for _ in 0..4 {
                    let f1 = system.rhs_flat(&xn, p1, &u_e)?;
                    for i in 0..x.len() {
                        xn[i] = x[i] + dt / 2.0 * (f0[i] + f1[i]);
                    }
                }
                x = xn;
            }
        }

        let t_next = (step + 1) as f64 * dt;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { time: t_next });
        }
        state = system.equilibrium.from_vec(&x);
        record(&state, t_next, &u_e, &ctls, &mut data)?;
        time.push(t_next);
    }

    Ok(Trace {
        time,
        channels: names.into_iter().zip(data).collect(),
    })
}
