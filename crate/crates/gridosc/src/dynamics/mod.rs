//! Device models, network coupling and the fixed-step time-domain engine.

mod generator;
mod network;
mod pile;
mod sim;

pub use generator::{generator_derivatives, GeneratorAlgebraic, GeneratorParams, GeneratorState};
pub use network::{network_interface, ReducedNetwork};
pub use pile::{
    pile_algebraics, pile_derivatives, pile_equilibrium, pile_injection, PileAlgebraic,
    PileParams, PileState,
};
pub use sim::{simulate, Activation, ControllerSetup, DetectionConfig, Simulation};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{self, Branch, Bus, BusKind};

/// A synchronous machine to be placed at a network bus.
#[derive(Clone, Debug)]
pub struct MachineSpec {
    pub label: String,
    pub bus: usize,
    /// Scheduled active output in pu (ignored for the slack machine).
    pub p_set: f64,
    pub params: GeneratorParams,
}

/// An aggregated charging pile attached behind a filter reactance.
#[derive(Clone, Debug)]
pub struct PileSpec {
    pub bus: usize,
    /// Aggregated base charging load in system pu.
    pub base_load: f64,
    /// Series filter reactance in pu on the pile's own MVA base.
    pub filter_x: f64,
    pub params: PileParams,
}

/// Full device state of the assembled system.
#[derive(Clone, Debug)]
pub struct SystemState {
    pub gens: Vec<GeneratorState>,
    pub pile: Option<PileState>,
}

impl SystemState {
    pub fn dim(&self) -> usize {
        4 * self.gens.len() + if self.pile.is_some() { 6 } else { 0 }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.dim());
        for g in &self.gens {
            v.extend_from_slice(&[g.delta, g.omega, g.e_qp, g.e_f]);
        }
        if let Some(p) = &self.pile {
            v.extend_from_slice(&[p.x_pll, p.theta_pll, p.x1, p.i_d, p.x2, p.i_q]);
        }
        v
    }

    pub fn from_vec(&self, x: &[f64]) -> SystemState {
        let mut gens = Vec::with_capacity(self.gens.len());
        for k in 0..self.gens.len() {
            let o = 4 * k;
            gens.push(GeneratorState {
                delta: x[o],
                omega: x[o + 1],
                e_qp: x[o + 2],
                e_f: x[o + 3],
            });
        }
        let pile = self.pile.map(|_| {
            let o = 4 * self.gens.len();
            PileState {
                x_pll: x[o],
                theta_pll: x[o + 1],
                x1: x[o + 2],
                i_d: x[o + 3],
                x2: x[o + 4],
                i_q: x[o + 5],
            }
        });
        SystemState { gens, pile }
    }
}

/// Assembled dynamic model: machine parameters, the reduced network and the
/// power-flow-consistent equilibrium.
#[derive(Clone, Debug)]
pub struct PowerSystem {
    pub gen_params: Vec<GeneratorParams>,
    pub gen_labels: Vec<String>,
    pub pile: Option<PileSpec>,
    pub net: ReducedNetwork,
    pub equilibrium: SystemState,
    /// Algebraic quantities at the equilibrium (controller references).
    pub eq_algebraics: Vec<GeneratorAlgebraic>,
    /// Power-flow solution of the extended network (diagnostics).
    pub power_flow: net::PowerFlowSolution,
}

impl PowerSystem {
    /// Build the model from static network data: solve the power flow,
    /// initialize every device at its steady state, convert loads to
    /// constant shunt admittances and Kron-reduce to the dynamic nodes.
    pub fn assemble(
        buses: &[Bus],
        branches: &[Branch],
        loads: &[(usize, Complex64)],
        machines: &[MachineSpec],
        pile: Option<&PileSpec>,
    ) -> Result<PowerSystem> {
        let mut work: Vec<Bus> = buses.to_vec();
        let bus_pos = |id: usize, w: &[Bus]| -> Result<usize> {
            w.iter()
                .position(|b| b.id == id)
                .ok_or(Error::Config(format!("unknown bus id {id}")))
        };
        for &(bus, s) in loads {
            let i = bus_pos(bus, &work)?;
            work[i].p_inj -= s.re;
            work[i].q_inj -= s.im;
        }
        for m in machines {
            let i = bus_pos(m.bus, &work)?;
            if work[i].kind == BusKind::Pq {
                return Err(Error::Config(format!(
                    "machine {} at bus {} requires a PV or slack bus",
                    m.label, m.bus
                )));
            }
            if work[i].kind == BusKind::Pv {
                work[i].p_inj += m.p_set;
            }
        }

        let mut branches: Vec<Branch> = branches.to_vec();
        let max_id = work.iter().map(|b| b.id).max().unwrap_or(0);
        let conv_id = max_id + 1;
        if let Some(p) = pile {
            if p.base_load <= 0.0 {
                return Err(Error::Config("pile base load must be positive".into()));
            }
            bus_pos(p.bus, &work)?;
            let mut conv = Bus::pq(conv_id);
            conv.p_inj = -p.base_load;
            work.push(conv);
            let x_sys = p.filter_x / p.base_load;
            branches.push(Branch {
                from: p.bus,
                to: conv_id,
                series_z: Complex64::new(0.0, x_sys),
                charging_b: 0.0,
                tap: 1.0,
            });
        }

        let pf = net::solve_power_flow(&work, &branches, 1e-8, 50)?;

        // device initialization from terminal conditions
        let y_full = net::build_ybus(&work, &branches)?;
        let injections = pf.injections(&y_full);
        let mut gen_params = Vec::with_capacity(machines.len());
        let mut gen_labels = Vec::with_capacity(machines.len());
        let mut gen_states = Vec::with_capacity(machines.len());
        for m in machines {
            let i = bus_pos(m.bus, &work)?;
            let v = pf.v[i];
            // generator output = net injection plus the local load
            let mut s_gen = injections[i];
            for &(bus, s) in loads {
                if bus == m.bus {
                    s_gen += s;
                }
            }
            let cur = (s_gen / v).conj();
            let e = v + Complex64::new(0.0, m.params.x_dp) * cur;
            let delta0 = e.arg();
            let e_qp0 = e.norm();
            let rot = Complex64::from_polar(1.0, -(delta0 - std::f64::consts::FRAC_PI_2));
            let idq = cur * rot;
            let e_f0 = e_qp0 + (m.params.x_d - m.params.x_dp) * idq.re;
            let mut params = m.params;
            params.p_m0 = (e * cur.conj()).re;
            params.u_ref = v.norm() + e_f0 / params.k_a;
            gen_params.push(params);
            gen_labels.push(m.label.clone());
            gen_states.push(GeneratorState {
                delta: delta0,
                omega: params.omega0,
                e_qp: e_qp0,
                e_f: e_f0,
            });
        }

        // loads -> constant shunts at the operating point (pile load excluded:
        // the converter node keeps its dynamic injection)
        let mut reduced_buses = work.clone();
        for &(bus, s) in loads {
            let i = bus_pos(bus, &reduced_buses)?;
            reduced_buses[i].shunt += net::load_to_shunt(s, pf.v[i]);
        }
        // machine internal nodes behind x_dp
        let mut int_ids = Vec::with_capacity(machines.len());
        for (k, m) in machines.iter().enumerate() {
            let id = conv_id + 1 + k;
            int_ids.push(id);
            reduced_buses.push(Bus::pq(id));
            branches.push(Branch {
                from: id,
                to: m.bus,
                series_z: Complex64::new(0.0, m.params.x_dp),
                charging_b: 0.0,
                tap: 1.0,
            });
        }

        let mut keep: Vec<usize> = int_ids.clone();
        let mut pile_node = None;
        if pile.is_some() {
            pile_node = Some(keep.len());
            keep.push(conv_id);
        }
        // slack or PV buses without a machine stay as ideal sources
        let mut fixed = Vec::new();
        for b in &work {
            if b.kind != BusKind::Pq && !machines.iter().any(|m| m.bus == b.id) {
                fixed.push(b.id);
            }
        }
        let fixed_start = keep.len();
        keep.extend_from_slice(&fixed);

        let y_ext = net::build_ybus(&reduced_buses, &branches)?;
        let y_red = net::kron_reduce(&y_ext, &keep)?;
        let fixed_nodes: Vec<(usize, Complex64)> = fixed
            .iter()
            .enumerate()
            .map(|(k, &id)| {
                let i = work.iter().position(|b| b.id == id).unwrap();
                (fixed_start + k, pf.v[i])
            })
            .collect();
        let net = ReducedNetwork {
            y: y_red.y,
            n_gens: machines.len(),
            pile_node,
            fixed: fixed_nodes,
        };

        // pile equilibrium needs the converter-node voltage from the flow
        let pile_state = pile.map(|p| {
            let i = work.iter().position(|b| b.id == conv_id).unwrap();
            pile_equilibrium(&p.params, pf.v[i], p.base_load)
        });

        let equilibrium = SystemState { gens: gen_states, pile: pile_state };
        let (eq_algebraics, _) = network_interface(
            &equilibrium.gens,
            &gen_params,
            equilibrium.pile.as_ref(),
            &net,
        )?;

        Ok(PowerSystem {
            gen_params,
            gen_labels,
            pile: pile.cloned(),
            net,
            equilibrium,
            eq_algebraics,
            power_flow: pf,
        })
    }

    pub fn n_gens(&self) -> usize {
        self.gen_params.len()
    }

    pub fn dim(&self) -> usize {
        self.equilibrium.dim()
    }

    pub fn state_labels(&self) -> Vec<String> {
        let mut labels = Vec::with_capacity(self.dim());
        for l in &self.gen_labels {
            for s in ["delta", "omega", "Eqp", "Ef"] {
                labels.push(format!("{l}.{s}"));
            }
        }
        if self.pile.is_some() {
            for s in ["x_pll", "theta_pll", "x1", "id", "x2", "iq"] {
                labels.push(format!("pile.{s}"));
            }
        }
        labels
    }

    /// Stator and pile algebraics for a given state.
    pub fn algebraics(
        &self,
        state: &SystemState,
    ) -> Result<(Vec<GeneratorAlgebraic>, Option<(PileAlgebraic, Complex64)>)> {
        let (gen_alg, v_pile) = network_interface(
            &state.gens,
            &self.gen_params,
            state.pile.as_ref(),
            &self.net,
        )?;
        let pile_part = state
            .pile
            .as_ref()
            .map(|p| (pile_algebraics(p, v_pile), v_pile));
        Ok((gen_alg, pile_part))
    }

    /// Full state derivative. `p_ref` is the pile power command (ignored
    /// when no pile is present); `u_e` holds one supplementary exciter input
    /// per machine (empty slice means all zero).
    pub fn derivatives(
        &self,
        state: &SystemState,
        p_ref: f64,
        u_e: &[f64],
    ) -> Result<SystemState> {
        let (gen_alg, v_pile) = network_interface(
            &state.gens,
            &self.gen_params,
            state.pile.as_ref(),
            &self.net,
        )?;
        let mut gens = Vec::with_capacity(state.gens.len());
        for (k, st) in state.gens.iter().enumerate() {
            let ue = u_e.get(k).copied().unwrap_or(0.0);
            gens.push(generator_derivatives(st, &self.gen_params[k], &gen_alg[k], ue));
        }
        let pile = match (&state.pile, &self.pile) {
            (Some(ps), Some(spec)) => Some(pile_derivatives(ps, &spec.params, p_ref, v_pile)),
            _ => None,
        };
        Ok(SystemState { gens, pile })
    }

    /// Flat-vector RHS used by the integrators and the linearization.
    pub fn rhs_flat(&self, x: &[f64], p_ref: f64, u_e: &[f64]) -> Result<Vec<f64>> {
        let state = self.equilibrium.from_vec(x);
        Ok(self.derivatives(&state, p_ref, u_e)?.to_vec())
    }

    /// Max-norm of the derivative at the stored equilibrium; near zero for a
    /// healthy assembly.
    pub fn equilibrium_residual(&self) -> Result<f64> {
        let base = self.pile.as_ref().map(|p| p.base_load).unwrap_or(0.0);
        let dx = self.derivatives(&self.equilibrium, base, &[])?;
        Ok(dx.to_vec().iter().fold(0.0_f64, |a, v| a.max(v.abs())))
    }
}

/// Fixed-step integrator choice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    Rk4,
    Trapezoidal,
}

/// Time-domain run configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub t_end: f64,
    pub integrator: Integrator,
    /// Channels to record; empty selects a default set.
    #[serde(default)]
    pub record_signals: Vec<String>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 1e-3,
            t_end: 20.0,
            integrator: Integrator::Rk4,
            record_signals: Vec::new(),
        }
    }
}

/// Uniformly sampled named series.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trace {
    pub time: Vec<f64>,
    pub channels: Vec<(String, Vec<f64>)>,
}

impl Trace {
    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.channels
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn channel_names(&self) -> Vec<&str> {
        self.channels.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn dt(&self) -> f64 {
        if self.time.len() > 1 {
            self.time[1] - self.time[0]
        } else {
            0.0
        }
    }

    /// Peak-to-peak half amplitude of a channel over a window, measured
    /// about the window mean.
    pub fn amplitude(&self, name: &str, t0: f64, t1: f64) -> Option<f64> {
        let ch = self.channel(name)?;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (t, v) in self.time.iter().zip(ch.iter()) {
            if *t >= t0 && *t < t1 {
                lo = lo.min(*v);
                hi = hi.max(*v);
            }
        }
        if lo.is_finite() && hi.is_finite() {
            Some((hi - lo) / 2.0)
        } else {
            None
        }
    }

    /// Windowed copy of one channel.
    pub fn window(&self, name: &str, t0: f64, t1: f64) -> Option<Vec<f64>> {
        let ch = self.channel(name)?;
        Some(
            self.time
                .iter()
                .zip(ch.iter())
                .filter(|(t, _)| **t >= t0 && **t < t1)
                .map(|(_, v)| *v)
                .collect(),
        )
    }

    pub fn to_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "time")?;
        for (name, _) in &self.channels {
            write!(w, ",{name}")?;
        }
        writeln!(w)?;
        for (i, t) in self.time.iter().enumerate() {
            write!(w, "{t:.6}")?;
            for (_, v) in &self.channels {
                write!(w, ",{:.12e}", v[i])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.to_csv(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("CSV is valid UTF-8")
    }
}
