//! Third-order synchronous machine with a first-order static exciter.
//!
//! States: rotor angle delta (rad), speed omega (rad/s), transient EMF e_qp
//! (pu) and field voltage e_f (pu). The exciter accepts a supplementary
//! input `u_e` used by the defense controller.

use serde::{Deserialize, Serialize};

/// Machine and exciter constants, all on the system MVA base.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GeneratorParams {
    /// Inertia constant T_j = 2H in seconds.
    pub t_j: f64,
    /// Damping torque coefficient (pu torque per pu speed deviation).
    pub d: f64,
    /// d-axis transient open-circuit time constant in seconds.
    pub t_d0p: f64,
    pub x_d: f64,
    pub x_dp: f64,
    pub x_q: f64,
    /// Exciter gain (>= 1).
    pub k_a: f64,
    /// Exciter time constant in seconds.
    pub t_a: f64,
    /// Synchronous speed in rad/s.
    pub omega0: f64,
    /// Mechanical power input, fixed at the initial operating point.
    pub p_m0: f64,
    /// AVR voltage reference.
    pub u_ref: f64,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct GeneratorState {
    pub delta: f64,
    pub omega: f64,
    pub e_qp: f64,
    pub e_f: f64,
}

/// Stator/network quantities at one machine, in the machine dq frame.
#[derive(Clone, Copy, Debug, Default)]
pub struct GeneratorAlgebraic {
    pub i_d: f64,
    pub i_q: f64,
    pub u_t: f64,
    pub p_e: f64,
}

/// Machine state derivative. `u_e` is the supplementary exciter input
/// (zero when no defense controller acts on this machine).
pub fn generator_derivatives(
    state: &GeneratorState,
    params: &GeneratorParams,
    alg: &GeneratorAlgebraic,
    u_e: f64,
) -> GeneratorState {
    let dw = state.omega - params.omega0;
    GeneratorState {
        delta: dw,
        omega: params.omega0 / params.t_j * (params.p_m0 - alg.p_e) - params.d / params.t_j * dw,
        e_qp: (-(state.e_qp + (params.x_d - params.x_dp) * alg.i_d) + state.e_f) / params.t_d0p,
        e_f: (-state.e_f + params.k_a * (params.u_ref - alg.u_t)) / params.t_a
            + params.k_a / params.t_a * u_e,
    }
}
