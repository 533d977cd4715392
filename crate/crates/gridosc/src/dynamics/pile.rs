//! Electromechanical-scale model of an (aggregated) charging-pile converter:
//! PLL, outer power PI loops and first-order inner current loops.
//!
//! Frame convention: `u_gdq = v_grid * exp(-j theta_pll)` with
//! `(u_gd, u_gq) = (Re, Im)`, so the locked PLL drives `u_gd -> 0` and holds
//! the terminal voltage on the q axis. Currents are the currents drawn from
//! the grid; with `u_gd ~ 0`, `i_q` carries active power and `i_d` reactive.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PileParams {
    /// Active-power PI gains (act on `p_ref - p_e`, command `i_qref`).
    pub kp1: f64,
    pub ki1: f64,
    /// Reactive-power PI gains (act on `q_ref - q_e`, command `i_dref`).
    pub kp2: f64,
    pub ki2: f64,
    /// PLL PI gains.
    pub kp3: f64,
    pub ki3: f64,
    /// Inner current-loop time constants in seconds (q and d axis).
    pub tau1: f64,
    pub tau2: f64,
    pub q_ref: f64,
}

impl Default for PileParams {
    fn default() -> Self {
        // kp3/ki3 place the PLL mode near 1.37 Hz with damping ratio 0.28
        // against a stiff source; refine with the modal calibration routine.
        PileParams {
            kp1: 0.25,
            ki1: 1.0,
            kp2: 0.25,
            ki2: 1.0,
            kp3: 5.0,
            ki3: 80.0,
            tau1: 0.02,
            tau2: 0.02,
            q_ref: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct PileState {
    pub x_pll: f64,
    pub theta_pll: f64,
    /// Active PI integrator.
    pub x1: f64,
    pub i_d: f64,
    /// Reactive PI integrator.
    pub x2: f64,
    pub i_q: f64,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PileAlgebraic {
    pub u_gd: f64,
    pub u_gq: f64,
    pub p_e: f64,
    pub q_e: f64,
}

/// PLL-frame voltage and converter power at the terminal.
pub fn pile_algebraics(state: &PileState, grid_voltage: Complex64) -> PileAlgebraic {
    let u = grid_voltage * Complex64::from_polar(1.0, -state.theta_pll);
    let (u_gd, u_gq) = (u.re, u.im);
    PileAlgebraic {
        u_gd,
        u_gq,
        p_e: u_gd * state.i_d + u_gq * state.i_q,
        q_e: u_gq * state.i_d - u_gd * state.i_q,
    }
}

/// Current injected into the grid node by the pile (drawn current, negated,
/// rotated back to the network frame).
pub fn pile_injection(state: &PileState) -> Complex64 {
    -(Complex64::new(state.i_d, state.i_q) * Complex64::from_polar(1.0, state.theta_pll))
}

/// Six state derivatives of the converter model.
pub fn pile_derivatives(
    state: &PileState,
    params: &PileParams,
    p_ref: f64,
    grid_voltage: Complex64,
) -> PileState {
    let alg = pile_algebraics(state, grid_voltage);
    let i_qref = state.x1 + params.kp1 * (p_ref - alg.p_e);
    let i_dref = state.x2 + params.kp2 * (params.q_ref - alg.q_e);
    PileState {
        x_pll: -alg.u_gd,
        theta_pll: -params.kp3 * alg.u_gd + params.ki3 * state.x_pll,
        x1: params.ki1 * (p_ref - alg.p_e),
        i_d: (i_dref - state.i_d) / params.tau2,
        x2: params.ki2 * (params.q_ref - alg.q_e),
        i_q: (i_qref - state.i_q) / params.tau1,
    }
}

/// Steady state of the pile for a given terminal voltage and power draw.
pub fn pile_equilibrium(params: &PileParams, grid_voltage: Complex64, p0: f64) -> PileState {
    let theta = grid_voltage.arg() - std::f64::consts::FRAC_PI_2;
    let u_gq = grid_voltage.norm();
    let i_q = p0 / u_gq;
    let i_d = params.q_ref / u_gq;
    PileState { x_pll: 0.0, theta_pll: theta, x1: i_q, i_d, x2: i_d, i_q }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn equilibrium_is_a_fixed_point() {
        let p = PileParams::default();
        let v = Complex64::from_polar(0.98, 0.3);
        let st = pile_equilibrium(&p, v, 2.0);
        let alg = pile_algebraics(&st, v);
        assert_abs_diff_eq!(alg.u_gd, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(alg.p_e, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(alg.q_e, 0.0, epsilon = 1e-12);
        let dx = pile_derivatives(&st, &p, 2.0, v);
        for d in [dx.x_pll, dx.theta_pll, dx.x1, dx.i_d, dx.x2, dx.i_q] {
            assert_abs_diff_eq!(d, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn current_loop_reads_off_model() {
        // i_d offset below its reference by delta gives di_d/dt = delta/tau2
        let p = PileParams::default();
        let v = Complex64::new(0.0, 1.0); // u_gd = 0 frame when theta = 0
        let mut st = pile_equilibrium(&p, v, 1.0);
        let delta = 0.07;
        st.i_d -= delta;
        let dx = pile_derivatives(&st, &p, 1.0, v);
        // moving i_d changes q_e = u_gq * i_d, so i_dref shifts too
        let alg = pile_algebraics(&st, v);
        let i_dref = st.x2 + p.kp2 * (p.q_ref - alg.q_e);
        assert_abs_diff_eq!(dx.i_d, (i_dref - st.i_d) / p.tau2, epsilon = 1e-12);
        assert!(dx.i_d > 0.0);
    }

    #[test]
    fn injection_matches_power_at_terminal() {
        let p = PileParams::default();
        let v = Complex64::from_polar(1.01, -0.2);
        let st = pile_equilibrium(&p, v, 3.0);
        let s = v * pile_injection(&st).conj();
        // drawing 3 pu active means injecting -3 pu into the grid node
        assert_abs_diff_eq!(s.re, -3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn pll_convention_is_locally_stable() {
        // small theta perturbation must decay: the linearized PLL pair has
        // s^2 + kp3*|V| s + ki3*|V| characteristic
        let p = PileParams::default();
        let v = Complex64::new(0.2, 0.9);
        let mut st = pile_equilibrium(&p, v, 1.0);
        st.theta_pll += 0.05;
        let dx = pile_derivatives(&st, &p, 1.0, v);
        // u_gd > 0 for positive theta error, so theta rate is negative
        assert!(dx.theta_pll < 0.0);
        assert!(dx.x_pll < 0.0);
    }
}
