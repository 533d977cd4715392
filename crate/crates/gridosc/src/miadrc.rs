//! Multi-index active disturbance rejection controller and its stability
//! analysis.
//!
//! The controller measures `y = c1*du_t + c2*domega + c3*dP_e` on one
//! machine and injects a supplementary exciter signal. It runs three
//! discrete blocks at a fixed period: a tracking differentiator, an extended
//! state observer that estimates the total disturbance, and a nonlinear
//! state feedback that cancels it.

use ndarray::{array, Array2};
use ndarray_linalg::Eig;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{GeneratorAlgebraic, GeneratorParams, GeneratorState, PowerSystem, SystemState};
use crate::error::{Error, Result};
use crate::oscillation::prony_identify;

/// Weights of the multi-index measurement.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MultiIndexCoeffs {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl MultiIndexCoeffs {
    /// Enforces the sign conditions that guarantee positive added damping:
    /// `c1 > 0` and `c2*c3 < 0`.
    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        if c1 <= 0.0 {
            return Err(Error::Config(format!("c1 = {c1} must be positive")));
        }
        if c2 * c3 >= 0.0 {
            return Err(Error::Config(format!(
                "c2*c3 = {} must be negative",
                c2 * c3
            )));
        }
        Ok(MultiIndexCoeffs { c1, c2, c3 })
    }
}

impl Default for MultiIndexCoeffs {
    fn default() -> Self {
        MultiIndexCoeffs { c1: 1.0, c2: -0.1, c3: 0.5 }
    }
}

/// Controller gains. `beta1..3` follow the bandwidth parameterization
/// `(3 w_c, 3 w_c^2, w_c^3)` when built through [`MiadrcGains::bandwidth`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MiadrcGains {
    /// Controller period in seconds.
    pub h: f64,
    /// NSF damping factor.
    pub c: f64,
    /// fhan speed factor shared by the TD and the NSF.
    pub r0: f64,
    /// TD setpoint.
    pub r_ref: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    /// Observer bandwidth in rad/s.
    pub w_c: f64,
    /// Input gain estimate; must be nonzero.
    pub b: f64,
}

impl MiadrcGains {
    /// Bandwidth-parameterized gain set.
    pub fn bandwidth(w_c: f64, h: f64, r0: f64, b: f64) -> Self {
        MiadrcGains {
            h,
            c: 0.5,
            r0,
            r_ref: 0.0,
            beta1: 3.0 * w_c,
            beta2: 3.0 * w_c * w_c,
            beta3: w_c * w_c * w_c,
            w_c,
            b,
        }
    }

    /// The published parameter set (h = 0.01, w_c = 100*pi, r0 = 0.01,
    /// b = 4600). With the forward-Euler observer of the discrete blocks
    /// this combination is unstable (`w_c * h` is far beyond the Euler
    /// stability region) and is kept only for reference; see
    /// `eso_spectral_radius`.
    pub fn paper_printed() -> Self {
        Self::bandwidth(100.0 * std::f64::consts::PI, 0.01, 0.01, 4600.0)
    }

    /// Spectral radius of the linear part of the discrete observer
    /// iteration. Values above 1 diverge.
    pub fn eso_spectral_radius(&self) -> f64 {
        let h = self.h;
        let m = array![
            [1.0 - h * self.beta1, h, 0.0],
            [-h * self.beta2, 1.0, h],
            [-h * self.beta3, 0.0, 1.0]
        ];
        let (vals, _) = m.eig().expect("3x3 eigenvalues");
        vals.iter().fold(0.0_f64, |a, v| a.max(v.norm()))
    }
}

impl Default for MiadrcGains {
    fn default() -> Self {
        // Stable working set at the 10 ms controller period: observer
        // bandwidth well inside the Euler region and enough fhan authority
        // to regulate the output.
        Self::bandwidth(40.0, 0.01, 20.0, 4600.0)
    }
}

/// Internal controller state. `enabled` mirrors the S1 switch; while open
/// the output is exactly zero and nothing updates.
#[derive(Clone, Copy, Debug, Default)]
pub struct MiadrcState {
    /// Tracking-differentiator states (v1, v2).
    pub td: (f64, f64),
    /// Observer states (chi1, chi2, chi3).
    pub eso: (f64, f64, f64),
    /// Previous pre-division control `u` fed back into the observer.
    pub last_u: f64,
    pub enabled: bool,
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Han's time-optimal synthesis function.
pub fn fhan(x1: f64, x2: f64, r: f64, h: f64) -> f64 {
    let d = r * h;
    let d0 = d * h;
    let y = x1 + h * x2;
    let a = if y.abs() > d0 {
        let a0 = (d * d + 8.0 * r * y.abs()).sqrt();
        x2 + sgn(y) * (a0 - d) / 2.0
    } else {
        x2 + y / h
    };
    if a.abs() > d {
        -r * sgn(a)
    } else {
        -r * a / d
    }
}

/// Multi-index measurement: weighted deviations of terminal voltage, speed
/// and electric power from their equilibrium values.
pub fn multi_index_output(
    state: &GeneratorState,
    alg: &GeneratorAlgebraic,
    eq_state: &GeneratorState,
    eq_alg: &GeneratorAlgebraic,
    coeffs: &MultiIndexCoeffs,
) -> f64 {
    coeffs.c1 * (alg.u_t - eq_alg.u_t)
        + coeffs.c2 * (state.omega - eq_state.omega)
        + coeffs.c3 * (alg.p_e - eq_alg.p_e)
}

/// One controller period: TD, ESO (with the one-step-delayed `u`), then
/// NSF. Returns `(u, u_e)`; a disabled controller returns zeros without
/// touching its state.
pub fn controller_step(
    state: &mut MiadrcState,
    gains: &MiadrcGains,
    y_measured: f64,
) -> (f64, f64) {
    if !state.enabled {
        return (0.0, 0.0);
    }
    let h = gains.h;

    let (v1, v2) = state.td;
    let fh = fhan(v1 - gains.r_ref, v2, gains.r0, h);
    state.td = (v1 + h * v2, v2 + h * fh);

    let (chi1, chi2, chi3) = state.eso;
    let e = chi1 - y_measured;
    state.eso = (
        chi1 + h * (chi2 - gains.beta1 * e),
        chi2 + h * (chi3 - gains.beta2 * e + state.last_u),
        chi3 + h * (-gains.beta3 * e),
    );

    let e1 = state.td.0 - state.eso.0;
    let e2 = state.td.1 - state.eso.1;
    let u = -fhan(e1, gains.c * e2, gains.r0, h) - state.eso.2;
    state.last_u = u;
    (u, u / gains.b)
}

/// Analytic partial derivatives of the machine's terminal voltage and
/// electric power with respect to its own transient EMF, evaluated from the
/// reduced-network sums at the given state. Non-machine retained nodes are
/// treated as fixed sources at their present voltages.
pub fn ut_pe_partials(
    system: &PowerSystem,
    state: &SystemState,
    machine: usize,
) -> Result<(f64, f64)> {
    let (alg, _) = crate::dynamics::network_interface(
        &state.gens,
        &system.gen_params,
        state.pile.as_ref(),
        &system.net,
    )?;
    let a = &alg[machine];
    if a.u_t == 0.0 {
        return Err(Error::Config("terminal voltage is zero; derivative singular".into()));
    }
    let yii = system.net.y[[machine, machine]];
    let (g_ii, b_ii) = (yii.re, yii.im);
    let p = &system.gen_params[machine];
    let e = state.gens[machine].e_qp;
    let dpe = a.i_q + e * g_ii;
    let dut = (p.x_dp * p.x_dp * a.i_q * g_ii
        + (e - p.x_dp * a.i_d) * (1.0 + p.x_dp * b_ii))
        / a.u_t;
    Ok((dut, dpe))
}

/// Input gain `b = (c1 du_t/dE' + c3 dP_e/dE') K_A / (T'_d0 T_A)` at the
/// operating point.
pub fn compute_b(
    system: &PowerSystem,
    state: &SystemState,
    machine: usize,
    coeffs: &MultiIndexCoeffs,
) -> Result<f64> {
    let (dut, dpe) = ut_pe_partials(system, state, machine)?;
    let p = &system.gen_params[machine];
    let b = (coeffs.c1 * dut + coeffs.c3 * dpe) * p.k_a / (p.t_d0p * p.t_a);
    if b == 0.0 {
        return Err(Error::Config("input gain b evaluates to zero".into()));
    }
    Ok(b)
}

/// Operating-point linearization constants of one machine against the rest
/// of the network: K1 = dPe/ddelta, K2 = dPe/dE', and the field-winding
/// constants K3 = dEq/dE', K4 = dEq/ddelta with Eq = E' + (x_d - x'_d) i_d.
#[derive(Clone, Copy, Debug)]
pub struct KConstants {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
}

/// K constants by central finite differences through the network interface.
pub fn k_constants(
    system: &PowerSystem,
    state: &SystemState,
    machine: usize,
) -> Result<KConstants> {
    let p = &system.gen_params[machine];
    let eval = |delta_shift: f64, e_shift: f64| -> Result<(f64, f64)> {
        let mut s = state.clone();
        s.gens[machine].delta += delta_shift;
        s.gens[machine].e_qp += e_shift;
        let (alg, _) = crate::dynamics::network_interface(
            &s.gens,
            &system.gen_params,
            s.pile.as_ref(),
            &system.net,
        )?;
        let a = &alg[machine];
        let eq_total = s.gens[machine].e_qp + (p.x_d - p.x_dp) * a.i_d;
        Ok((a.p_e, eq_total))
    };
    let h = 1e-6;
    let (pe_dp, eq_dp) = eval(h, 0.0)?;
    let (pe_dm, eq_dm) = eval(-h, 0.0)?;
    let (pe_ep, eq_ep) = eval(0.0, h)?;
    let (pe_em, eq_em) = eval(0.0, -h)?;
    Ok(KConstants {
        k1: (pe_dp - pe_dm) / (2.0 * h),
        k2: (pe_ep - pe_em) / (2.0 * h),
        k3: (eq_ep - eq_em) / (2.0 * h),
        k4: (eq_dp - eq_dm) / (2.0 * h),
    })
}

/// Zero-dynamics analysis of one machine under the output-zeroing exciter
/// law.
#[derive(Clone, Debug)]
pub struct ZeroDynamicsReport {
    /// Linearized zero-dynamics matrix over (ddelta, domega_pu, dE', dE_f).
    pub a1: Array2<f64>,
    pub k: KConstants,
    /// Controller-path damping coefficient at the stated frequency
    /// (torque per rad/s speed deviation).
    pub d_e: f64,
    /// Controller-path synchronizing coefficient at the stated frequency.
    pub k_e: f64,
    /// Frequency (rad/s) at which d_e and k_e were evaluated.
    pub w: f64,
    pub eigenvalues: Vec<Complex64>,
}

/// Assemble the zero-dynamics matrix and evaluate the frequency-domain
/// damping/synchronizing decomposition of the controller torque path.
pub fn zero_dynamics(
    params: &GeneratorParams,
    k: &KConstants,
    w: f64,
    coeffs: &MultiIndexCoeffs,
) -> Result<ZeroDynamicsReport> {
    if coeffs.c1 == 0.0 {
        return Err(Error::Config("c1 must be nonzero for the zero dynamics".into()));
    }
    let (c1, c2, c3) = (coeffs.c1, coeffs.c2, coeffs.c3);
    let w0 = params.omega0;
    let ka = params.k_a;
    let ta = params.t_a;
    let td0 = params.t_d0p;
    let tj = params.t_j;

    // speed state in per-unit; the c2 channel measures rad/s, hence the w0
    // factor on the exciter row
    let a1 = array![
        [0.0, w0, 0.0, 0.0],
        [-k.k1 / tj, -params.d / tj, -k.k2 / tj, 0.0],
        [-k.k4 / td0, 0.0, -k.k3 / td0, 1.0 / td0],
        [
            ka * c3 * k.k1 / (ta * c1),
            ka * c2 * w0 / (ta * c1),
            ka * c3 * k.k2 / (ta * c1),
            -1.0 / ta
        ]
    ];
    let (vals, _) = a1
        .eig()
        .map_err(|e| Error::LinearSolve(e.to_string()))?;

    let x = k.k3 - w * w * ta * td0 - ka * c3 * k.k2 / c1;
    let yv = k.k3 * ta + td0;
    let den = x * x + w * w * yv * yv;
    if den < 1e-30 {
        return Err(Error::Config(format!(
            "zero denominator in the damping decomposition at w = {w}"
        )));
    }
    let d_e = k.k2 * ka * ((c2 / c1) * x - (c3 / c1) * k.k1 * yv) / den;
    let k_e = k.k1 + k.k2 * ka * ((c3 / c1) * k.k1 * x + w * w * (c2 / c1) * yv) / den;

    Ok(ZeroDynamicsReport {
        a1,
        k: *k,
        d_e,
        k_e,
        w,
        eigenvalues: vals.to_vec(),
    })
}

/// Online oscillation detector driving the S1 switch.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DetectionConfig {
    /// Analysis window length in seconds.
    pub window_s: f64,
    /// Evaluation stride in seconds.
    pub stride_s: f64,
    /// Decimated sampling period fed to the identifier.
    pub sample_dt: f64,
    /// A mode counts as forced when |zeta| is below this.
    pub zeta_max: f64,
    /// Minimum oscillation amplitude (same units as the channel).
    pub amp_min: f64,
    /// Consecutive positive windows required to close S1.
    pub arm_count: usize,
    /// Consecutive negative windows required to reopen S1.
    pub release_count: usize,
    /// Prony model order.
    pub order: usize,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig {
            window_s: 2.0,
            stride_s: 1.0,
            sample_dt: 0.02,
            zeta_max: 0.02,
            amp_min: 0.05,
            arm_count: 2,
            release_count: 3,
            order: 8,
        }
    }
}

/// Single-window predicate: true when a sustained (near-undamped) oscillation
/// above the amplitude threshold is identified in the window.
pub fn detection_gate(window: &[f64], sample_dt: f64, cfg: &DetectionConfig) -> bool {
    if window.len() < 3 * cfg.order.max(2) {
        return false;
    }
    let mean = window.iter().sum::<f64>() / window.len() as f64;
    let detr: Vec<f64> = window.iter().map(|v| v - mean).collect();
    let swing = detr.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if swing < cfg.amp_min {
        return false;
    }
    match prony_identify(&detr, sample_dt, cfg.order) {
        Ok(res) => res.modes.iter().any(|m| {
            m.frequency > 0.05
                && m.damping_ratio.abs() < cfg.zeta_max
                && m.amplitude >= cfg.amp_min
        }),
        Err(_) => false,
    }
}

/// Stateful gate with arm/release hysteresis, fed one sample per simulation
/// step.
#[derive(Clone, Debug)]
pub struct DetectionGate {
    cfg: DetectionConfig,
    sample_steps: usize,
    stride_samples: usize,
    window_samples: usize,
    buf: Vec<f64>,
    since_eval: usize,
    hits: usize,
    misses: usize,
    engaged: bool,
}

impl DetectionGate {
    pub fn new(cfg: DetectionConfig, dt: f64) -> Result<Self> {
        let ratio = cfg.sample_dt / dt;
        if (ratio - ratio.round()).abs() > 1e-9 || ratio < 1.0 {
            return Err(Error::Config(format!(
                "detection sample_dt {} is not an integer multiple of dt {}",
                cfg.sample_dt, dt
            )));
        }
        let window_samples = (cfg.window_s / cfg.sample_dt).round() as usize;
        let stride_samples = (cfg.stride_s / cfg.sample_dt).round() as usize;
        if window_samples < 8 || stride_samples == 0 {
            return Err(Error::Config("detection window too short".into()));
        }
        Ok(DetectionGate {
            cfg,
            sample_steps: ratio.round() as usize,
            stride_samples,
            window_samples,
            buf: Vec::new(),
            since_eval: 0,
            hits: 0,
            misses: 0,
            engaged: false,
        })
    }

    /// Feed the monitored channel at simulation step `step`; returns the
    /// current S1 state.
    pub fn observe(&mut self, step: usize, value: f64) -> bool {
        if step % self.sample_steps != 0 {
            return self.engaged;
        }
        self.buf.push(value);
        if self.buf.len() > self.window_samples {
            let excess = self.buf.len() - self.window_samples;
            self.buf.drain(..excess);
        }
        self.since_eval += 1;
        if self.buf.len() == self.window_samples && self.since_eval >= self.stride_samples {
            self.since_eval = 0;
            let hit = detection_gate(&self.buf, self.cfg.sample_dt, &self.cfg);
            if hit {
                self.hits += 1;
                self.misses = 0;
            } else {
                self.misses += 1;
                self.hits = 0;
            }
            if !self.engaged && self.hits >= self.cfg.arm_count {
                self.engaged = true;
            } else if self.engaged && self.misses >= self.cfg.release_count {
                self.engaged = false;
            }
        }
        self.engaged
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn fhan_origin_is_fixed_point() {
        assert_eq!(fhan(0.0, 0.0, 0.01, 0.01), 0.0);
        assert_eq!(fhan(0.0, 0.0, 20.0, 0.01), 0.0);
    }

    #[test]
    fn fhan_linear_region_matches_branch_arithmetic() {
        // small x2 with x1 = 0 stays in the |y| <= d0 and |a| <= d region:
        // a = x2 + y/h = x2 + x2 = 2 x2 -> output -r (2 x2)/d = -2 x2 / h
        let (r, h) = (1.0_f64, 0.01_f64);
        let x2 = 1e-6;
        let d = r * h;
        let y = h * x2;
        assert!(y.abs() <= d * h);
        let a = x2 + y / h;
        assert!(a.abs() <= d);
        let expect = -r * a / d;
        assert_abs_diff_eq!(fhan(0.0, x2, r, h), expect, epsilon = 1e-18);
        assert_abs_diff_eq!(fhan(0.0, x2, r, h), -2.0 * x2 / h, epsilon = 1e-18);
    }

    #[test]
    fn fhan_saturates_at_r() {
        for (x1, r) in [(1e6, 0.01), (-1e6, 0.01), (1e9, 20.0)] {
            let v = fhan(x1, 0.0, r, 0.01);
            assert_abs_diff_eq!(v.abs(), r, epsilon = 0.0);
            assert_eq!(v.signum(), -x1.signum());
        }
    }

    proptest! {
        #[test]
        fn fhan_is_odd(x1 in -100.0f64..100.0, x2 in -50.0f64..50.0,
                       r in 0.01f64..50.0, h in 0.001f64..0.05) {
            let a = fhan(x1, x2, r, h);
            let b = fhan(-x1, -x2, r, h);
            prop_assert!((a + b).abs() < 1e-12 * r.max(1.0));
        }

        #[test]
        fn fhan_is_bounded_by_r(x1 in -1e4f64..1e4, x2 in -1e3f64..1e3,
                                r in 0.01f64..50.0) {
            prop_assert!(fhan(x1, x2, r, 0.01).abs() <= r + 1e-12);
        }
    }

    #[test]
    fn multi_index_examples() {
        let eq_state = GeneratorState { delta: 0.3, omega: 377.0, e_qp: 1.0, e_f: 1.5 };
        let eq_alg = GeneratorAlgebraic { i_d: 0.2, i_q: 0.5, u_t: 1.0, p_e: 0.9 };
        let coeffs = MultiIndexCoeffs::default();
        // at equilibrium -> 0
        assert_eq!(
            multi_index_output(&eq_state, &eq_alg, &eq_state, &eq_alg, &coeffs),
            0.0
        );
        // domega = 0.01, c2 = -0.1 -> -0.001
        let mut st = eq_state;
        st.omega += 0.01;
        assert_abs_diff_eq!(
            multi_index_output(&st, &eq_alg, &eq_state, &eq_alg, &coeffs),
            -0.001,
            epsilon = 1e-15
        );
        // du_t = 0.02 and dP_e = 0.1 with (1, -0.1, 0.5) -> 0.07
        let mut alg = eq_alg;
        alg.u_t += 0.02;
        alg.p_e += 0.1;
        assert_abs_diff_eq!(
            multi_index_output(&eq_state, &alg, &eq_state, &eq_alg, &coeffs),
            0.07,
            epsilon = 1e-15
        );
    }

    #[test]
    fn disabled_controller_is_inert() {
        let gains = MiadrcGains::default();
        let mut st = MiadrcState::default();
        for y in [0.0, 0.5, -2.0] {
            let (u, ue) = controller_step(&mut st, &gains, y);
            assert_eq!(u, 0.0);
            assert_eq!(ue, 0.0);
        }
        assert_eq!(st.eso, (0.0, 0.0, 0.0));
    }

    #[test]
    fn quiescent_loop_stays_at_zero() {
        let gains = MiadrcGains::default();
        let mut st = MiadrcState { enabled: true, ..Default::default() };
        for _ in 0..1000 {
            let (_, ue) = controller_step(&mut st, &gains, 0.0);
            assert_eq!(ue, 0.0);
        }
    }

    #[test]
    fn eso_recovers_constant_disturbance_on_double_integrator() {
        // plant: ydd = u + d, controller in the loop; chi3 must converge to
        // the disturbance estimate (-chi3 cancels d => chi3 -> d) within 5%
        // in half a second. Bandwidth-parameterized observer at w_c = 100 pi
        // with a period small enough for the Euler region.
        let wc = 100.0 * std::f64::consts::PI;
        let h = 2e-4;
        let gains = MiadrcGains::bandwidth(wc, h, 5.0, 1.0);
        let mut st = MiadrcState { enabled: true, ..Default::default() };
        let d = 0.8;
        let (mut y, mut ydot) = (0.0, 0.0);
        let mut u = 0.0;
        let mut t = 0.0;
        while t < 0.5 {
            let (un, _) = controller_step(&mut st, &gains, y);
            // integrate plant over one controller period with held input
            let acc = u + d;
            y += ydot * h + 0.5 * acc * h * h;
            ydot += acc * h;
            u = un;
            t += h;
        }
        assert!(
            (st.eso.2 - d).abs() < 0.05 * d.abs(),
            "chi3 = {} vs d = {}",
            st.eso.2,
            d
        );
        // and the regulated output is near zero
        assert!(y.abs() < 0.05);
    }

    #[test]
    fn eso_observation_error_decays_within_bandwidth_budget() {
        // |chi1 - y| on a sinusoidal signal falls below 1% of its amplitude
        // within 10/w_c seconds
        let wc = 100.0 * std::f64::consts::PI;
        let h = 1e-4;
        let gains = MiadrcGains::bandwidth(wc, h, 0.01, 1.0);
        let mut st = MiadrcState { enabled: true, ..Default::default() };
        let mut t = 0.0;
        let sig = |t: f64| (2.0 * t).sin();
        while t < 10.0 / wc {
            controller_step(&mut st, &gains, sig(t));
            t += h;
        }
        assert!((st.eso.0 - sig(t - h)).abs() < 0.01);
    }

    #[test]
    fn printed_parameter_set_is_euler_unstable() {
        let printed = MiadrcGains::paper_printed();
        assert!(
            printed.eso_spectral_radius() > 1.0,
            "w_c h = {} should overflow the Euler region",
            printed.w_c * printed.h
        );
        let working = MiadrcGains::default();
        assert!(working.eso_spectral_radius() < 1.0);
    }

    #[test]
    fn coeff_invariants_enforced() {
        assert!(MultiIndexCoeffs::new(1.0, -0.1, 0.5).is_ok());
        assert!(MultiIndexCoeffs::new(-1.0, -0.1, 0.5).is_err());
        assert!(MultiIndexCoeffs::new(1.0, 0.1, 0.5).is_err());
    }

    #[test]
    fn zero_dynamics_decoupled_case() {
        // c2 = c3 = 0 is outside the constructor's sign condition but the
        // analysis accepts raw coefficients: the controller path must vanish
        let params = GeneratorParams {
            t_j: 13.0,
            d: 9.0,
            t_d0p: 8.0,
            x_d: 1.8,
            x_dp: 0.3,
            x_q: 1.7,
            k_a: 120.0,
            t_a: 0.04,
            omega0: 2.0 * std::f64::consts::PI * 60.0,
            p_m0: 0.9,
            u_ref: 1.0,
        };
        let k = KConstants { k1: 1.2, k2: 1.3, k3: 2.4, k4: 1.5 };
        let coeffs = MultiIndexCoeffs { c1: 1.0, c2: 0.0, c3: 0.0 };
        let rep = zero_dynamics(&params, &k, 2.0 * std::f64::consts::PI * 0.6, &coeffs).unwrap();
        assert_abs_diff_eq!(rep.d_e, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rep.k_e, k.k1, epsilon = 1e-12);
        // exciter row loses the coupling terms
        assert_abs_diff_eq!(rep.a1[[3, 0]], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rep.a1[[3, 1]], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_dynamics_positive_damping_example() {
        // typical multimachine constants; fast high-gain exciter
        let params = GeneratorParams {
            t_j: 13.0,
            d: 0.0,
            t_d0p: 8.0,
            x_d: 1.8,
            x_dp: 0.3,
            x_q: 1.7,
            k_a: 50.0,
            t_a: 1e-4,
            omega0: 2.0 * std::f64::consts::PI * 60.0,
            p_m0: 0.9,
            u_ref: 1.0,
        };
        let k = KConstants { k1: 0.7, k2: 1.5, k3: 2.5, k4: 1.3 };
        let coeffs = MultiIndexCoeffs::default(); // c2 c3 = -0.05
        let rep = zero_dynamics(&params, &k, 2.0 * std::f64::consts::PI * 0.6, &coeffs).unwrap();
        assert!(rep.d_e > 0.0, "d_e = {}", rep.d_e);
    }

    #[test]
    fn zero_dynamics_eigenvalues_match_characteristic_polynomial() {
        // independent route: eliminate the states by hand into a quartic and
        // compare its roots (via the companion matrix) with eig(A1)
        let params = GeneratorParams {
            t_j: 13.0,
            d: 9.0,
            t_d0p: 8.0,
            x_d: 1.8,
            x_dp: 0.3,
            x_q: 1.7,
            k_a: 120.0,
            t_a: 0.04,
            omega0: 2.0 * std::f64::consts::PI * 60.0,
            p_m0: 0.9,
            u_ref: 1.0,
        };
        let k = KConstants { k1: 1.1, k2: 1.4, k3: 2.2, k4: 1.6 };
        let coeffs = MultiIndexCoeffs::default();
        let rep = zero_dynamics(&params, &k, 3.9, &coeffs).unwrap();

        let (w0, ka, ta, td0, tj, dd) =
            (params.omega0, params.k_a, params.t_a, params.t_d0p, params.t_j, params.d);
        let (c1, c2, c3) = (coeffs.c1, coeffs.c2, coeffs.c3);
        // swing: (tj/w0) s^2 + (dd/w0)... keep dE' elimination symbolic:
        // E'[(td0 s + k3)(ta s + 1) - ka c3 k2/c1]
        //   = delta[-k4(ta s + 1) + ka c3 k1/c1 + ka c2 s / c1]
        // swing: (tj s^2/w0 + dd s/w0 + k1) delta + k2 E' = 0
        // quartic: (tj s^2 + dd s + w0 k1) Dflux(s) + w0 k2 N(s) = 0
        let dflux = |s: Complex64| {
            (td0 * s + k.k3) * (ta * s + 1.0) - ka * c3 * k.k2 / c1
        };
        let nnum = |s: Complex64| {
            -k.k4 * (ta * s + 1.0) + ka * c3 * k.k1 / c1 + ka * c2 * s / c1
        };
        // expand coefficients numerically by sampling: a quartic has 5
        // coefficients; fit via evaluation at 5 points is overkill - instead
        // verify each eigenvalue is a root of the characteristic function
        for lam in &rep.eigenvalues {
            let s = *lam;
            let val = (tj * s * s + dd * s + w0 * k.k1) * dflux(s) + w0 * k.k2 * nnum(s);
            // scale by a typical magnitude of the polynomial
            let scale = (tj * s.norm_sqr() + w0 * k.k1) * (td0 * s.norm() + k.k3) * (ta * s.norm() + 1.0);
            assert!(
                val.norm() / scale.max(1.0) < 1e-8,
                "eigenvalue {s} is not a root: |p(s)| = {}",
                val.norm()
            );
        }
    }

    #[test]
    fn detection_rejects_flat_and_decaying_signals() {
        let cfg = DetectionConfig::default();
        let n = (cfg.window_s / cfg.sample_dt) as usize;
        let flat: Vec<f64> = vec![1.0; n];
        assert!(!detection_gate(&flat, cfg.sample_dt, &cfg));

        // decaying free oscillation, zeta = 0.1 at 0.6 Hz
        let zeta = 0.1_f64;
        let f = 0.6_f64;
        let wn = 2.0 * std::f64::consts::PI * f / (1.0 - zeta * zeta).sqrt();
        let sig: Vec<f64> = (0..n)
            .map(|k| {
                let t = k as f64 * cfg.sample_dt;
                0.5 * (-zeta * wn * t).exp() * (2.0 * std::f64::consts::PI * f * t).cos()
            })
            .collect();
        assert!(!detection_gate(&sig, cfg.sample_dt, &cfg));
    }

    #[test]
    fn detection_fires_on_sustained_oscillation_within_budget() {
        // 0.62 Hz, 0.5 pu forced oscillation starting at t = 1 s; the gate
        // must close within 4 s of onset
        let cfg = DetectionConfig::default();
        let dt = 1e-3;
        let mut gate = DetectionGate::new(cfg, dt).unwrap();
        let mut closed_at = None;
        for step in 0..8000 {
            let t = step as f64 * dt;
            let v = if t >= 1.0 {
                0.5 * (2.0 * std::f64::consts::PI * 0.62 * t).sin()
            } else {
                0.0
            };
            if gate.observe(step, v) && closed_at.is_none() {
                closed_at = Some(t);
            }
        }
        let t_on = closed_at.expect("gate never closed");
        assert!(t_on <= 5.0, "closed at {t_on} (> 1 + 4 s budget)");
    }

    #[test]
    fn detection_releases_after_quiet_windows() {
        let cfg = DetectionConfig::default();
        let dt = 1e-3;
        let mut gate = DetectionGate::new(cfg, dt).unwrap();
        let mut log = Vec::new();
        for step in 0..14000 {
            let t = step as f64 * dt;
            let v = if t < 6.0 {
                0.5 * (2.0 * std::f64::consts::PI * 0.62 * t).sin()
            } else {
                0.0
            };
            log.push(gate.observe(step, v));
        }
        assert!(log[5500], "gate should be closed during the oscillation");
        assert!(!log[13800], "gate should reopen after sustained quiet");
    }
}
