//! Reduced-network algebra coupling the devices.
//!
//! After Kron reduction the retained nodes are the generator internal nodes
//! (EMF sources `e_qp /_ delta` behind `x_dp`), the pile converter node
//! (a current injection with unknown voltage) and any ideal fixed-voltage
//! sources (slack buses without a machine model). With one unknown node
//! voltage the nodal solve is a single complex division.

use ndarray::Array2;
use num_complex::Complex64;

use super::generator::{GeneratorAlgebraic, GeneratorParams, GeneratorState};
use super::pile::{pile_injection, PileState};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct ReducedNetwork {
    /// Reduced admittance over [gen 0..m | pile node | fixed sources].
    pub y: Array2<Complex64>,
    pub n_gens: usize,
    /// Row/column of the pile converter node, if a pile is present.
    pub pile_node: Option<usize>,
    /// Fixed-voltage nodes (node index, phasor voltage).
    pub fixed: Vec<(usize, Complex64)>,
}

impl ReducedNetwork {
    fn source_voltages(
        &self,
        gen_states: &[GeneratorState],
        pile_state: Option<&PileState>,
    ) -> (Vec<Complex64>, Complex64) {
        let n = self.y.nrows();
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        for (k, st) in gen_states.iter().enumerate() {
            v[k] = Complex64::from_polar(st.e_qp, st.delta);
        }
        for &(idx, volt) in &self.fixed {
            v[idx] = volt;
        }
        let mut v_pile = Complex64::new(0.0, 0.0);
        if let (Some(p), Some(st)) = (self.pile_node, pile_state) {
            let inj = pile_injection(st);
            let mut acc = inj;
            for j in 0..n {
                if j != p {
                    acc -= self.y[[p, j]] * v[j];
                }
            }
            v_pile = acc / self.y[[p, p]];
            v[p] = v_pile;
        }
        (v, v_pile)
    }

    /// Voltage at the pile converter node for the given device states.
    pub fn pile_voltage(
        &self,
        gen_states: &[GeneratorState],
        pile_state: &PileState,
    ) -> Complex64 {
        self.source_voltages(gen_states, Some(pile_state)).1
    }
}

/// Solve the nodal equation for machine currents and stator quantities, plus
/// the pile-node voltage.
pub fn network_interface(
    gen_states: &[GeneratorState],
    gen_params: &[GeneratorParams],
    pile_state: Option<&PileState>,
    net: &ReducedNetwork,
) -> Result<(Vec<GeneratorAlgebraic>, Complex64)> {
    if gen_states.len() != net.n_gens {
        return Err(Error::Config(format!(
            "network expects {} machines, got {}",
            net.n_gens,
            gen_states.len()
        )));
    }
    let n = net.y.nrows();
    let (v, v_pile) = net.source_voltages(gen_states, pile_state);
    let mut out = Vec::with_capacity(net.n_gens);
    for k in 0..net.n_gens {
        let mut i = Complex64::new(0.0, 0.0);
        for j in 0..n {
            i += net.y[[k, j]] * v[j];
        }
        let e = v[k];
        // rotate into the machine frame: q axis along the rotor angle
        let rot = Complex64::from_polar(1.0, -(gen_states[k].delta - std::f64::consts::FRAC_PI_2));
        let idq = i * rot;
        let p_e = (e * i.conj()).re;
        let u_t = (e - Complex64::new(0.0, gen_params[k].x_dp) * i).norm();
        out.push(GeneratorAlgebraic { i_d: idq.re, i_q: idq.im, u_t, p_e });
    }
    Ok((out, v_pile))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn one_machine_net(x_total: f64) -> ReducedNetwork {
        // machine internal node behind x_total to an ideal source at node 1
        let y = 1.0 / Complex64::new(0.0, x_total);
        ReducedNetwork {
            y: array![[y, -y], [-y, y]],
            n_gens: 1,
            pile_node: None,
            fixed: vec![(1, Complex64::new(1.0, 0.0))],
        }
    }

    fn params() -> GeneratorParams {
        GeneratorParams {
            t_j: 13.0,
            d: 9.0,
            t_d0p: 8.0,
            x_d: 1.8,
            x_dp: 0.0, // x_dp folded into x_total here
            x_q: 1.7,
            k_a: 120.0,
            t_a: 0.04,
            omega0: 2.0 * std::f64::consts::PI * 60.0,
            p_m0: 0.0,
            u_ref: 1.0,
        }
    }

    #[test]
    fn zero_angle_equal_emf_gives_zero_current() {
        let net = one_machine_net(0.5);
        let st = GeneratorState {
            delta: 0.0,
            omega: 0.0,
            e_qp: 1.0,
            e_f: 0.0,
        };
        let (alg, _) = network_interface(&[st], &[params()], None, &net).unwrap();
        assert_abs_diff_eq!(alg[0].i_d, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(alg[0].i_q, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(alg[0].p_e, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn power_matches_textbook_sine_law() {
        let x = 0.4;
        let net = one_machine_net(x);
        let delta = 0.6_f64;
        let e = 1.2_f64;
        let st = GeneratorState { delta, omega: 0.0, e_qp: e, e_f: 0.0 };
        let (alg, _) = network_interface(&[st], &[params()], None, &net).unwrap();
        assert_abs_diff_eq!(alg[0].p_e, e * 1.0 * delta.sin() / x, epsilon = 1e-12);
    }

    #[test]
    fn appendix_trig_sums_agree_with_complex_solve() {
        // two machines and a fixed source over a random-ish reduced Y;
        // the classical polar-form sums are an independent route to i_d, i_q
        // and p_e.
        let y = array![
            [
                Complex64::new(0.8, -4.0),
                Complex64::new(-0.3, 1.5),
                Complex64::new(-0.2, 1.1)
            ],
            [
                Complex64::new(-0.3, 1.5),
                Complex64::new(0.9, -3.5),
                Complex64::new(-0.25, 0.9)
            ],
            [
                Complex64::new(-0.2, 1.1),
                Complex64::new(-0.25, 0.9),
                Complex64::new(0.7, -3.0)
            ]
        ];
        let vs = Complex64::from_polar(1.02, -0.1);
        let net = ReducedNetwork { y: y.clone(), n_gens: 2, pile_node: None, fixed: vec![(2, vs)] };
        let sts = [
            GeneratorState { delta: 0.45, omega: 0.0, e_qp: 1.1, e_f: 0.0 },
            GeneratorState { delta: -0.2, omega: 0.0, e_qp: 0.95, e_f: 0.0 },
        ];
        let ps = [params(), params()];
        let (alg, _) = network_interface(&sts, &ps, None, &net).unwrap();

        // oracle: I_di = sum_j |Y_ij| E_j sin(d_i - a_j - phi_ij),
        //         I_qi = sum_j |Y_ij| E_j cos(d_i - a_j - phi_ij)
        // where a_j is the source angle (rotor angle or fixed-source angle)
        let e_mag = [sts[0].e_qp, sts[1].e_qp, vs.norm()];
        let e_ang = [sts[0].delta, sts[1].delta, vs.arg()];
        for i in 0..2 {
            let mut i_d = 0.0;
            let mut i_q = 0.0;
            for j in 0..3 {
                let ymag = y[[i, j]].norm();
                let phi = y[[i, j]].arg();
                i_d += ymag * e_mag[j] * (e_ang[i] - e_ang[j] - phi).sin();
                i_q += ymag * e_mag[j] * (e_ang[i] - e_ang[j] - phi).cos();
            }
            assert_abs_diff_eq!(alg[i].i_d, i_d, epsilon = 1e-12);
            assert_abs_diff_eq!(alg[i].i_q, i_q, epsilon = 1e-12);
            // p_e = E_q * I_q in this frame (no saliency in the coupling)
            assert_abs_diff_eq!(alg[i].p_e, e_mag[i] * i_q, epsilon = 1e-12);
        }
    }
}
