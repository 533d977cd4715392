//! Closed-form mean response of the modal system to the sinusoidal command.
//!
//! Each mode's zero-state response to `P cos(w t + phi)` is evaluated in
//! closed form and split into a decaying free part (terms in `e^{lambda t}`)
//! and a steady resonant part (terms in `e^{+-j w t}`).

use ndarray::Array2;
use num_complex::Complex64;

use super::super::attack::MmaCommand;
use crate::error::{Error, Result};
use crate::modal::ModalDecomposition;

/// Free/resonant split of the mean response with its coefficient tables.
#[derive(Clone, Debug)]
pub struct MeanResponsePrediction {
    pub time: Vec<f64>,
    /// Per output: decaying component series.
    pub free: Vec<Vec<f64>>,
    /// Per output: steady sinusoidal component series.
    pub resonant: Vec<Vec<f64>>,
    /// Pointwise sum of the two.
    pub total: Vec<Vec<f64>>,
    /// |coefficient| of mode i's free term in output k.
    pub a_coeff: Array2<f64>,
    /// Phase of mode i's free term in output k.
    pub alpha: Array2<f64>,
    /// Steady resonant amplitude per output: resonant_k = b cos(w t + beta).
    pub b_coeff: Vec<f64>,
    pub beta: Vec<f64>,
    pub output_labels: Vec<String>,
}

impl MeanResponsePrediction {
    /// Steady-state resonant amplitude of one output.
    pub fn steady_amplitude(&self, output: usize) -> f64 {
        self.b_coeff[output]
    }
}

/// Evaluate the mean response on a time grid. `p_a0_mean` is the mean
/// aggregated base command; the driving amplitude is `i_pct * p_a0_mean`.
pub fn mean_response(
    dec: &ModalDecomposition,
    attack: &MmaCommand,
    p_a0_mean: f64,
    t_grid: &[f64],
) -> Result<MeanResponsePrediction> {
    let w = attack.omega;
    let phi = attack.phi;
    let p_bar = attack.i_pct * p_a0_mean;
    let n = dec.n();
    let m = dec.phi.nrows();
    let jw = Complex64::new(0.0, w);

    for lam in &dec.lambda {
        if (lam - jw).norm() < 1e-12 || (lam + jw).norm() < 1e-12 {
            return Err(Error::UndampedResonance(format!("{lam}")));
        }
    }

    let ejphi = Complex64::from_polar(1.0, phi);
    // per-mode coefficients: free term c_free e^{lambda t}; resonant terms
    // -(P/2) psi [e^{j phi} e^{j w t}/(lambda - jw) + c.c.-like partner]
    let mut c_free = vec![Complex64::new(0.0, 0.0); n];
    let mut s_plus = vec![Complex64::new(0.0, 0.0); n];
    let mut s_minus = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let lam = dec.lambda[i];
        let gp = ejphi / (lam - jw);
        let gm = ejphi.conj() / (lam + jw);
        c_free[i] = 0.5 * p_bar * dec.psi[i] * (gp + gm);
        s_plus[i] = 0.5 * p_bar * dec.psi[i] * gp;
        s_minus[i] = 0.5 * p_bar * dec.psi[i] * gm;
    }

    let mut a_coeff = Array2::<f64>::zeros((m, n));
    let mut alpha = Array2::<f64>::zeros((m, n));
    let mut b_coeff = vec![0.0; m];
    let mut beta = vec![0.0; m];
    let mut resonant_plus = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..m {
        let mut rp = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let cf = dec.phi[[k, i]] * c_free[i];
            a_coeff[[k, i]] = cf.norm();
            alpha[[k, i]] = cf.arg();
            rp -= dec.phi[[k, i]] * s_plus[i];
        }
        resonant_plus[k] = rp;
        // resonant_k(t) = 2 Re(rp e^{j w t}) for a conjugate-closed mode set
        b_coeff[k] = 2.0 * rp.norm();
        beta[k] = rp.arg();
    }

    let mut free = vec![vec![0.0; t_grid.len()]; m];
    let mut resonant = vec![vec![0.0; t_grid.len()]; m];
    let mut total = vec![vec![0.0; t_grid.len()]; m];
    for (ti, &t) in t_grid.iter().enumerate() {
        let e_lam: Vec<Complex64> = dec
            .lambda
            .iter()
            .map(|lam| (lam * t).exp())
            .collect();
        for k in 0..m {
            let mut f = Complex64::new(0.0, 0.0);
            for i in 0..n {
                f += dec.phi[[k, i]] * c_free[i] * e_lam[i];
            }
            // the minus resonant branch is the conjugate partner of the plus
            // branch whenever the mode set is closed under conjugation; sum
            // both explicitly so non-physical test systems still work
            let mut r = Complex64::new(0.0, 0.0);
            let ejwt = Complex64::from_polar(1.0, w * t);
            for i in 0..n {
                r -= dec.phi[[k, i]] * (s_plus[i] * ejwt + s_minus[i] * ejwt.conj());
            }
            free[k][ti] = f.re;
            resonant[k][ti] = r.re;
            total[k][ti] = f.re + r.re;
        }
    }

    Ok(MeanResponsePrediction {
        time: t_grid.to_vec(),
        free,
        resonant,
        total,
        a_coeff,
        alpha,
        b_coeff,
        beta,
        output_labels: dec.output_labels.clone(),
    })
}
