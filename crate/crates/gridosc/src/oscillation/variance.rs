//! Pseudo-excitation variance of the stochastic response: the single-mode
//! (SRS) term and the cross-mode (CQC) term oscillating at twice the attack
//! frequency.
//!
//! `sigma` is the standard deviation of the modulated stochastic command
//! deviation and `w_bandwidth` its one-sided bandwidth in rad/s. The SRS
//! term uses the resonant-band approximation evaluated at
//! `Omega = omega_i -+ omega`; its accuracy is best for mode decay rates
//! near 2/pi (see the quadrature cross-check in the tests).

use num_complex::Complex64;

use super::super::attack::MmaCommand;
use crate::error::{Error, Result};
use crate::modal::ModalDecomposition;

/// Pair tolerance for the CQC set: |w_i - w_j - 2 w| below this joins the
/// pair set.
pub const CQC_PAIR_TOL: f64 = 0.05;

/// SRS + CQC variance series for one output channel.
#[derive(Clone, Debug)]
pub struct VariancePrediction {
    pub time: Vec<f64>,
    pub sigma_sq_srs: Vec<f64>,
    pub sigma_sq_cqc: Vec<f64>,
    /// Cross coefficients of the contributing pairs.
    pub xi: Vec<Complex64>,
    /// The pair set: indices into the decomposition's mode list.
    pub mode_pair_set: Vec<(usize, usize)>,
}

impl VariancePrediction {
    pub fn total(&self) -> Vec<f64> {
        self.sigma_sq_srs
            .iter()
            .zip(&self.sigma_sq_cqc)
            .map(|(a, b)| a + b)
            .collect()
    }
}

/// `(1 - e^{alpha t}) / alpha` with its `alpha -> 0` limit.
fn growth(alpha: f64, t: f64) -> f64 {
    if alpha.abs() < 1e-12 {
        t
    } else {
        (1.0 - (alpha * t).exp()) / alpha
    }
}

fn coupling_scale(dec: &ModalDecomposition, output: usize) -> f64 {
    (0..dec.n())
        .map(|i| (dec.phi[[output, i]] * dec.psi[i]).norm())
        .fold(0.0, f64::max)
}

fn check_stability(dec: &ModalDecomposition, output: usize) -> Result<()> {
    let scale = coupling_scale(dec, output);
    for i in 0..dec.n() {
        let coupled = (dec.phi[[output, i]] * dec.psi[i]).norm() > 1e-9 * scale;
        if coupled && dec.lambda[i].re >= 0.0 {
            return Err(Error::UnstableMode(
                format!("{}", dec.lambda[i]),
                dec.lambda[i].re,
            ));
        }
    }
    Ok(())
}

/// Single-mode variance term:
/// `sigma^2/(2W) * sum_i |Phi_ki|^2 |Psi_i|^2 (1 - e^{alpha_i t})^2 / alpha_i^2`.
pub fn variance_srs(
    dec: &ModalDecomposition,
    _attack: &MmaCommand,
    sigma: f64,
    w_bandwidth: f64,
    t_grid: &[f64],
    output: usize,
) -> Result<Vec<f64>> {
    if sigma < 0.0 {
        return Err(Error::Config("sigma must be nonnegative".into()));
    }
    if sigma == 0.0 {
        return Ok(vec![0.0; t_grid.len()]);
    }
    check_stability(dec, output)?;
    let pref = sigma * sigma / (2.0 * w_bandwidth);
    let scale = coupling_scale(dec, output);
    let mut out = vec![0.0; t_grid.len()];
    for i in 0..dec.n() {
        let c = (dec.phi[[output, i]] * dec.psi[i]).norm_sqr();
        if c <= (1e-9 * scale) * (1e-9 * scale) {
            continue;
        }
        let alpha = dec.lambda[i].re;
        for (k, &t) in t_grid.iter().enumerate() {
            let g = growth(alpha, t);
            out[k] += pref * c * g * g;
        }
    }
    Ok(out)
}

/// Cross-mode variance term over the pair set
/// `Xi = {(i, j) : |w_i - w_j - 2 w| < tol}`, oscillating at `2 w`:
/// `sigma^2/(2W) |xi_ij| (1 - e^{alpha_i t})^2 / alpha_i^2 cos(2 w t - arg xi_ij)`
/// with `xi_ij = Phi*_ki Psi*_i Psi_j Phi_kj`.
pub fn variance_cqc(
    dec: &ModalDecomposition,
    attack: &MmaCommand,
    sigma: f64,
    w_bandwidth: f64,
    t_grid: &[f64],
    output: usize,
) -> Result<VariancePrediction> {
    if sigma < 0.0 {
        return Err(Error::Config("sigma must be nonnegative".into()));
    }
    let srs = variance_srs(dec, attack, sigma, w_bandwidth, t_grid, output)?;
    let mut cqc = vec![0.0; t_grid.len()];
    let mut xi_list = Vec::new();
    let mut pairs = Vec::new();
    if sigma > 0.0 {
        let pref = sigma * sigma / (2.0 * w_bandwidth);
        let scale = coupling_scale(dec, output);
        let two_w = 2.0 * attack.omega;
        for i in 0..dec.n() {
            for j in 0..dec.n() {
                if i == j {
                    continue;
                }
                let wi = dec.lambda[i].im;
                let wj = dec.lambda[j].im;
                if (wi - wj - two_w).abs() >= CQC_PAIR_TOL {
                    continue;
                }
                let xi = dec.phi[[output, i]].conj()
                    * dec.psi[i].conj()
                    * dec.psi[j]
                    * dec.phi[[output, j]];
                if xi.norm() <= (1e-9 * scale) * (1e-9 * scale) {
                    continue;
                }
                let alpha = dec.lambda[i].re;
                if alpha >= 0.0 {
                    return Err(Error::UnstableMode(
                        format!("{}", dec.lambda[i]),
                        alpha,
                    ));
                }
                for (k, &t) in t_grid.iter().enumerate() {
                    let g = growth(alpha, t);
                    cqc[k] += pref * xi.norm() * g * g * (two_w * t - xi.arg()).cos();
                }
                xi_list.push(xi);
                pairs.push((i, j));
            }
        }
    }
    Ok(VariancePrediction {
        time: t_grid.to_vec(),
        sigma_sq_srs: srs,
        sigma_sq_cqc: cqc,
        xi: xi_list,
        mode_pair_set: pairs,
    })
}
