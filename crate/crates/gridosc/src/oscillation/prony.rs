//! Classical Prony identification: linear prediction, polynomial rooting via
//! the companion matrix, then amplitude/phase least squares.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, LeastSquaresSvd};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PronyMode {
    pub frequency: f64,
    pub damping_ratio: f64,
    /// Real oscillation amplitude (peak) of this component.
    pub amplitude: f64,
    pub phase: f64,
    /// Continuous-time eigenvalue.
    pub lambda_re: f64,
    pub lambda_im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PronyResult {
    /// Modes sorted by amplitude, largest first.
    pub modes: Vec<PronyMode>,
    /// Relative fit energy error ||y - yhat|| / ||y||.
    pub fit_residual: f64,
    pub effective_order: usize,
    pub warnings: Vec<String>,
}

/// Identify damped sinusoids in a uniformly sampled signal.
pub fn prony_identify(signal: &[f64], dt: f64, order: usize) -> Result<PronyResult> {
    if dt <= 0.0 {
        return Err(Error::Config("sample period must be positive".into()));
    }
    if order == 0 || 3 * order > signal.len() {
        return Err(Error::Config(format!(
            "model order {order} too large for {} samples",
            signal.len()
        )));
    }
    let mut warnings = Vec::new();
    let mut p = order;
    loop {
        match prony_at_order(signal, dt, p) {
            Ok(res) if res.fit_residual.is_finite() => {
                return Ok(PronyResult { warnings, ..res });
            }
            _ if p > 2 => {
                warnings.push(format!("rank deficiency at order {p}; reduced"));
                p -= 1;
            }
            Err(e) => return Err(e),
            Ok(res) => return Ok(PronyResult { warnings, ..res }),
        }
    }
}

fn prony_at_order(signal: &[f64], dt: f64, p: usize) -> Result<PronyResult> {
    let n = signal.len();
    let rows = n - p;
    let mut m = Array2::<f64>::zeros((rows, p));
    let mut rhs = Array1::<f64>::zeros(rows);
    for r in 0..rows {
        for c in 0..p {
            m[[r, c]] = signal[p + r - 1 - c];
        }
        rhs[r] = signal[p + r];
    }
    let sol = m
        .least_squares(&rhs)
        .map_err(|e| Error::LinearSolve(e.to_string()))?;
    let a = sol.solution;

    // roots of z^p - a0 z^{p-1} - ... - a_{p-1} via the companion matrix
    let mut comp = Array2::<f64>::zeros((p, p));
    for c in 0..p {
        comp[[0, c]] = a[c];
    }
    for r in 1..p {
        comp[[r, r - 1]] = 1.0;
    }
    let (roots, _) = comp
        .eig()
        .map_err(|e| Error::LinearSolve(e.to_string()))?;

    // amplitude/phase least squares on the complex Vandermonde
    let mut v = Array2::<Complex64>::zeros((n, p));
    for (k, z) in roots.iter().enumerate() {
        let mut zn = Complex64::new(1.0, 0.0);
        for r in 0..n {
            v[[r, k]] = zn;
            zn *= z;
        }
    }
    let y: Array1<Complex64> = signal.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let bsol = v
        .least_squares(&y)
        .map_err(|e| Error::LinearSolve(e.to_string()))?;
    let b = bsol.solution;

    let mut energy = 0.0;
    let mut err = 0.0;
    for r in 0..n {
        let mut fit = Complex64::new(0.0, 0.0);
        for k in 0..p {
            fit += b[k] * v[[r, k]];
        }
        let e = signal[r] - fit.re;
        err += e * e;
        energy += signal[r] * signal[r];
    }
    let fit_residual = if energy > 0.0 { (err / energy).sqrt() } else { 0.0 };

    let mut modes = Vec::new();
    for (k, z) in roots.iter().enumerate() {
        if z.norm() < 1e-12 {
            continue;
        }
        let lam = z.ln() / dt;
        if lam.im < -1e-9 {
            continue; // conjugate partner reported once
        }
        let oscillatory = lam.im > 1e-9;
        let amplitude = if oscillatory { 2.0 * b[k].norm() } else { b[k].re.abs() };
        modes.push(PronyMode {
            frequency: lam.im / (2.0 * std::f64::consts::PI),
            damping_ratio: if lam.norm() > 0.0 { -lam.re / lam.norm() } else { 0.0 },
            amplitude,
            phase: b[k].arg(),
            lambda_re: lam.re,
            lambda_im: lam.im,
        });
    }
    modes.sort_by(|a, b| b.amplitude.partial_cmp(&a.amplitude).unwrap());
    Ok(PronyResult { modes, fit_residual, effective_order: p, warnings: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_damped_cosine_is_recovered() {
        let dt = 0.02;
        let f = 1.37;
        let alpha = -0.3;
        let sig: Vec<f64> = (0..400)
            .map(|k| {
                let t = k as f64 * dt;
                (alpha * t).exp() * (2.0 * std::f64::consts::PI * f * t).cos()
            })
            .collect();
        let res = prony_identify(&sig, dt, 2).unwrap();
        assert!(res.fit_residual < 1e-9);
        let m = &res.modes[0];
        assert_abs_diff_eq!(m.frequency, f, epsilon = 1e-6);
        let wn = (alpha * alpha + (2.0 * std::f64::consts::PI * f).powi(2)).sqrt();
        assert_abs_diff_eq!(m.damping_ratio, -alpha / wn, epsilon = 1e-6);
        assert_abs_diff_eq!(m.damping_ratio, 0.0348, epsilon = 1e-3);
        assert_abs_diff_eq!(m.amplitude, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn two_tone_signal_separates() {
        let dt = 0.01;
        let sig: Vec<f64> = (0..800)
            .map(|k| {
                let t = k as f64 * dt;
                0.8 * (-0.1 * t).exp() * (2.0 * std::f64::consts::PI * 0.62 * t).sin()
                    + 0.3 * (-0.5 * t).exp() * (2.0 * std::f64::consts::PI * 1.37 * t).cos()
            })
            .collect();
        let res = prony_identify(&sig, dt, 4).unwrap();
        assert!(res.fit_residual < 1e-8);
        let freqs: Vec<f64> = res.modes.iter().map(|m| m.frequency).collect();
        assert!(freqs.iter().any(|&f| (f - 0.62).abs() < 1e-4));
        assert!(freqs.iter().any(|&f| (f - 1.37).abs() < 1e-4));
        // sorted by amplitude: the 0.62 Hz tone dominates
        assert_abs_diff_eq!(res.modes[0].frequency, 0.62, epsilon = 1e-4);
    }

    #[test]
    fn white_noise_leaves_large_residual() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let sig: Vec<f64> = (0..600).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let res = prony_identify(&sig, 0.02, 6).unwrap();
        assert!(
            res.fit_residual > 0.5,
            "noise should not fit: residual {}",
            res.fit_residual
        );
        // and nothing that looks like a clean sustained mode of size
        for m in &res.modes {
            assert!(!(m.amplitude > 1.5 && m.damping_ratio.abs() < 0.01));
        }
    }

    #[test]
    fn order_precondition_is_enforced() {
        let sig = vec![0.0; 30];
        assert!(prony_identify(&sig, 0.01, 11).is_err());
        assert!(prony_identify(&sig, 0.01, 0).is_err());
    }

    #[test]
    fn round_trip_recovers_synthesized_modes_to_six_figures() {
        // synthesize from known (lambda, amplitude, phase), identify, compare
        let dt = 0.01;
        let truth = [
            (-0.12, 2.0 * std::f64::consts::PI * 0.6, 1.0, 0.3),
            (-0.35, 2.0 * std::f64::consts::PI * 1.4, 0.4, -1.1),
        ];
        let sig: Vec<f64> = (0..1500)
            .map(|k| {
                let t = k as f64 * dt;
                truth
                    .iter()
                    .map(|&(a, w, amp, ph)| amp * (a * t).exp() * (w * t + ph).cos())
                    .sum()
            })
            .collect();
        let res = prony_identify(&sig, dt, 4).unwrap();
        for &(a, w, amp, _) in &truth {
            let f = w / (2.0 * std::f64::consts::PI);
            let m = res
                .modes
                .iter()
                .find(|m| (m.frequency - f).abs() < 1e-4)
                .expect("mode found");
            assert_abs_diff_eq!(m.lambda_re, a, epsilon = 1e-6 * a.abs().max(1.0));
            assert_abs_diff_eq!(m.amplitude, amp, epsilon = 1e-6 * amp);
        }
    }
}
