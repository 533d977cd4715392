//! Monte Carlo cross-validation of the stochastic response statistics.

use ndarray::Array1;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::attack::{sample_base_load, LoadProcess};
use crate::dynamics::{simulate, SimConfig, Simulation};
use crate::error::{Error, Result};
use crate::modal::ModalDecomposition;

/// Deterministic per-trial seed derivation (splitmix64 over the master
/// seed and the trial index).
pub fn trial_seed(master: u64, trial: usize) -> u64 {
    let mut z = master
        .wrapping_add(0x9E37_79B9_7F4A_7C15_u64.wrapping_mul(trial as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Run the nonlinear simulation `n_trials` times with independent load
/// seeds; return the pointwise sample mean and unbiased sample variance of
/// one recorded channel.
pub fn monte_carlo_variance(
    sim: &Simulation,
    channel: &str,
    cfg: &SimConfig,
    n_trials: usize,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if n_trials < 2 {
        return Err(Error::Config("need at least two Monte Carlo trials".into()));
    }
    let mut cfg = cfg.clone();
    if !cfg.record_signals.contains(&channel.to_string()) {
        cfg.record_signals.push(channel.to_string());
    }
    let runs: Vec<Result<Vec<f64>>> = (0..n_trials)
        .into_par_iter()
        .map(|k| {
            let mut load = sim.load;
            load.seed = trial_seed(seed, k);
            let trial = Simulation {
                system: sim.system,
                attack: sim.attack,
                load,
                controllers: sim.controllers.clone(),
            };
            let trace = simulate(&trial, &cfg).map_err(|e| Error::TrialDiverged {
                trial: k,
                source: Box::new(e),
            })?;
            Ok(trace
                .channel(channel)
                .expect("channel was requested")
                .to_vec())
        })
        .collect();
    let mut series = Vec::with_capacity(n_trials);
    for r in runs {
        series.push(r?);
    }
    Ok(pointwise_stats(&series))
}

/// Monte Carlo on the linear modal system driven by modulated band-limited
/// noise `u(t) = dP(t) cos(w t + phi)`; the propagation uses the exact
/// per-mode exponential with trapezoidal input weighting.
#[allow(clippy::too_many_arguments)]
pub fn linear_modulated_mc(
    dec: &ModalDecomposition,
    output: usize,
    omega: f64,
    phi: f64,
    sigma: f64,
    bandwidth_w: f64,
    t_grid: &[f64],
    n_trials: usize,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if n_trials < 2 {
        return Err(Error::Config("need at least two Monte Carlo trials".into()));
    }
    if t_grid.len() < 2 {
        return Err(Error::Config("time grid too short".into()));
    }
    let dt = t_grid[1] - t_grid[0];
    let n = dec.n();
    let e_step: Vec<Complex64> = dec.lambda.iter().map(|l| (l * dt).exp()).collect();

    let runs: Vec<Vec<f64>> = (0..n_trials)
        .into_par_iter()
        .map(|k| {
            let process = LoadProcess {
                p_a0_mean: 0.0,
                sigma,
                bandwidth_w,
                seed: trial_seed(seed, k),
            };
            let noise = sample_base_load(&process, t_grid);
            let u: Vec<f64> = t_grid
                .iter()
                .zip(noise.iter())
                .map(|(&t, &d)| d * (omega * t + phi).cos())
                .collect();
            let mut z = Array1::<Complex64>::zeros(n);
            let mut out = Vec::with_capacity(t_grid.len());
            let y_of = |z: &Array1<Complex64>| -> f64 {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    acc += dec.phi[[output, i]] * z[i];
                }
                acc.re
            };
            out.push(y_of(&z));
            for s in 1..t_grid.len() {
                for i in 0..n {
                    z[i] = e_step[i] * (z[i] + 0.5 * dt * dec.psi[i] * u[s - 1])
                        + 0.5 * dt * dec.psi[i] * u[s];
                }
                out.push(y_of(&z));
            }
            out
        })
        .collect();
    Ok(pointwise_stats(&runs))
}

fn pointwise_stats(series: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = series.len();
    let len = series[0].len();
    let mut mean = vec![0.0; len];
    for s in series {
        for (m, v) in mean.iter_mut().zip(s.iter()) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut var = vec![0.0; len];
    for s in series {
        for ((v, m), x) in var.iter_mut().zip(mean.iter()).zip(s.iter()) {
            let d = x - m;
            *v += d * d;
        }
    }
    for v in &mut var {
        *v /= (n - 1) as f64;
    }
    (mean, var)
}
