//! Malicious command synthesis: sinusoidal modulation of an aggregated,
//! stochastically varying charging load.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modal::ModeInfo;

/// Sinusoidal load-modulation command: inside the attack window the power
/// reference becomes `base * (1 + i_pct * cos(omega t + phi))`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MmaCommand {
    /// Modulation ratio (0.3 = 30% of the base command).
    pub i_pct: f64,
    /// Attack frequency in rad/s.
    pub omega: f64,
    /// Phase in rad.
    pub phi: f64,
    pub t_start: f64,
    pub t_stop: f64,
}

impl MmaCommand {
    pub fn new(i_pct: f64, omega: f64, phi: f64, t_start: f64, t_stop: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&i_pct) {
            return Err(Error::Config(format!("i_pct {i_pct} outside [0, 1]")));
        }
        if omega <= 0.0 {
            return Err(Error::Config(format!("attack frequency {omega} must be > 0")));
        }
        if t_stop <= t_start {
            return Err(Error::Config(format!(
                "attack window [{t_start}, {t_stop}) is empty"
            )));
        }
        Ok(MmaCommand { i_pct, omega, phi, t_start, t_stop })
    }

    pub fn active(&self, t: f64) -> bool {
        t >= self.t_start && t < self.t_stop
    }
}

/// Stationary stochastic base load: band-limited Gaussian fluctuation around
/// a mean, reproducible from a seed.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LoadProcess {
    pub p_a0_mean: f64,
    pub sigma: f64,
    /// One-sided bandwidth of the fluctuation in rad/s.
    pub bandwidth_w: f64,
    pub seed: u64,
}

impl LoadProcess {
    pub fn constant(mean: f64) -> Self {
        LoadProcess { p_a0_mean: mean, sigma: 0.0, bandwidth_w: 2.0 * std::f64::consts::PI * 5.0, seed: 0 }
    }
}

/// Modulated power reference per the attack command.
pub fn attack_reference(t: f64, base_p: f64, cmd: &MmaCommand) -> f64 {
    if cmd.active(t) {
        base_p * (1.0 + cmd.i_pct * (cmd.omega * t + cmd.phi).cos())
    } else {
        base_p
    }
}

/// Build an attack command aimed at an identified mode.
pub fn attack_schedule_from_mode(
    mode: &ModeInfo,
    i_pct: f64,
    window: (f64, f64),
) -> Result<MmaCommand> {
    if mode.frequency <= 0.0 {
        return Err(Error::Config(format!(
            "cannot target a mode at {} Hz",
            mode.frequency
        )));
    }
    MmaCommand::new(
        i_pct,
        2.0 * std::f64::consts::PI * mode.frequency,
        0.0,
        window.0,
        window.1,
    )
}

/// Sample the stochastic base load on a uniform time grid.
///
/// White Gaussian noise is shaped by a 4th-order Butterworth low-pass at the
/// declared bandwidth, renormalized to the requested standard deviation and
/// shifted to the mean. The filter is warmed up ahead of t = 0 so the series
/// is stationary from the first sample.
pub fn sample_base_load(process: &LoadProcess, t_grid: &[f64]) -> Vec<f64> {
    let n = t_grid.len();
    if n == 0 {
        return Vec::new();
    }
    if process.sigma == 0.0 {
        return vec![process.p_a0_mean; n];
    }
    let dt = if n > 1 { t_grid[1] - t_grid[0] } else { 1e-3 };
    let mut rng = ChaCha8Rng::seed_from_u64(process.seed);
    let normal = Normal::new(0.0, 1.0).unwrap();

    // warmup long enough for the slowest filter time constant to settle
    let warm = ((8.0 / process.bandwidth_w / dt).ceil() as usize).max(64);
    let total = warm + n;
    let white: Vec<f64> = (0..total).map(|_| normal.sample(&mut rng)).collect();

    let filtered = butterworth4_lowpass(&white, process.bandwidth_w, dt);
    let tail = &filtered[warm..];
    let mean: f64 = tail.iter().sum::<f64>() / n as f64;
    let var: f64 = tail.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
    let scale = if var > 0.0 { process.sigma / var.sqrt() } else { 0.0 };
    tail.iter().map(|x| process.p_a0_mean + scale * (x - mean)).collect()
}

/// 4th-order Butterworth low-pass (two cascaded bilinear-transform biquads).
fn butterworth4_lowpass(x: &[f64], wc: f64, dt: f64) -> Vec<f64> {
    // analog prototype poles at zeta = sin(pi/8), sin(3pi/8)
    let mut out = x.to_vec();
    for &zeta in &[0.38268343236508984_f64, 0.9238795325112867] {
        out = biquad_lowpass(&out, wc, zeta, dt);
    }
    out
}

fn biquad_lowpass(x: &[f64], wc: f64, zeta: f64, dt: f64) -> Vec<f64> {
    // bilinear transform of wc^2 / (s^2 + 2 zeta wc s + wc^2)
    let k = (wc * dt / 2.0).tan().recip(); // = 1/tan(wc dt/2), prewarped
    let k2 = k * k;
    let a0 = k2 + 2.0 * zeta * k + 1.0;
    let b = [1.0 / a0, 2.0 / a0, 1.0 / a0];
    let a = [2.0 * (1.0 - k2) / a0, (k2 - 2.0 * zeta * k + 1.0) / a0];
    let mut y = vec![0.0; x.len()];
    let (mut x1, mut x2, mut y1, mut y2) = (0.0, 0.0, 0.0, 0.0);
    for (i, &xi) in x.iter().enumerate() {
        let yi = b[0] * xi + b[1] * x1 + b[2] * x2 - a[0] * y1 - a[1] * y2;
        y[i] = yi;
        x2 = x1;
        x1 = xi;
        y2 = y1;
        y1 = yi;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn cmd(i_pct: f64, f_hz: f64) -> MmaCommand {
        MmaCommand::new(i_pct, 2.0 * PI * f_hz, 0.0, 1.0, 21.0).unwrap()
    }

    #[test]
    fn zero_ratio_is_identity() {
        let c = cmd(0.0, 1.0);
        for t in [0.0, 1.0, 5.3, 30.0] {
            assert_abs_diff_eq!(attack_reference(t, 2.5, &c), 2.5, epsilon = 0.0);
        }
    }

    #[test]
    fn window_start_hits_peak_for_zero_phase() {
        // t_start chosen so omega*t is a multiple of 2 pi
        let c = MmaCommand::new(0.3, 2.0 * PI, 0.0, 1.0, 10.0).unwrap();
        assert_abs_diff_eq!(attack_reference(1.0, 1.0, &c), 1.3, epsilon = 1e-12);
        // outside the window the base passes through
        assert_abs_diff_eq!(attack_reference(0.999, 1.0, &c), 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(attack_reference(10.0, 1.0, &c), 1.0, epsilon = 0.0);
    }

    #[test]
    fn peak_to_peak_matches_ratio() {
        let c = cmd(0.3, 1.37);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut t = c.t_start;
        while t < c.t_stop {
            let v = attack_reference(t, 1.0, &c);
            lo = lo.min(v);
            hi = hi.max(v);
            t += 1e-4;
        }
        assert_abs_diff_eq!(hi - lo, 0.6, epsilon = 1e-3);
    }

    #[test]
    fn schedule_from_mode_frequencies() {
        let mode = ModeInfo {
            frequency: 0.62,
            damping_ratio: 0.02,
            shape: vec![],
            shape_labels: vec![],
            participation: vec![],
            participation_labels: vec![],
            eigenvalue: num_complex::Complex64::new(-0.05, 2.0 * PI * 0.62),
        };
        let c = attack_schedule_from_mode(&mode, 0.3, (1.0, 20.0)).unwrap();
        assert_abs_diff_eq!(c.omega, 3.8956, epsilon = 1e-3);

        let mode128 = ModeInfo { frequency: 1.28, ..mode.clone() };
        let c = attack_schedule_from_mode(&mode128, 0.3, (1.0, 20.0)).unwrap();
        assert_abs_diff_eq!(c.omega, 8.0425, epsilon = 1e-3);

        let bad = ModeInfo { frequency: 0.0, ..mode };
        assert!(attack_schedule_from_mode(&bad, 0.3, (1.0, 20.0)).is_err());
    }

    #[test]
    fn modulation_mean_vanishes_over_whole_periods() {
        let c = cmd(0.25, 0.5); // period 2 s, window [1, 21) = 10 periods
        let n = 200_000;
        let dt = (c.t_stop - c.t_start) / n as f64;
        // midpoint rule over exactly the window
        let sum: f64 = (0..n)
            .map(|k| {
                let t = c.t_start + (k as f64 + 0.5) * dt;
                attack_reference(t, 1.0, &c) - 1.0
            })
            .sum();
        assert!((sum * dt / (c.t_stop - c.t_start)).abs() < 1e-9);
    }

    #[test]
    fn constant_process_yields_constant_series() {
        let p = LoadProcess { p_a0_mean: 2.0, sigma: 0.0, bandwidth_w: 10.0, seed: 7 };
        let grid: Vec<f64> = (0..100).map(|k| k as f64 * 1e-3).collect();
        let s = sample_base_load(&p, &grid);
        assert!(s.iter().all(|&v| v == 2.0));
    }

    #[test]
    fn sampled_std_matches_requested() {
        let p = LoadProcess { p_a0_mean: 1.0, sigma: 0.1, bandwidth_w: 2.0 * PI * 5.0, seed: 11 };
        let grid: Vec<f64> = (0..100_000).map(|k| k as f64 * 1e-3).collect();
        let s = sample_base_load(&p, &grid);
        let mean: f64 = s.iter().sum::<f64>() / s.len() as f64;
        let std =
            (s.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / s.len() as f64).sqrt();
        assert_abs_diff_eq!(std, 0.1, epsilon = 0.005);
        assert_abs_diff_eq!(mean, 1.0, epsilon = 1e-3);
    }

    #[test]
    fn same_seed_is_bitwise_identical() {
        let p = LoadProcess { p_a0_mean: 1.0, sigma: 0.2, bandwidth_w: 30.0, seed: 42 };
        let grid: Vec<f64> = (0..5000).map(|k| k as f64 * 1e-3).collect();
        let a = sample_base_load(&p, &grid);
        let b = sample_base_load(&p, &grid);
        assert_eq!(a, b);
    }

    #[test]
    fn spectrum_is_band_limited() {
        // periodogram at N = 2^16: flat-ish in the passband, >= 20 dB down
        // beyond twice the corner (4th-order rolloff reaches -24 dB at 2W).
        let w = 2.0 * PI * 4.0;
        let dt = 1e-3;
        let p = LoadProcess { p_a0_mean: 0.0, sigma: 1.0, bandwidth_w: w, seed: 3 };
        let n = 1 << 16;
        let grid: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
        let s = sample_base_load(&p, &grid);

        use rustfft::{num_complex::Complex, FftPlanner};
        let mut buf: Vec<Complex<f64>> =
            s.iter().map(|&x| Complex::new(x, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let psd: Vec<f64> = buf.iter().take(n / 2).map(|c| c.norm_sqr()).collect();
        let f_bin = 1.0 / (n as f64 * dt);
        let band = |f_lo: f64, f_hi: f64| -> f64 {
            let lo = (f_lo / f_bin) as usize;
            let hi = ((f_hi / f_bin) as usize).min(psd.len() - 1);
            psd[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        };
        let inband = band(0.2, 2.0); // well inside the 4 Hz corner
        let outband = band(8.0, 20.0); // >= 2x corner
        assert!(
            inband / outband > 100.0,
            "stopband only {:.1} dB down",
            10.0 * (inband / outband).log10()
        );
        // flat within the lower half of the passband: no bin much above the mean
        let flat = band(0.2, 1.0) / band(1.0, 2.0);
        assert!(flat < 2.0 && flat > 0.5, "passband tilt {flat}");
    }

    proptest! {
        #[test]
        fn reference_scales_linearly_in_base(base in 0.1f64..10.0, t in 0.0f64..30.0) {
            let c = cmd(0.3, 0.62);
            let one = attack_reference(t, 1.0, &c);
            let scaled = attack_reference(t, base, &c);
            prop_assert!((scaled - base * one).abs() < 1e-12 * base.max(1.0));
        }

        #[test]
        fn reference_within_modulation_bounds(t in 0.0f64..30.0, i_pct in 0.0f64..1.0) {
            let c = MmaCommand::new(i_pct, 3.0, 0.4, 1.0, 20.0).unwrap();
            let v = attack_reference(t, 1.0, &c);
            prop_assert!(v >= 1.0 - i_pct - 1e-12 && v <= 1.0 + i_pct + 1e-12);
        }
    }
}
