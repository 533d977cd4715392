//! Small DSP helpers shared by the law checks and the acceptance analyses.

use rustfft::{num_complex::Complex, FftPlanner};

/// One-sided periodogram (rectangular window, mean removed). Returns
/// (frequencies in Hz, power per bin).
pub fn periodogram(x: &[f64], dt: f64) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    if n < 2 {
        return (Vec::new(), Vec::new());
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = n / 2;
    let freqs: Vec<f64> = (0..half).map(|k| k as f64 / (n as f64 * dt)).collect();
    let power: Vec<f64> = buf[..half].iter().map(|c| c.norm_sqr() / n as f64).collect();
    (freqs, power)
}

/// Frequency of the largest periodogram line at or above `f_min`.
pub fn dominant_frequency(x: &[f64], dt: f64, f_min: f64) -> Option<(f64, f64)> {
    let (freqs, power) = periodogram(x, dt);
    freqs
        .iter()
        .zip(power.iter())
        .filter(|(f, _)| **f >= f_min)
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(f, p)| (*f, *p))
}

/// Frequency resolution of a periodogram over `n` samples.
pub fn bin_width(n: usize, dt: f64) -> f64 {
    1.0 / (n as f64 * dt)
}

/// Envelope of a real signal via the analytic signal (FFT Hilbert method).
pub fn hilbert_envelope(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n < 4 {
        return x.iter().map(|v| v.abs()).collect();
    }
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    // zero the negative frequencies, double the positive ones
    for (k, c) in buf.iter_mut().enumerate() {
        if k == 0 || (n % 2 == 0 && k == n / 2) {
            // DC and Nyquist stay as-is
        } else if k < n.div_ceil(2) {
            *c *= 2.0;
        } else {
            *c = Complex::new(0.0, 0.0);
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|c| c.norm() / n as f64).collect()
}

/// Complex phasor of `x` at frequency `f` by direct correlation:
/// `(2/N) sum x[k] e^{-j 2 pi f t_k}`. Most accurate over an integer number
/// of periods.
pub fn phasor_at(x: &[f64], dt: f64, f: f64) -> Complex<f64> {
    let n = x.len() as f64;
    let w = 2.0 * std::f64::consts::PI * f;
    let mut acc = Complex::new(0.0, 0.0);
    for (k, &v) in x.iter().enumerate() {
        let t = k as f64 * dt;
        acc += Complex::from_polar(v, -w * t);
    }
    acc * 2.0 / n
}
