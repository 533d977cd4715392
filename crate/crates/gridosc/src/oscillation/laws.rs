//! The five qualitative response laws as checkable predicates with recorded
//! evidence.

use serde::{Deserialize, Serialize};

use super::signal::{bin_width, dominant_frequency, hilbert_envelope, periodogram};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LawOutcome {
    pub pass: bool,
    pub evidence: String,
}

/// Per-law verdicts; `None` marks a law that was not applicable to the
/// supplied evidence.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct LawChecks {
    /// Mean (resonant) response dominates the stochastic response.
    pub law1_mean_dominates: Option<LawOutcome>,
    /// Weaker inherent damping produces a larger oscillation.
    pub law2_damping_amplifies: Option<LawOutcome>,
    /// Amplitude and mode-shape correlation peak at the mode frequency.
    pub law3_resonance_peak: Option<LawOutcome>,
    /// Detuned attacks produce beats at the detuning frequency.
    pub law4_beats: Option<LawOutcome>,
    /// The response variance concentrates at DC and twice the attack
    /// frequency.
    pub law5_variance_lines: Option<LawOutcome>,
}

/// One attack-frequency case of the resonance study.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResonanceCase {
    pub freq_hz: f64,
    /// Measured steady oscillation amplitude.
    pub amplitude: f64,
    /// |corr| between the measured inter-machine phasor pattern and the
    /// inherent mode shape.
    pub shape_correlation: f64,
}

/// Evidence bundle; every field is optional and drives one law.
#[derive(Clone, Debug, Default)]
pub struct LawEvidence<'a> {
    /// (steady mean-response amplitude, stochastic standard deviation).
    pub mean_vs_stochastic: Option<(f64, f64)>,
    /// (amplitude under weak damping, amplitude under strong damping).
    pub weak_vs_strong_damping: Option<(f64, f64)>,
    /// Resonance sweep cases plus the inherent mode frequency.
    pub resonance: Option<(&'a [ResonanceCase], f64)>,
    /// Beat cases: (expected beat Hz, measured beat Hz if any).
    pub beats: Option<&'a [(f64, Option<f64>)]>,
    /// (variance series, sample period, attack frequency Hz).
    pub variance_spectrum: Option<(&'a [f64], f64, f64)>,
}

/// Evaluate every law for which evidence was supplied.
pub fn law_checks(ev: &LawEvidence) -> LawChecks {
    let mut out = LawChecks::default();

    if let Some((mean_amp, stoch_std)) = ev.mean_vs_stochastic {
        let ratio = mean_amp / stoch_std.max(1e-30);
        out.law1_mean_dominates = Some(LawOutcome {
            pass: ratio > 3.0,
            evidence: format!("mean amplitude {mean_amp:.4} vs stochastic std {stoch_std:.4} (ratio {ratio:.1})"),
        });
    }

    if let Some((weak, strong)) = ev.weak_vs_strong_damping {
        out.law2_damping_amplifies = Some(LawOutcome {
            pass: weak > strong,
            evidence: format!("weak-damping amplitude {weak:.4} vs strong-damping {strong:.4}"),
        });
    }

    if let Some((cases, f_mode)) = ev.resonance {
        if cases.len() >= 2 {
            let nearest = cases
                .iter()
                .enumerate()
                .min_by(|a, b| {
                    (a.1.freq_hz - f_mode)
                        .abs()
                        .partial_cmp(&(b.1.freq_hz - f_mode).abs())
                        .unwrap()
                })
                .map(|(i, _)| i)
                .unwrap();
            let amp_max = cases
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.amplitude.partial_cmp(&b.1.amplitude).unwrap())
                .map(|(i, _)| i)
                .unwrap();
            let corr_max = cases
                .iter()
                .enumerate()
                .max_by(|a, b| {
                    a.1.shape_correlation
                        .partial_cmp(&b.1.shape_correlation)
                        .unwrap()
                })
                .map(|(i, _)| i)
                .unwrap();
            out.law3_resonance_peak = Some(LawOutcome {
                pass: amp_max == nearest && corr_max == nearest,
                evidence: format!(
                    "mode {f_mode:.3} Hz; amplitudes {:?}; correlations {:?}",
                    cases
                        .iter()
                        .map(|c| (c.freq_hz, c.amplitude))
                        .collect::<Vec<_>>(),
                    cases
                        .iter()
                        .map(|c| (c.freq_hz, c.shape_correlation))
                        .collect::<Vec<_>>()
                ),
            });
        }
    }

    if let Some(beats) = ev.beats {
        let applicable: Vec<&(f64, Option<f64>)> =
            beats.iter().filter(|(exp, _)| *exp > 1e-6).collect();
        if applicable.is_empty() {
            out.law4_beats = None; // exact tuning: no beat expected
        } else {
            let mut pass = true;
            let mut notes = Vec::new();
            for (expected, measured) in &applicable {
                match measured {
                    Some(m) => {
                        let rel = (m - expected).abs() / expected;
                        if rel > 0.2 {
                            pass = false;
                        }
                        notes.push(format!("expected {expected:.3} Hz got {m:.3} Hz"));
                    }
                    None => {
                        pass = false;
                        notes.push(format!("expected {expected:.3} Hz got none"));
                    }
                }
            }
            out.law4_beats = Some(LawOutcome { pass, evidence: notes.join("; ") });
        }
    }

    if let Some((series, dt, f_att)) = ev.variance_spectrum {
        if series.len() > 16 {
            let bw = bin_width(series.len(), dt);
            let peak = dominant_frequency(series, dt, bw * 1.5);
            out.law5_variance_lines = Some(match peak {
                Some((f, _)) => {
                    let target = 2.0 * f_att;
                    LawOutcome {
                        pass: (f - target).abs() <= bw + 1e-12,
                        evidence: format!(
                            "dominant non-DC variance line at {f:.4} Hz vs 2 f_att = {target:.4} Hz (bin {bw:.4})"
                        ),
                    }
                }
                None => LawOutcome { pass: false, evidence: "no spectral line found".into() },
            });
        }
    }

    out
}

/// Measure the beat (envelope) frequency of a steady forced response.
/// Returns `None` when the envelope carries no measurable line.
pub fn beat_check(x: &[f64], dt: f64, f_max: f64) -> Option<f64> {
    if x.len() < 32 {
        return None;
    }
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let detr: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let env = hilbert_envelope(&detr);
    // drop the edges (Hilbert edge effects), remove the envelope mean
    let margin = env.len() / 10;
    let core = &env[margin..env.len() - margin];
    let (freqs, power) = periodogram(core, dt);
    let bw = bin_width(core.len(), dt);
    let best = freqs
        .iter()
        .zip(power.iter())
        .filter(|(f, _)| **f >= bw * 1.5 && **f <= f_max)
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())?;
    let total: f64 = power.iter().sum();
    if *best.1 < 0.05 * total {
        return None; // no concentrated envelope line
    }
    Some(*best.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn law2_prefers_weakly_damped() {
        let ev = LawEvidence {
            weak_vs_strong_damping: Some((0.8, 0.3)),
            ..Default::default()
        };
        assert!(law_checks(&ev).law2_damping_amplifies.unwrap().pass);
        let ev = LawEvidence {
            weak_vs_strong_damping: Some((0.2, 0.3)),
            ..Default::default()
        };
        assert!(!law_checks(&ev).law2_damping_amplifies.unwrap().pass);
    }

    #[test]
    fn law3_requires_joint_peak_at_mode() {
        let cases = [
            ResonanceCase { freq_hz: 0.57, amplitude: 0.4, shape_correlation: 0.80 },
            ResonanceCase { freq_hz: 0.62, amplitude: 0.9, shape_correlation: 0.99 },
            ResonanceCase { freq_hz: 0.65, amplitude: 0.5, shape_correlation: 0.85 },
        ];
        let ev = LawEvidence { resonance: Some((&cases, 0.62)), ..Default::default() };
        assert!(law_checks(&ev).law3_resonance_peak.unwrap().pass);
    }

    #[test]
    fn law4_not_applicable_when_tuned() {
        let beats = [(0.0, None)];
        let ev = LawEvidence { beats: Some(&beats), ..Default::default() };
        assert!(law_checks(&ev).law4_beats.is_none());
    }

    #[test]
    fn law4_checks_beat_frequency_tolerance() {
        let beats = [(0.05, Some(0.053)), (0.03, Some(0.029))];
        let ev = LawEvidence { beats: Some(&beats), ..Default::default() };
        assert!(law_checks(&ev).law4_beats.unwrap().pass);
        let beats = [(0.05, Some(0.09))];
        let ev = LawEvidence { beats: Some(&beats), ..Default::default() };
        assert!(!law_checks(&ev).law4_beats.unwrap().pass);
    }

    #[test]
    fn beat_measurement_on_synthetic_beating_tone() {
        let dt = 0.01;
        let (fc, df) = (0.62, 0.05);
        // sum of two nearby tones beats at their difference
        let x: Vec<f64> = (0..12000)
            .map(|k| {
                let t = k as f64 * dt;
                (2.0 * std::f64::consts::PI * fc * t).sin()
                    + 0.8 * (2.0 * std::f64::consts::PI * (fc + df) * t).sin()
            })
            .collect();
        let beat = beat_check(&x, dt, 0.5).expect("beat found");
        assert!((beat - df).abs() / df < 0.2, "beat {beat} vs {df}");
    }

    #[test]
    fn law5_spots_double_frequency_line() {
        let dt = 0.02;
        let f_att = 0.62;
        let series: Vec<f64> = (0..8192)
            .map(|k| {
                let t = k as f64 * dt;
                1.0 + 0.4 * (2.0 * std::f64::consts::PI * 2.0 * f_att * t - 0.4).cos()
            })
            .collect();
        let ev = LawEvidence {
            variance_spectrum: Some((&series, dt, f_att)),
            ..Default::default()
        };
        assert!(law_checks(&ev).law5_variance_lines.unwrap().pass);
    }
}
