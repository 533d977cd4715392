//! Forced-oscillation analytics: closed-form mean response, pseudo-excitation
//! variance, Prony identification, Monte Carlo cross-validation and the
//! qualitative response laws.

mod laws;
mod mean;
mod monte_carlo;
mod prony;
pub mod signal;
mod variance;

pub use laws::{beat_check, law_checks, LawChecks, LawOutcome, ResonanceCase};
pub use mean::{mean_response, MeanResponsePrediction};
pub use monte_carlo::{linear_modulated_mc, monte_carlo_variance, trial_seed};
pub use prony::{prony_identify, PronyMode, PronyResult};
pub use variance::{variance_cqc, variance_srs, VariancePrediction};
