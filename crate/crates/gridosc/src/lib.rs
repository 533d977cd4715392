//! Power-system oscillation toolkit.
//!
//! Models the threat of coordinated sinusoidal modulation of aggregated
//! charging load against weakly damped electromechanical modes, predicts the
//! resulting forced oscillation analytically (mean response and
//! pseudo-excitation variance), and implements an active-disturbance-
//! rejection exciter controller that suppresses it.
//!
//! Structure:
//! - [`net`]: admittance assembly, power flow, Kron reduction
//! - [`dynamics`]: machine and charging-pile models, time-domain engine
//! - [`attack`]: malicious command synthesis and stochastic base load
//! - [`modal`]: linearization, eigenanalysis, sweeps and calibration
//! - [`oscillation`]: forced-oscillation analytics and identification
//! - [`miadrc`]: the defense controller and its stability analysis
//! - [`scenario`]: benchmark datasets, scenario files, experiment recipes

pub mod attack;
pub mod dynamics;
pub mod error;
pub mod miadrc;
pub mod modal;
pub mod net;
pub mod oscillation;
pub mod scenario;

pub use error::{Error, Result};
