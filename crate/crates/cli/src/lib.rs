//! Front end for steady-state photon blockade calculations: run
//! configurations, parameter sweeps, CSV output, and analytic cross-checks.

pub mod config;
pub mod spectrum;
pub mod sweep;
