//! Outage bounds and Monte Carlo validation for two-hop relay networks that
//! use cooperative jamming against passive eavesdroppers.

pub mod analytic;
pub mod channel;
pub mod cli;
pub mod montecarlo;
pub mod protocols;
pub mod scenario;
pub mod validation;
