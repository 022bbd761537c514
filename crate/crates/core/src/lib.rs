//! Machine-learned composite unit-root testing.
//!
//! The crate covers the whole pipeline: simulating labelled AR(1) series
//! ([`sim`]), computing nine classical unit-root statistics ([`urtests`]) and
//! a time-series feature bank ([`tsfeatures`]), training tree ensembles as
//! replacement mapping functions ([`learners`]), calibrating decision
//! thresholds from Type-I/Type-II cost ratios and evaluating everything
//! ([`evalkit`]), and orchestrating experiments and the CLI ([`harness`]).
//!
//! Conventions used throughout:
//! * model scores are the probability that a series has a unit root;
//! * classification tables treat a rejection of the unit-root null
//!   (a near-unit-root call) as the positive case, so sensitivity is power.

pub mod error;
pub mod evalkit;
pub mod harness;
pub mod learners;
pub mod rng;
pub mod sim;
pub mod tsfeatures;
pub mod urtests;

pub use error::{Error, Result};
