//! Wideband collaborative spectrum sensing with decision fusion at a
//! large-antenna fusion center.
//!
//! SUs sense each subcarrier locally, map their binary decisions to BPSK and
//! report them simultaneously over a frequency-selective multiple-access
//! channel. The fusion center combines the superimposed reports with one of
//! several statistics (optimum LLR, widely linear, MRC and their time-reversed
//! variants) and compares the result with a threshold.

pub mod analytic;
pub mod channel;
pub mod config;
pub mod error;
pub mod experiment;
pub mod fusion;
pub mod montecarlo;
pub mod sensing;
pub mod special;

pub use config::{ChannelMode, NetworkConfig};
pub use error::{Error, Result};
pub use fusion::FusionRule;
pub use sensing::{DecisionVector, Hypothesis, SensingProfile};
