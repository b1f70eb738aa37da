//! Bell-type inequalities for networks of independent multipartite sources
//! joined at a central observer.
//!
//! The crate simulates such networks exactly (quantum and classical), computes
//! the correlator spectra `K_X`/`Q_X`, the Bell value `Σ_X |K_X|^{1/n}`, its
//! classical bound, noise thresholds and measurement-angle sweeps, and
//! cross-checks every closed form against an independent numerical route.

pub mod classical;
pub mod cli;
pub mod error;
pub mod format;
pub mod inequality;
pub mod network;
pub mod quantum;
pub mod swapping;

pub use error::{Error, Result};
pub use network::{NetworkConfig, SettingAssignment, SubsetIndex};
