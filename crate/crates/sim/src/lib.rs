//! Scenario files, parallel coverage sweeps, CSV artifacts and the
//! acceptance report for [`broadbeam_core`].

pub mod acceptance;
pub mod config;
pub mod experiment;
pub mod output;
pub mod sweep;

pub use broadbeam_core as core;
