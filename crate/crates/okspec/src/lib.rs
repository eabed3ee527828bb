//! File formats, the experiment runner and the `okspec` command-line driver
//! on top of [`okspec_core`].

pub mod config;
pub mod error;
pub mod formats;
pub mod runner;

pub use config::{ExperimentConfig, Overrides};
pub use error::{RunError, Stage};
pub use okspec_core as core;
pub use runner::{compute, render, run, Bundle, Experiment};
