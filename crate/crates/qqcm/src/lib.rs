//! Experiments, file formats and the `qqcm` command-line tool for queued
//! quantum collision models. The numerics live in [`qqcm_core`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;
pub mod plot;

pub use config::ExperimentConfig;
pub use error::{Error, Result};
pub use qqcm_core as core;
