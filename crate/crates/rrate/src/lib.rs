//! Benchmark harness and analysis toolkit for multi-copy CPU suites.
//!
//! The pipeline: a suite config ([`suite`]) feeds a deterministic schedule
//! ([`schedule`]) into the executor ([`exec`]), which validates outputs
//! ([`validate`]) and leaves a run log. Scores and statistics come out of
//! [`metrics`], figures out of [`plot`] and [`report`]. The [`bbv`] and
//! [`perf`] modules analyze phase behavior and counter streams independently
//! of the run pipeline. [`synth`] supplies the deterministic built-in
//! workloads used by the bundled mini-suite.

pub mod bbv;
pub mod error;
pub mod exec;
pub mod metrics;
pub mod perf;
pub mod plot;
pub mod report;
pub mod schedule;
pub mod suite;
pub mod synth;
pub mod validate;

pub use error::{Error, Result};
