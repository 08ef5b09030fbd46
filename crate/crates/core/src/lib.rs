//! Pause Intensity: a no-reference quality metric for video streamed over
//! TCP, with the buffer-underrun model behind it.
//!
//! Pause intensity (PI) is the mean pause duration times the pause
//! frequency. For a playout buffer cycling between `q_min` and `q_max` it
//! reduces to `1 − η/λ`, the throughput shortfall relative to the playout
//! rate. The crate is organised bottom-up:
//!
//! - [`tcp`]: Reno throughput as a function of loss, link caps, inversion.
//! - [`loss`]: Gamma loss law, sampled densities, change of variables.
//! - [`pause_stats`]: normal-approximation pause/play duration pmfs and a
//!   Monte Carlo first-passage check.
//! - [`model`]: closed-form durations, frequency, PI, `β`, critical points.
//! - [`sim`]: time-stepped buffer simulator, loss sweeps, trace synthesis.
//! - [`trace`]: event traces and empirical metrics.
//! - [`corr`]: bundled subjective datasets, Pearson/Spearman, MOS tables.
//! - [`cli`]: the `pi` command-line front end.
//!
//! ```
//! use pause_intensity::model::{pause_play_metrics, PlayoutRate};
//! use pause_intensity::tcp::Throughput;
//!
//! let m = pause_play_metrics(
//!     Throughput::new(75_000.0).unwrap(),
//!     PlayoutRate::new(100_000.0).unwrap(),
//!     198_500.0,
//! )
//! .unwrap();
//! assert!((m.pause_intensity - 0.25).abs() < 1e-12);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod cli;
pub mod corr;
pub mod error;
pub mod loss;
pub mod model;
pub mod pause_stats;
pub mod sim;
pub mod tcp;
pub mod trace;

pub use error::{Error, Result};
