//! Algorithmic core for human video instance segmentation and tracking:
//! binary-mask geometry (including interior center points), multi-level
//! positive-sample assignment, identification loss kernels with analytic
//! gradients, Kalman/Hungarian frame association, MOTS-style sequence
//! metrics, and the file formats plus synthetic-scene generator that tie
//! the pieces into reproducible experiments.

pub mod assign;
pub mod cli;
pub mod error;
pub mod io;
pub mod loss;
pub mod mask;
pub mod metrics;
pub mod track;

pub use error::{Error, Result};
