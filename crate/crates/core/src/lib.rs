//! Day-ahead indoor PM2.5 forecasting with a three-stage stacked ensemble.
//!
//! Stage one fits base regressors (random forest, boosted trees, linear SVR)
//! and collects their out-of-fold predictions; stage two fits meta
//! regressors on those predictions; stage three combines the meta outputs
//! with nonnegative least-squares weights. Around the stack sit CSV
//! ingestion, feature construction, an expanding-window backtest, rank
//! correlation, permutation importance, LOESS trend smoothing and a
//! synthetic data generator.
//!
//! The `examples/` directory has one runnable program per capability; the
//! `aerostack` binary wraps the same functions as subcommands.

pub mod cli;
pub mod data;
pub mod ensemble;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod learners;
pub mod synth;

pub use error::{Error, Result};
