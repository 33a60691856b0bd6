//! Information theory for multivariate time series.
//!
//! Discrete measures work on [`JointDistribution`] tables and are reported in bits;
//! the Gaussian and nearest-neighbour estimators in [`estimators`] report nats.
//! See `examples/` for one runnable program per area.

pub mod cli;
pub mod discretize;
pub mod distribution;
pub mod dynamics;
pub mod error;
pub mod estimators;
pub mod multivar;
pub mod netinf;
pub mod pid;
pub mod rng;
pub mod series;
pub mod shannon;
pub mod surrogate;
pub mod synth;
pub mod units;

pub use distribution::JointDistribution;
pub use error::{Error, Result};
pub use series::{Alphabet, ContinuousSeries, Dataset, DiscreteSeries};
pub use units::{LocalSeries, MeasureValue, Unit};
