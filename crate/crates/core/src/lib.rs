//! Stochastic ordering of fading-channel SNR distributions.
//!
//! Order verifiers (usual, convex, Laplace transform), completely monotone
//! error and capacity metrics, multi-branch system simulation and
//! impulsive-noise models, driven by a deterministic Monte Carlo engine.

// `!(x >= 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod channels;
pub mod config;
pub mod csv_io;
pub mod error;
pub mod expr;
pub mod metrics;
pub mod montecarlo;
pub mod noise;
pub mod orders;
pub mod runner;
pub mod specfun;
pub mod systems;

pub use channels::ChannelModel;
pub use config::{CapacityKind, Command, Scenario};
pub use error::{Error, Result};
pub use metrics::MetricFunction;
pub use montecarlo::{SweepResult, SweepSpec};
pub use noise::NoiseModel;
pub use orders::{Order, OrderVerdict};
pub use systems::{Topology, TopologyKind};
