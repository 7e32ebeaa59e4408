//! Downlink cloud-RAN antenna-domain simulator.
//!
//! Four RRHs each serve one user. Resource allocation (transmit beam,
//! receive filter, CQI) is done either by an exhaustive CSI-based search or
//! by a random forest fed with user positions and grid-derived beams. The
//! crate provides the geometry, a geometric ray channel, steering-vector
//! codebooks, the link abstraction, a from-scratch random forest, the
//! allocation schemes and an experiment harness.

pub mod channel;
pub mod codebook;
pub mod error;
pub mod forest;
pub mod harness;
pub mod link;
pub mod rng;
pub mod scenario;
pub mod schemes;
pub mod system;

pub use error::{Error, Result};
pub use forest::{Dataset, ForestModel, TrainParams};
pub use scenario::{OrientationAngles, ScenarioConfig, UserDrop};
pub use system::System;
