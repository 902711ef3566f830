//! Human-swarm interaction workbench.
//!
//! An operator describes a target formation (polygon, scale, rotation,
//! centroid). The planner turns it into a short sequence of legible
//! intermediate formations, each tagged with the communication radius the
//! swarm should use, and a decentralized second-order controller drives a
//! simulated double-integrator swarm through them.
//!
//! Modules, bottom-up:
//!
//! * [`netgraph`]: ν-disk graphs, Metropolis weights, Laplacian spectra, mode costs.
//! * [`geom`]: polygons, uniform formation fill, intention → goal translation.
//! * [`controller`]: per-agent and dense controller, FODAC centroid estimation,
//!   stability certificate, segment execution.
//! * [`planner`]: finite-horizon LQR, human-interpretable rollout, mode scheduling.
//! * [`decoder`]: EMG features, Gaussian HMM gesture decoding, Kalman pointer
//!   tracking, synthetic armband sessions.
//! * [`harness`]: scenarios, episodes, JSON-lines traces and the session service.

pub mod controller;
pub mod decoder;
pub mod geom;
pub mod harness;
pub mod netgraph;
pub mod planner;
pub mod rows;

pub use geom::Point;
