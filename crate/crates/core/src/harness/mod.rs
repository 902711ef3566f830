//! Scenarios, episodes, traces and the interactive session service.

use thiserror::Error;

use crate::controller::ControllerError;
use crate::planner::PlanError;

pub mod episode;
pub mod protocol;
pub mod scenario;
pub mod server;

pub use episode::{
    execute_plan, read_trace, replay_check, run_episode, run_episode_observed, spectra_report, write_trace, EpisodeEvent,
    EpisodeTrace, SegmentReport, SpectraRow, TraceLine,
};
pub use protocol::{ClientMessage, ServerMessage};
pub use scenario::{GoalSpec, InitialSpec, PlannerSettings, Scenario, Timescales};
pub use server::{serve, Server, ServerOptions};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("io: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid `{field}`: {msg}")]
    Invalid { field: String, msg: String },
    #[error("planning failed: {0}")]
    Plan(#[from] PlanError),
    #[error("segment {index}: {source}")]
    Segment { index: usize, source: ControllerError },
    #[error("trace mismatch: {0}")]
    Trace(String),
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}
