//! Armband decoding: EMG features, Gaussian HMM gesture recognition, Kalman
//! pointer tracking and the gesture → pointer-event mapping. Real hardware is
//! replaced by [`synth`] sessions and the replayable [`session`] file format.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod events;
pub mod features;
pub mod hmm;
pub mod kalman;
pub mod session;
pub mod synth;

pub use events::{gestures_to_events, EventConfig, EventKind, PointerEvent, PointerSample};
pub use features::{emg_features, label_frames, pure_frame_labels, EmgFrame, GestureSegment, FEATURE_DIM};
pub use hmm::{baum_welch_train, forward_decode, CovarianceKind, DecodedFrame, ForwardFilter, GestureHmm, TrainOptions};
pub use kalman::{kalman_step, KalmanNoise, KalmanState};
pub use session::{decode_session, DecodeReport, RecordedSession};
pub use synth::{synth_session, SynthScript};

/// Number of EMG channels on the armband.
pub const CHANNELS: usize = 8;

#[derive(Debug, Error)]
pub enum DecoderError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// The five armband gestures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gesture {
    Normal,
    Fist,
    Spread,
    WaveUp,
    WaveDown,
}

impl Gesture {
    pub const ALL: [Gesture; 5] = [Gesture::Normal, Gesture::Fist, Gesture::Spread, Gesture::WaveUp, Gesture::WaveDown];

    pub fn index(self) -> usize {
        self as usize
    }
}
