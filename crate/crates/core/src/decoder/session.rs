//! Recorded armband sessions and the offline decoding pipeline.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::events::{gestures_to_events, EventConfig, PointerEvent, PointerSample};
use super::features::{emg_features, label_frames, pure_frame_labels, GestureSegment};
use super::hmm::{baum_welch_train, DecodedFrame, ForwardFilter, GestureHmm, TrainOptions};
use super::kalman::{kalman_step, KalmanNoise, KalmanState};
use super::{DecoderError, Gesture, CHANNELS};

/// JSON file format: rate header, calibration schedule, raw sample arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordedSession {
    pub emg_rate_hz: f64,
    pub imu_rate_hz: f64,
    pub r_arm: f64,
    /// Labeled calibration gestures at the start of the EMG stream.
    pub training: Vec<GestureSegment>,
    /// Gestures actually performed after calibration, when known.
    #[serde(default)]
    pub truth: Vec<GestureSegment>,
    pub emg: Vec<[f64; CHANNELS]>,
    /// IMU observations `o_imu`, one per IMU sample.
    pub imu: Vec<[f64; 4]>,
    /// Pointer acceleration input per IMU sample.
    #[serde(default)]
    pub accel: Vec<[f64; 2]>,
}

impl RecordedSession {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, DecoderError> {
        let text = std::fs::read_to_string(path)?;
        let session: Self = serde_json::from_str(&text)?;
        session.validate()?;
        Ok(session)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), DecoderError> {
        std::fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    pub fn validate(&self) -> Result<(), DecoderError> {
        for (name, x) in [("emg_rate_hz", self.emg_rate_hz), ("imu_rate_hz", self.imu_rate_hz), ("r_arm", self.r_arm)] {
            if !(x.is_finite() && x > 0.0) {
                return Err(DecoderError::InvalidInput(format!("{name} must be positive, got {x}")));
            }
        }
        if self.training.is_empty() {
            return Err(DecoderError::InvalidInput("training schedule is empty".into()));
        }
        if !self.accel.is_empty() && self.accel.len() != self.imu.len() {
            return Err(DecoderError::InvalidInput(format!(
                "accel has {} samples but imu has {}",
                self.accel.len(),
                self.imu.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecodeOptions {
    pub window: f64,
    pub shift: f64,
    pub train: TrainOptions,
    pub events: EventConfig,
    pub process_noise: f64,
    pub measurement_noise: f64,
}

impl Default for DecodeOptions {
    fn default() -> Self {
        Self {
            window: 1.0,
            shift: 0.2,
            train: TrainOptions::default(),
            events: EventConfig::default(),
            process_noise: 1e-4,
            measurement_noise: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeReport {
    pub frames: usize,
    pub training_frames: usize,
    pub log_likelihoods: Vec<f64>,
    pub model: GestureHmm,
    /// Decoded live frames (after calibration).
    pub decoded: Vec<DecodedFrame>,
    /// Fraction of live frames matching `truth`, when it is present.
    pub accuracy: Option<f64>,
    pub pointer: Vec<PointerSample>,
    pub events: Vec<PointerEvent>,
}

/// Kalman-filters the IMU stream into pointer samples.
pub fn track_pointer(session: &RecordedSession, options: &DecodeOptions) -> Result<Vec<PointerSample>, DecoderError> {
    let Some(first) = session.imu.first() else {
        return Ok(Vec::new());
    };
    let noise = KalmanNoise::isotropic(options.process_noise, options.measurement_noise);
    let eta = 1.0 / session.imu_rate_hz;
    let r = session.r_arm;
    let mut state = KalmanState::new([first[0] * r, first[1] * r], [first[2] * r, first[3] * r], options.measurement_noise, eta, r);
    let mut out = vec![PointerSample { time: 0.0, position: state.position }];
    for k in 1..session.imu.len() {
        let accel = session.accel.get(k - 1).copied().unwrap_or([0.0, 0.0]);
        state = kalman_step(&state, accel, Some(session.imu[k]), &noise)?;
        out.push(PointerSample {
            time: k as f64 * eta,
            position: state.position,
        });
    }
    Ok(out)
}

/// Features → calibration training → causal decoding → pointer events.
pub fn decode_session(session: &RecordedSession, options: &DecodeOptions) -> Result<DecodeReport, DecoderError> {
    session.validate()?;
    let rate = session.emg_rate_hz;
    let frames = emg_features(&session.emg, rate, options.window, options.shift)?;
    let labels = label_frames(&frames, &session.training, rate, options.window);
    let pure = pure_frame_labels(&frames, &session.training, rate, options.window);
    let (train_frames, train_labels): (Vec<_>, Vec<Gesture>) = frames
        .iter()
        .zip(&pure)
        .filter_map(|(f, l)| l.map(|g| (f.clone(), g)))
        .unzip();
    if train_frames.is_empty() {
        return Err(DecoderError::InvalidInput("no complete frames inside the calibration schedule".into()));
    }
    let report = baum_welch_train(&train_frames, &train_labels, &options.train)?;

    let full: Vec<GestureSegment> = session.training.iter().chain(&session.truth).copied().collect();
    let truth = label_frames(&frames, &full, rate, options.window);
    let mut filter = ForwardFilter::new(&report.model)?;
    let mut live = Vec::new();
    let mut scored = 0usize;
    let mut hits = 0usize;
    for ((frame, label), expected) in frames.iter().zip(&labels).zip(&truth) {
        let Some(decoded) = filter.push(frame) else { continue };
        if label.is_some() {
            continue;
        }
        if let Some(t) = expected {
            scored += 1;
            hits += usize::from(*t == decoded.gesture);
        }
        live.push(decoded);
    }
    let accuracy = (!session.truth.is_empty() && scored > 0).then(|| hits as f64 / scored as f64);

    let pointer = track_pointer(session, options)?;
    let center = options.window / 2.0;
    let timed: Vec<(f64, Gesture)> = live.iter().map(|d| (d.timestamp as f64 / rate + center, d.gesture)).collect();
    let events = gestures_to_events(&timed, &pointer, &options.events);
    Ok(DecodeReport {
        frames: frames.len(),
        training_frames: train_frames.len(),
        log_likelihoods: report.log_likelihoods,
        model: report.model,
        decoded: live,
        accuracy,
        pointer,
        events,
    })
}
