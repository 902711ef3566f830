//! Sliding-window EMG features: per-channel mean and standard deviation.

use serde::{Deserialize, Serialize};

use super::{DecoderError, Gesture, CHANNELS};

pub const FEATURE_DIM: usize = 2 * CHANNELS;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmgFrame {
    /// Means of the 8 channels followed by their standard deviations.
    pub feature: Vec<f64>,
    /// Index of the first raw sample in the window.
    pub timestamp: usize,
}

/// A gesture held for a number of seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GestureSegment {
    pub gesture: Gesture,
    pub seconds: f64,
}

fn samples(seconds: f64, rate: f64) -> usize {
    (seconds * rate).round() as usize
}

/// Frame `k` covers samples `[k·shift, k·shift + window)`.
pub fn emg_features(raw: &[[f64; CHANNELS]], rate: f64, window: f64, shift: f64) -> Result<Vec<EmgFrame>, DecoderError> {
    if !(rate > 0.0 && shift > 0.0 && window >= shift) {
        return Err(DecoderError::InvalidInput(format!(
            "need rate > 0 and window ≥ shift > 0, got rate {rate}, window {window}, shift {shift}"
        )));
    }
    let w = samples(window, rate).max(1);
    let h = samples(shift, rate).max(1);
    if raw.len() < w {
        return Ok(Vec::new());
    }
    let n = w as f64;
    Ok((0..=(raw.len() - w) / h)
        .map(|k| {
            let block = &raw[k * h..k * h + w];
            let mut feature = vec![0.0; FEATURE_DIM];
            for ch in 0..CHANNELS {
                let mean = block.iter().map(|s| s[ch]).sum::<f64>() / n;
                let var = block.iter().map(|s| (s[ch] - mean).powi(2)).sum::<f64>() / n;
                feature[ch] = mean;
                feature[CHANNELS + ch] = var.sqrt();
            }
            EmgFrame { feature, timestamp: k * h }
        })
        .collect())
}

/// Labels each frame with the scheduled gesture at its window center.
/// Frames centered past the end of the schedule get `None`.
pub fn label_frames(frames: &[EmgFrame], schedule: &[GestureSegment], rate: f64, window: f64) -> Vec<Option<Gesture>> {
    let half = window * rate / 2.0;
    frames
        .iter()
        .map(|f| {
            let t = (f.timestamp as f64 + half) / rate;
            let mut end = 0.0;
            schedule.iter().find_map(|seg| {
                end += seg.seconds;
                (t < end).then_some(seg.gesture)
            })
        })
        .collect()
}

/// Like [`label_frames`], but only windows lying entirely inside one
/// segment get a label.
pub fn pure_frame_labels(frames: &[EmgFrame], schedule: &[GestureSegment], rate: f64, window: f64) -> Vec<Option<Gesture>> {
    let span = window * rate;
    let mut bounds = Vec::with_capacity(schedule.len());
    let mut end = 0.0;
    for seg in schedule {
        let start = end;
        end += seg.seconds * rate;
        bounds.push((start, end, seg.gesture));
    }
    frames
        .iter()
        .map(|f| {
            let (a, b) = (f.timestamp as f64, f.timestamp as f64 + span);
            bounds.iter().find(|&&(s, e, _)| a >= s - 1e-9 && b <= e + 1e-9).map(|&(_, _, g)| g)
        })
        .collect()
}
