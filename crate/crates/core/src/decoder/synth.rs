//! Deterministic stand-in for the armband: Gaussian EMG per gesture and IMU
//! readings generated from a scripted pointer path.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::features::GestureSegment;
use super::session::RecordedSession;
use super::{Gesture, CHANNELS};
use crate::geom::Point;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub time: f64,
    pub position: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthScript {
    /// Labeled calibration gestures at the start of the stream.
    pub calibration: Vec<GestureSegment>,
    /// Gestures performed after calibration.
    pub live: Vec<GestureSegment>,
    /// Piecewise-linear pointer path; held constant outside its time span.
    pub waypoints: Vec<Waypoint>,
    pub emg_rate_hz: f64,
    pub imu_rate_hz: f64,
    pub r_arm: f64,
    /// Standard deviation of raw EMG samples.
    pub emg_noise: f64,
    /// Spacing between per-gesture channel means.
    pub emg_separation: f64,
    pub imu_noise: f64,
}

impl SynthScript {
    /// Five gestures in fixed order, `seconds_each` per gesture, no live part.
    pub fn calibration_only(seconds_each: f64) -> Self {
        Self {
            calibration: Gesture::ALL.iter().map(|&gesture| GestureSegment { gesture, seconds: seconds_each }).collect(),
            live: Vec::new(),
            waypoints: Vec::new(),
            emg_rate_hz: 200.0,
            imu_rate_hz: 50.0,
            r_arm: 0.7,
            emg_noise: 1.0,
            emg_separation: 5.0,
            imu_noise: 0.01,
        }
    }

    /// One minute of calibration (12 s per gesture) followed by a live
    /// sequence exercising every gesture while the pointer traces a square.
    pub fn standard_protocol() -> Self {
        use Gesture::*;
        let live = [
            (Normal, 3.0),
            (Fist, 2.0),
            (Normal, 2.0),
            (Spread, 2.0),
            (Normal, 2.0),
            (WaveUp, 3.0),
            (Normal, 2.0),
            (WaveDown, 3.0),
            (Normal, 2.0),
        ];
        let start = 60.0;
        let corners = [[0.0, 0.0], [0.3, 0.0], [0.3, 0.3], [0.0, 0.3], [0.0, 0.0]];
        Self {
            live: live.iter().map(|&(gesture, seconds)| GestureSegment { gesture, seconds }).collect(),
            waypoints: corners
                .iter()
                .enumerate()
                .map(|(i, &position)| Waypoint {
                    time: start + 5.0 * i as f64,
                    position,
                })
                .collect(),
            ..Self::calibration_only(12.0)
        }
    }

    pub fn duration(&self) -> f64 {
        self.calibration.iter().chain(&self.live).map(|s| s.seconds).sum()
    }

    /// Scripted gesture at time `t`.
    pub fn gesture_at(&self, t: f64) -> Gesture {
        let mut end = 0.0;
        for seg in self.calibration.iter().chain(&self.live) {
            end += seg.seconds;
            if t < end {
                return seg.gesture;
            }
        }
        self.live.last().or(self.calibration.last()).map_or(Gesture::Normal, |s| s.gesture)
    }

    /// Pointer position and velocity at time `t`.
    pub fn pointer_at(&self, t: f64) -> (Point, Point) {
        let w = &self.waypoints;
        match w.iter().position(|p| p.time > t) {
            None => (w.last().map_or([0.0, 0.0], |p| p.position), [0.0, 0.0]),
            Some(0) => (w[0].position, [0.0, 0.0]),
            Some(i) => {
                let (a, b) = (w[i - 1], w[i]);
                let span = b.time - a.time;
                let u = (t - a.time) / span;
                let vel = [(b.position[0] - a.position[0]) / span, (b.position[1] - a.position[1]) / span];
                let pos = [a.position[0] + u * (b.position[0] - a.position[0]), a.position[1] + u * (b.position[1] - a.position[1])];
                (pos, vel)
            }
        }
    }

    /// Mean of channel `ch` while performing `g`.
    pub fn channel_mean(&self, g: Gesture, ch: usize) -> f64 {
        self.emg_separation * ((g.index() + ch) % 5) as f64
    }
}

/// Generates a replayable session. Identical `(seed, script)` pairs give
/// bit-identical streams.
pub fn synth_session(seed: u64, script: &SynthScript) -> RecordedSession {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let emg_noise = Normal::new(0.0, script.emg_noise.max(0.0)).expect("finite noise level");
    let imu_noise = Normal::new(0.0, script.imu_noise.max(0.0)).expect("finite noise level");
    let duration = script.duration();

    let emg_len = (duration * script.emg_rate_hz).round() as usize;
    let emg = (0..emg_len)
        .map(|k| {
            let g = script.gesture_at(k as f64 / script.emg_rate_hz);
            std::array::from_fn(|ch| script.channel_mean(g, ch) + emg_noise.sample(&mut rng))
        })
        .collect::<Vec<[f64; CHANNELS]>>();

    let dt = 1.0 / script.imu_rate_hz;
    let imu_len = (duration * script.imu_rate_hz).round() as usize;
    let mut imu = Vec::with_capacity(imu_len);
    let mut accel = Vec::with_capacity(imu_len);
    for k in 0..imu_len {
        let t = k as f64 * dt;
        let (p, v) = script.pointer_at(t);
        let (_, v_next) = script.pointer_at(t + dt);
        let state = [p[0], p[1], v[0], v[1]];
        imu.push(std::array::from_fn(|i| state[i] / script.r_arm + imu_noise.sample(&mut rng)));
        accel.push([(v_next[0] - v[0]) / dt, (v_next[1] - v[1]) / dt]);
    }

    RecordedSession {
        emg_rate_hz: script.emg_rate_hz,
        imu_rate_hz: script.imu_rate_hz,
        r_arm: script.r_arm,
        training: script.calibration.clone(),
        truth: script.live.clone(),
        emg,
        imu,
        accel,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let script = SynthScript::standard_protocol();
        let a = serde_json::to_string(&synth_session(3, &script)).unwrap();
        let b = serde_json::to_string(&synth_session(3, &script)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, serde_json::to_string(&synth_session(4, &script)).unwrap());
    }

    #[test]
    fn stream_lengths() {
        let s = synth_session(0, &SynthScript::calibration_only(3.0));
        assert_eq!(s.emg.len(), 15 * 200);
        assert_eq!(s.imu.len(), 15 * 50);
        assert_eq!(s.accel.len(), s.imu.len());
    }

    #[test]
    fn pointer_path_interpolates() {
        let script = SynthScript::standard_protocol();
        let (p, v) = script.pointer_at(62.5);
        assert!((p[0] - 0.15).abs() < 1e-12 && p[1] == 0.0);
        assert!((v[0] - 0.06).abs() < 1e-12);
        assert_eq!(script.pointer_at(0.0), ([0.0, 0.0], [0.0, 0.0]));
        assert_eq!(script.pointer_at(1e3), ([0.0, 0.0], [0.0, 0.0]));
    }

    #[test]
    fn imu_matches_measurement_model_without_noise() {
        let script = SynthScript {
            imu_noise: 0.0,
            ..SynthScript::standard_protocol()
        };
        let s = synth_session(1, &script);
        let k = (62.5 * script.imu_rate_hz) as usize;
        let (p, v) = script.pointer_at(62.5);
        let y: Vec<f64> = s.imu[k].iter().map(|o| o * script.r_arm).collect();
        for (a, b) in y.iter().zip([p[0], p[1], v[0], v[1]]) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
