//! Gesture stream → pointer events.
//!
//! `fist` is a left click, `spread` a right click, `wave_up`/`wave_down`
//! scroll, `normal` only moves the pointer. Each action fires once per
//! gesture onset, after the gesture has been held for `min_hold` frames.

use serde::{Deserialize, Serialize};

use super::Gesture;
use crate::geom::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Move,
    LeftClick,
    RightClick,
    ScrollUp,
    ScrollDown,
    None,
}

impl EventKind {
    pub fn for_gesture(g: Gesture) -> Self {
        match g {
            Gesture::Normal => EventKind::Move,
            Gesture::Fist => EventKind::LeftClick,
            Gesture::Spread => EventKind::RightClick,
            Gesture::WaveUp => EventKind::ScrollUp,
            Gesture::WaveDown => EventKind::ScrollDown,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointerEvent {
    pub kind: EventKind,
    pub position: Point,
    pub time: f64,
}

/// Pointer position estimate at a point in time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointerSample {
    pub time: f64,
    pub position: Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventConfig {
    pub min_hold: usize,
}

impl Default for EventConfig {
    fn default() -> Self {
        Self { min_hold: 3 }
    }
}

fn nearest(pointer: &[PointerSample], t: f64) -> Point {
    let idx = pointer.partition_point(|s| s.time < t);
    let candidates = [idx.checked_sub(1), (idx < pointer.len()).then_some(idx)];
    candidates
        .into_iter()
        .flatten()
        .min_by(|&a, &b| (pointer[a].time - t).abs().total_cmp(&(pointer[b].time - t).abs()))
        .map_or([0.0, 0.0], |i| pointer[i].position)
}

/// One event per gesture frame. `gestures` holds `(time, gesture)` pairs and
/// `pointer` must be sorted by time; positions use the nearest sample.
pub fn gestures_to_events(gestures: &[(f64, Gesture)], pointer: &[PointerSample], config: &EventConfig) -> Vec<PointerEvent> {
    let hold = config.min_hold.max(1);
    let mut run: Option<(Gesture, usize)> = None;
    gestures
        .iter()
        .map(|&(time, g)| {
            let count = match run {
                Some((prev, c)) if prev == g => c + 1,
                _ => 1,
            };
            run = Some((g, count));
            let action = EventKind::for_gesture(g);
            let kind = if action != EventKind::Move && count == hold {
                action
            } else {
                EventKind::Move
            };
            PointerEvent {
                kind,
                position: nearest(pointer, time),
                time,
            }
        })
        .collect()
}
