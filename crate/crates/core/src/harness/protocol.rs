//! Session protocol: newline-delimited JSON objects tagged by `type`.

use serde::{Deserialize, Serialize};

use crate::decoder::EventKind;
use crate::geom::Point;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum ClientMessage {
    AddVertex { x: f64, y: f64 },
    ClearShape,
    SetRotation { rad: f64 },
    SetScale { s: f64 },
    SetCentroid { x: f64, y: f64 },
    Commit,
    /// Decoded armband event forwarded by the client.
    PointerEvent { kind: EventKind, x: f64, y: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum ServerMessage {
    Ack,
    /// World-placed outline of every subgoal, and its mode.
    PlanPreview { shapes: Vec<Vec<Point>>, modes: Vec<usize> },
    StateUpdate {
        t: usize,
        positions: Vec<Point>,
        e_f: f64,
        e_c: f64,
        segment: usize,
        mode: usize,
    },
    Done,
    Error { msg: String },
}

impl ServerMessage {
    pub fn to_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("server messages always serialize");
        s.push('\n');
        s
    }
}
