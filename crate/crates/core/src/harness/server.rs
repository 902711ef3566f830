//! TCP session service. One thread per connection; within a session the
//! message loop stays responsive while a worker thread executes the plan.

use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream, ToSocketAddrs};
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};

use log::{info, warn};

use super::episode::{execute_plan, EpisodeEvent};
use super::protocol::{ClientMessage, ServerMessage};
use super::scenario::Scenario;
use super::HarnessError;
use crate::controller::SwarmState;
use crate::decoder::EventKind;
use crate::geom::{self, Intention, Point, Polygon};
use crate::planner::{self, HidState};
use crate::rows;

#[derive(Debug, Clone)]
pub struct ServerOptions {
    /// Template for every session: agent count, initial swarm, gains, planner, limits.
    pub scenario: Scenario,
    /// Send a `StateUpdate` every this many controller rounds (and at each segment end).
    pub cadence: usize,
}

pub struct Server {
    listener: TcpListener,
    options: Arc<ServerOptions>,
}

impl Server {
    pub fn bind(addr: impl ToSocketAddrs, options: ServerOptions) -> Result<Self, HarnessError> {
        options.scenario.validate()?;
        Ok(Self {
            listener: TcpListener::bind(addr)?,
            options: Arc::new(options),
        })
    }

    pub fn local_addr(&self) -> std::io::Result<std::net::SocketAddr> {
        self.listener.local_addr()
    }

    /// Accepts connections forever.
    pub fn run(self) -> Result<(), HarnessError> {
        for stream in self.listener.incoming() {
            let stream = match stream {
                Ok(s) => s,
                Err(e) => {
                    warn!("accept failed: {e}");
                    continue;
                }
            };
            let options = Arc::clone(&self.options);
            thread::spawn(move || {
                let peer = stream.peer_addr().ok();
                info!("session opened: {peer:?}");
                if let Err(e) = handle_connection(stream, &options) {
                    warn!("session {peer:?} ended with error: {e}");
                }
                info!("session closed: {peer:?}");
            });
        }
        Ok(())
    }
}

pub fn serve(addr: impl ToSocketAddrs, options: ServerOptions) -> Result<(), HarnessError> {
    let server = Server::bind(addr, options)?;
    info!("listening on {}", server.local_addr()?);
    server.run()
}

fn handle_connection(stream: TcpStream, options: &ServerOptions) -> Result<(), HarnessError> {
    let reader = BufReader::new(stream.try_clone()?);
    run_session(reader, stream, options)
}

type Shared<W> = Arc<Mutex<W>>;

fn send<W: Write>(out: &Shared<W>, msg: &ServerMessage) -> std::io::Result<()> {
    let mut w = out.lock().unwrap_or_else(|e| e.into_inner());
    w.write_all(msg.to_line().as_bytes())?;
    w.flush()
}

struct Draft {
    vertices: Vec<Point>,
    rotation: f64,
    scale: f64,
    centroid: Point,
}

#[derive(Clone)]
struct Snapshot {
    state: SwarmState,
    hid: HidState,
}

struct Worker {
    cancel: Arc<AtomicBool>,
    handle: JoinHandle<()>,
}

impl Worker {
    fn stop(self) {
        self.cancel.store(true, Ordering::SeqCst);
        let _ = self.handle.join();
    }
}

/// World outline of a HID state: shape about its centroid, scaled, rotated, placed.
fn outline(h: &HidState) -> Vec<Point> {
    let Ok(poly) = h.polygon() else {
        return h.shape.clone();
    };
    let m = geom::polygon_metrics(&poly);
    let rel: Vec<Point> = poly.vertices().iter().map(|v| [v[0] - m.centroid[0], v[1] - m.centroid[1]]).collect();
    rows::to_points(&geom::place(&rows::from_points(&rel), h.scale, h.rotation, h.centroid))
}

/// Serves one session over any line-oriented stream pair. Returns when the
/// reader reaches end of input.
pub fn run_session<R: BufRead, W: Write + Send + 'static>(reader: R, writer: W, options: &ServerOptions) -> Result<(), HarnessError> {
    let scenario = &options.scenario;
    let (state, hid) = scenario.initial_state()?;
    let snapshot = Arc::new(Mutex::new(Snapshot { state, hid }));
    let out: Shared<W> = Arc::new(Mutex::new(writer));
    let mut draft = Draft {
        vertices: Vec::new(),
        rotation: 0.0,
        scale: 1.0,
        centroid: [0.0, 0.0],
    };
    let mut worker: Option<Worker> = None;

    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let msg = match serde_json::from_str::<ClientMessage>(&line) {
            Ok(m) => m,
            Err(e) => {
                send(&out, &ServerMessage::Error { msg: format!("malformed message: {e}") })?;
                continue;
            }
        };
        let msg = match msg {
            ClientMessage::PointerEvent { kind, x, y } => match kind {
                EventKind::LeftClick => ClientMessage::AddVertex { x, y },
                EventKind::RightClick => ClientMessage::SetCentroid { x, y },
                EventKind::ScrollUp => ClientMessage::SetRotation { rad: draft.rotation + 1f64.to_radians() },
                EventKind::ScrollDown => ClientMessage::SetRotation { rad: draft.rotation - 1f64.to_radians() },
                EventKind::Move | EventKind::None => {
                    send(&out, &ServerMessage::Ack)?;
                    continue;
                }
            },
            m => m,
        };
        let reply = match msg {
            ClientMessage::AddVertex { x, y } if x.is_finite() && y.is_finite() => {
                draft.vertices.push([x, y]);
                ServerMessage::Ack
            }
            ClientMessage::ClearShape => {
                draft.vertices.clear();
                ServerMessage::Ack
            }
            ClientMessage::SetRotation { rad } if rad.is_finite() => {
                draft.rotation = geom::normalize_angle(rad);
                ServerMessage::Ack
            }
            ClientMessage::SetScale { s } if s.is_finite() && s > 0.0 => {
                draft.scale = s;
                ServerMessage::Ack
            }
            ClientMessage::SetCentroid { x, y } if x.is_finite() && y.is_finite() => {
                draft.centroid = [x, y];
                ServerMessage::Ack
            }
            ClientMessage::Commit => {
                if let Some(w) = worker.take() {
                    w.stop();
                }
                match commit(&draft, scenario, &snapshot, &out, options.cadence) {
                    Ok(w) => {
                        worker = Some(w);
                        continue;
                    }
                    Err(e) => ServerMessage::Error { msg: e.to_string() },
                }
            }
            other => ServerMessage::Error {
                msg: format!("invalid value in {other:?}"),
            },
        };
        send(&out, &reply)?;
    }
    if let Some(w) = worker.take() {
        w.stop();
    }
    Ok(())
}

fn commit<W: Write + Send + 'static>(
    draft: &Draft,
    scenario: &Scenario,
    snapshot: &Arc<Mutex<Snapshot>>,
    out: &Shared<W>,
    cadence: usize,
) -> Result<Worker, HarnessError> {
    let shape = Polygon::new(draft.vertices.clone()).map_err(|e| HarnessError::Invalid {
        field: "shape".into(),
        msg: e.to_string(),
    })?;
    let intention = Intention::new(shape, draft.scale, draft.rotation, draft.centroid).map_err(|e| HarnessError::Invalid {
        field: "intention".into(),
        msg: e.to_string(),
    })?;
    let start = snapshot.lock().unwrap_or_else(|e| e.into_inner()).clone();
    let config = scenario.planner_config();
    let plan = planner::plan(&start.hid, &intention, &config)?;
    send(
        out,
        &ServerMessage::PlanPreview {
            shapes: plan.hid_states[1..].iter().map(outline).collect(),
            modes: plan.modes(),
        },
    )?;

    let cancel = Arc::new(AtomicBool::new(false));
    let flag = Arc::clone(&cancel);
    let out = Arc::clone(out);
    let snapshot = Arc::clone(snapshot);
    let gains = scenario.gains;
    let limits = scenario.segment_limits();
    let cadence = cadence.max(1);
    let handle = thread::spawn(move || {
        let mut pending: Option<ServerMessage> = None;
        let mut observer = |event: EpisodeEvent<'_>| {
            if flag.load(Ordering::SeqCst) {
                return ControlFlow::Break(());
            }
            let sent = match event {
                EpisodeEvent::Step {
                    segment,
                    mode,
                    record,
                    state,
                } => {
                    let update = ServerMessage::StateUpdate {
                        t: record.t,
                        positions: rows::to_points(&state.p),
                        e_f: record.e_f,
                        e_c: record.e_c,
                        segment,
                        mode,
                    };
                    if record.t % cadence == 0 {
                        pending = None;
                        send(&out, &update)
                    } else {
                        pending = Some(update);
                        Ok(())
                    }
                }
                EpisodeEvent::SegmentDone(_) => pending.take().map_or(Ok(()), |u| send(&out, &u)),
                EpisodeEvent::Planned(_) => Ok(()),
            };
            if sent.is_err() {
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        };
        let result = execute_plan(&plan.steps, &start.state, &gains, &config.radii, &limits, &mut observer);
        match result {
            Ok(exec) => {
                let reached = exec.segments.len();
                let hid = if reached == 0 { start.hid.clone() } else { plan.hid_states[reached].clone() };
                *snapshot.lock().unwrap_or_else(|e| e.into_inner()) = Snapshot { state: exec.state, hid };
                if !exec.cancelled {
                    let _ = send(&out, &ServerMessage::Done);
                }
            }
            Err(e) => {
                let _ = send(&out, &ServerMessage::Error { msg: e.to_string() });
            }
        }
    });
    Ok(Worker { cancel, handle })
}
