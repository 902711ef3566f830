//! Episode orchestration: plan once, then run one controller segment per
//! subgoal, streaming every round to an observer.

use std::io::{BufRead, Write};
use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::scenario::Scenario;
use super::HarnessError;
use crate::controller::{self, ControllerGains, PlanStep, SegmentLimits, SegmentTrace, StabilityCertificate, StepRecord, SwarmState};
use crate::geom::Point;
use crate::netgraph::{self, SpectralSummary};
use crate::planner::{self, Plan};
use crate::rows;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentReport {
    pub index: usize,
    pub mode: usize,
    pub radius: f64,
    pub trace: SegmentTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    pub plan: Plan,
    pub segments: Vec<SegmentReport>,
    pub final_state: SwarmState,
    pub e_f: f64,
    pub e_c: f64,
    pub converged: bool,
    /// Not serialized, so traces of identical runs stay byte-identical.
    #[serde(skip)]
    pub wall_time: Duration,
}

/// What an observer sees while an episode runs.
#[derive(Debug, Clone, Copy)]
pub enum EpisodeEvent<'a> {
    Planned(&'a Plan),
    Step {
        segment: usize,
        mode: usize,
        record: &'a StepRecord,
        state: &'a SwarmState,
    },
    SegmentDone(&'a SegmentReport),
}

pub type Observer<'o> = dyn FnMut(EpisodeEvent<'_>) -> ControlFlow<()> + 'o;

/// Result of driving the swarm through a plan.
#[derive(Debug, Clone)]
pub struct Execution {
    pub segments: Vec<SegmentReport>,
    pub state: SwarmState,
    pub cancelled: bool,
}

/// Runs each plan step as a segment, carrying the full swarm state across
/// segment boundaries. Stops early if the observer breaks.
pub fn execute_plan(
    steps: &[PlanStep],
    initial: &SwarmState,
    gains: &ControllerGains,
    radii: &[f64],
    limits: &SegmentLimits,
    observer: &mut Observer<'_>,
) -> Result<Execution, HarnessError> {
    let mut state = initial.clone();
    let mut segments = Vec::with_capacity(steps.len());
    for (index, step) in steps.iter().enumerate() {
        let mut forward = |record: &StepRecord, s: &SwarmState| {
            observer(EpisodeEvent::Step {
                segment: index,
                mode: step.mode,
                record,
                state: s,
            })
        };
        let outcome = controller::run_segment_observed(&state, step, gains, radii, limits, &mut forward)
            .map_err(|source| HarnessError::Segment { index, source })?;
        state = outcome.state;
        let report = SegmentReport {
            index,
            mode: step.mode,
            radius: radii[step.mode],
            trace: outcome.trace,
        };
        let stop = outcome.cancelled || observer(EpisodeEvent::SegmentDone(&report)).is_break();
        segments.push(report);
        if stop {
            return Ok(Execution { segments, state, cancelled: true });
        }
    }
    Ok(Execution {
        segments,
        state,
        cancelled: false,
    })
}

pub fn run_episode(scenario: &Scenario) -> Result<EpisodeTrace, HarnessError> {
    run_episode_observed(scenario, &mut |_| ControlFlow::Continue(()))
}

/// Plan from the scenario's initial state, then execute every segment.
pub fn run_episode_observed(scenario: &Scenario, observer: &mut Observer<'_>) -> Result<EpisodeTrace, HarnessError> {
    let started = Instant::now();
    scenario.validate()?;
    let (state, h0) = scenario.initial_state()?;
    let config = scenario.planner_config();
    let plan = planner::plan(&h0, &scenario.intention()?, &config)?;
    // The observer cannot cancel a batch episode; its verdict is ignored here.
    let _ = observer(EpisodeEvent::Planned(&plan));
    let exec = execute_plan(&plan.steps, &state, &scenario.gains, &config.radii, &scenario.segment_limits(), observer)?;
    let last = plan.steps.last().expect("plans have at least one step");
    let (e_f, e_c) = controller::errors(&exec.state, last);
    Ok(EpisodeTrace {
        converged: !exec.cancelled && exec.segments.iter().all(|s| s.trace.converged),
        plan,
        segments: exec.segments,
        final_state: exec.state,
        e_f,
        e_c,
        wall_time: started.elapsed(),
    })
}

/// One line of the JSON-lines trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TraceLine {
    Plan {
        plan: Plan,
    },
    Step {
        segment: usize,
        mode: usize,
        t: usize,
        e_f: f64,
        e_c: f64,
        positions: Vec<Point>,
    },
    Segment {
        index: usize,
        mode: usize,
        radius: f64,
        steps_used: usize,
        converged: bool,
    },
    Summary {
        segments: usize,
        e_f: f64,
        e_c: f64,
        converged: bool,
    },
}

fn emit(out: &mut dyn Write, line: &TraceLine) -> std::io::Result<()> {
    serde_json::to_writer(&mut *out, line)?;
    out.write_all(b"\n")
}

/// Runs the scenario and writes one JSON line per plan, controller round,
/// finished segment and a closing summary.
pub fn write_trace(scenario: &Scenario, out: &mut dyn Write) -> Result<EpisodeTrace, HarnessError> {
    let mut failure: Option<std::io::Error> = None;
    let mut observer = |event: EpisodeEvent<'_>| {
        let line = match event {
            EpisodeEvent::Planned(plan) => TraceLine::Plan { plan: plan.clone() },
            EpisodeEvent::Step {
                segment,
                mode,
                record,
                state,
            } => TraceLine::Step {
                segment,
                mode,
                t: record.t,
                e_f: record.e_f,
                e_c: record.e_c,
                positions: rows::to_points(&state.p),
            },
            EpisodeEvent::SegmentDone(r) => TraceLine::Segment {
                index: r.index,
                mode: r.mode,
                radius: r.radius,
                steps_used: r.trace.steps_used,
                converged: r.trace.converged,
            },
        };
        match emit(out, &line) {
            Ok(()) => ControlFlow::Continue(()),
            Err(e) => {
                failure = Some(e);
                ControlFlow::Break(())
            }
        }
    };
    let trace = run_episode_observed(scenario, &mut observer)?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    emit(
        out,
        &TraceLine::Summary {
            segments: trace.segments.len(),
            e_f: trace.e_f,
            e_c: trace.e_c,
            converged: trace.converged,
        },
    )?;
    out.flush()?;
    Ok(trace)
}

pub fn read_trace(input: impl BufRead) -> Result<Vec<TraceLine>, HarnessError> {
    input
        .lines()
        .filter(|l| !matches!(l, Ok(s) if s.trim().is_empty()))
        .map(|l| Ok(serde_json::from_str(&l?)?))
        .collect()
}

/// Recomputes `e^f`, `e^c` of every step line from its stored positions and
/// the plan, and requires bit-exact agreement. Returns the number of steps checked.
pub fn replay_check(lines: &[TraceLine]) -> Result<usize, HarnessError> {
    let Some(TraceLine::Plan { plan }) = lines.first() else {
        return Err(HarnessError::Trace("trace does not start with a plan line".into()));
    };
    let mut checked = 0;
    for line in lines {
        if let TraceLine::Step {
            segment,
            t,
            e_f,
            e_c,
            positions,
            ..
        } = line
        {
            let step = plan
                .steps
                .get(*segment)
                .ok_or_else(|| HarnessError::Trace(format!("segment {segment} is not in the plan")))?;
            let state = SwarmState::at_rest(rows::from_points(positions));
            let (f, c) = controller::errors(&state, step);
            if f != *e_f || c != *e_c {
                return Err(HarnessError::Trace(format!(
                    "segment {segment} step {t}: stored ({e_f}, {e_c}) recomputed ({f}, {c})"
                )));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

/// Spectra and stability certificate for one configuration and radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectraRow {
    pub label: String,
    pub radius: f64,
    pub edges: usize,
    pub summary: SpectralSummary,
    pub certificate: StabilityCertificate,
}

fn spectra_row(label: String, positions: &DMatrix<f64>, radius: f64, gains: &ControllerGains) -> Result<SpectraRow, HarnessError> {
    let graph = netgraph::build_nu_disk_graph(positions, radius).map_err(planner::PlanError::from)?;
    let summary = netgraph::spectral_summary(&graph).map_err(planner::PlanError::from)?;
    let certificate = controller::stability_gain_bound(&summary, gains.alpha, gains.kp);
    Ok(SpectraRow {
        label,
        radius,
        edges: graph.edge_count(),
        summary,
        certificate,
    })
}

/// Initial configuration under every mode radius, then each planned
/// subgoal under its scheduled radius.
pub fn spectra_report(scenario: &Scenario) -> Result<Vec<SpectraRow>, HarnessError> {
    scenario.validate()?;
    let (state, h0) = scenario.initial_state()?;
    let config = scenario.planner_config();
    let mut rows = Vec::new();
    for (mu, &radius) in config.radii.iter().enumerate() {
        rows.push(spectra_row(format!("initial/mode{mu}"), &state.p, radius, &scenario.gains)?);
    }
    let plan = planner::plan(&h0, &scenario.intention()?, &config)?;
    for (l, step) in plan.steps.iter().enumerate() {
        rows.push(spectra_row(format!("step{l}/mode{}", step.mode), &step.target_positions(), config.radii[step.mode], &scenario.gains)?);
    }
    Ok(rows)
}
