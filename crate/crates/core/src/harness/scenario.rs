//! Scenario files: everything needed to reproduce an episode.

use std::path::Path;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::controller::{ControllerGains, SegmentLimits, SwarmState};
use crate::geom::{self, Intention, Point, Polygon};
use crate::planner::{HidState, PlannerConfig, ScheduleMethod};
use crate::rows;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub agents: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default = "default_gains")]
    pub gains: ControllerGains,
    #[serde(default)]
    pub planner: PlannerSettings,
    pub goal: GoalSpec,
    #[serde(default)]
    pub limits: SegmentLimits,
    #[serde(default)]
    pub timescales: Timescales,
}

fn default_gains() -> ControllerGains {
    ControllerGains { alpha: 0.15, kp: 0.03 }
}

/// Initial swarm: either a filled shape placed in the world (optionally
/// jittered from the seed) or explicit positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    Formation {
        shape: Polygon,
        #[serde(default = "one")]
        scale: f64,
        #[serde(default)]
        rotation: f64,
        #[serde(default)]
        centroid: Point,
        /// Half-width of a uniform per-coordinate perturbation.
        #[serde(default)]
        jitter: f64,
    },
    Positions(Vec<Point>),
}

fn one() -> f64 {
    1.0
}

fn unit_square() -> Polygon {
    Polygon::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).expect("unit square is simple")
}

impl Default for InitialSpec {
    fn default() -> Self {
        InitialSpec::Formation {
            shape: unit_square(),
            scale: 1.0,
            rotation: 0.0,
            centroid: [0.0, 0.0],
            jitter: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoalSpec {
    pub shape: Polygon,
    #[serde(default = "one")]
    pub scale: f64,
    /// Radians, counter-clockwise.
    #[serde(default)]
    pub rotation: f64,
    #[serde(default)]
    pub centroid: Point,
}

/// Planner parameters; omitted fields take the reference defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlannerSettings {
    pub horizon: usize,
    pub a: f64,
    pub b: f64,
    pub q: f64,
    pub r: f64,
    pub q_f: f64,
    pub radii: Vec<f64>,
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub switch_penalty: f64,
    pub schedule: ScheduleMethod,
}

impl Default for PlannerSettings {
    fn default() -> Self {
        let p = PlannerConfig::reference_defaults(2);
        Self {
            horizon: p.horizon,
            a: p.a,
            b: p.b,
            q: p.q,
            r: p.r,
            q_f: p.q_f,
            radii: p.radii,
            kappa1: p.kappa1,
            kappa2: p.kappa2,
            kappa3: p.kappa3,
            switch_penalty: p.switch_penalty,
            schedule: p.schedule,
        }
    }
}

/// Step ratios between the three loops: controller rounds per interpreter
/// step, and interpreter steps per human command.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Timescales {
    pub controller_per_interpreter: usize,
    pub interpreter_per_human: usize,
}

impl Default for Timescales {
    fn default() -> Self {
        Self {
            controller_per_interpreter: 5000,
            interpreter_per_human: 100,
        }
    }
}

fn field_error(field: &str, msg: impl std::fmt::Display) -> HarnessError {
    HarnessError::Invalid {
        field: field.to_string(),
        msg: msg.to_string(),
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let scenario: Self = serde_json::from_str(text)?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn planner_config(&self) -> PlannerConfig {
        let p = &self.planner;
        PlannerConfig {
            horizon: p.horizon,
            a: p.a,
            b: p.b,
            q: p.q,
            r: p.r,
            q_f: p.q_f,
            radii: p.radii.clone(),
            kappa1: p.kappa1,
            kappa2: p.kappa2,
            kappa3: p.kappa3,
            agents: self.agents,
            switch_penalty: p.switch_penalty,
            schedule: p.schedule,
        }
    }

    /// Controller rounds allowed per segment.
    pub fn segment_limits(&self) -> SegmentLimits {
        SegmentLimits {
            max_steps: self.limits.max_steps.min(self.timescales.controller_per_interpreter),
            ..self.limits
        }
    }

    pub fn intention(&self) -> Result<Intention, HarnessError> {
        Intention::new(self.goal.shape.clone(), self.goal.scale, self.goal.rotation, self.goal.centroid)
            .map_err(|e| field_error("goal", e))
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.agents < 2 {
            return Err(field_error("agents", format!("must be at least 2, got {}", self.agents)));
        }
        self.gains.validate().map_err(|e| field_error("gains", e))?;
        self.planner_config().validate().map_err(|e| field_error("planner", e))?;
        self.intention()?;
        let l = &self.limits;
        if l.max_steps == 0 || !(l.tol_f > 0.0) || !(l.tol_c > 0.0) {
            return Err(field_error("limits", "max_steps and tolerances must be positive"));
        }
        let t = &self.timescales;
        if t.controller_per_interpreter == 0 {
            return Err(field_error("timescales.controller_per_interpreter", "must be positive"));
        }
        if self.planner.horizon > t.interpreter_per_human {
            return Err(field_error(
                "planner.horizon",
                format!("horizon {} exceeds timescales.interpreter_per_human {}", self.planner.horizon, t.interpreter_per_human),
            ));
        }
        match &self.initial {
            InitialSpec::Formation { scale, jitter, .. } => {
                if !(scale.is_finite() && *scale > 0.0) {
                    return Err(field_error("initial.formation.scale", "must be positive"));
                }
                if !(jitter.is_finite() && *jitter >= 0.0) {
                    return Err(field_error("initial.formation.jitter", "must be nonnegative"));
                }
            }
            InitialSpec::Positions(points) => {
                if points.len() != self.agents {
                    return Err(field_error(
                        "initial.positions",
                        format!("has {} points but agents is {}", points.len(), self.agents),
                    ));
                }
                if points.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(field_error("initial.positions", "contains non-finite values"));
                }
            }
        }
        Ok(())
    }

    /// Initial swarm state and HID state, expanded deterministically from the seed.
    pub fn initial_state(&self) -> Result<(SwarmState, HidState), HarnessError> {
        match &self.initial {
            InitialSpec::Formation {
                shape,
                scale,
                rotation,
                centroid,
                jitter,
            } => {
                let z = geom::fill_polygon_uniform(shape, self.agents).map_err(|e| field_error("initial.formation.shape", e))?;
                let mut p = geom::place(&z.z, *scale, *rotation, *centroid);
                if *jitter > 0.0 {
                    let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                    p.iter_mut().for_each(|x| *x += rng.random_range(-*jitter..=*jitter));
                }
                let h = HidState {
                    shape: shape.vertices().to_vec(),
                    scale: *scale,
                    rotation: *rotation,
                    centroid: *centroid,
                };
                Ok((SwarmState::at_rest(p), h))
            }
            InitialSpec::Positions(points) => {
                let p = rows::from_points(points);
                Ok((SwarmState::at_rest(p.clone()), hid_from_positions(&p)?))
            }
        }
    }
}

/// HID state describing an arbitrary swarm: convex hull about the mean,
/// unit scale, zero rotation.
pub fn hid_from_positions(p: &DMatrix<f64>) -> Result<HidState, HarnessError> {
    let points = rows::to_points(p);
    let n = points.len().max(1) as f64;
    let mean = [points.iter().map(|q| q[0]).sum::<f64>() / n, points.iter().map(|q| q[1]).sum::<f64>() / n];
    let hull: Vec<Point> = geom::convex_hull(&points).iter().map(|q| [q[0] - mean[0], q[1] - mean[1]]).collect();
    let shape = Polygon::new(hull).map_err(|e| field_error("initial.positions", format!("convex hull is degenerate: {e}")))?;
    Ok(HidState {
        shape: shape.vertices().to_vec(),
        scale: 1.0,
        rotation: 0.0,
        centroid: mean,
    })
}
