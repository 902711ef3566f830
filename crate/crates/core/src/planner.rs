//! Interpreter planner.
//!
//! The operator's goal is reached through a slow, fully actuated linear
//! system on `h = [shape vertices, s, θ, c]` (the human-interpretable
//! dynamics, HID) steered by finite-horizon LQR. Each intermediate `h(l)` is
//! turned back into a formation and every communication mode is priced by
//! connectivity plus communication cost; a mode schedule is then chosen on
//! top of the fixed HID trajectory.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::controller::PlanStep;
use crate::geom::{self, GeomError, Intention, Point, Polygon};
use crate::netgraph::{self, GraphError, ModeCost};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("R + BᵀPB is singular at stage {stage}")]
    Singular { stage: usize },
    #[error("intermediate shape at step {step} is not a simple polygon: {source}")]
    BadShape { step: usize, source: GeomError },
    #[error("no feasible communication mode at step {step}")]
    Infeasible { step: usize },
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Gains `K(0..N)` and cost-to-go matrices `P(0..=N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LqrSolution {
    pub gains: Vec<DMatrix<f64>>,
    pub values: Vec<DMatrix<f64>>,
}

/// Backward Riccati recursion from `P(N) = Q_f`:
/// `K(l) = (R + BᵀP(l+1)B)⁻¹ BᵀP(l+1)A`,
/// `P(l) = Q + AᵀP(l+1)A − AᵀP(l+1)B K(l)`.
pub fn riccati_lqr(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
    q_f: &DMatrix<f64>,
    horizon: usize,
) -> Result<LqrSolution, PlanError> {
    let n = a.nrows();
    let k = b.ncols();
    let square = |m: &DMatrix<f64>, d: usize| m.nrows() == d && m.ncols() == d;
    if !square(a, n) || b.nrows() != n || !square(q, n) || !square(q_f, n) || !square(r, k) {
        return Err(PlanError::InvalidInput("LQR matrix dimensions are inconsistent".into()));
    }
    let mut values = vec![DMatrix::zeros(n, n); horizon + 1];
    let mut gains = vec![DMatrix::zeros(k, n); horizon];
    values[horizon] = q_f.clone();
    for l in (0..horizon).rev() {
        let p = &values[l + 1];
        let bt_p = b.transpose() * p;
        let gram = r + &bt_p * b;
        let gain = gram
            .lu()
            .solve(&(&bt_p * a))
            .ok_or(PlanError::Singular { stage: l })?;
        let at_p = a.transpose() * p;
        let next = q + &at_p * a - &at_p * b * &gain;
        values[l] = (&next + next.transpose()) * 0.5;
        gains[l] = gain;
    }
    Ok(LqrSolution { gains, values })
}

/// HID state. Flattened as `[x1, y1, …, xv, yv, s, θ, cx, cy]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HidState {
    pub shape: Vec<Point>,
    pub scale: f64,
    pub rotation: f64,
    pub centroid: Point,
}

impl HidState {
    pub fn dimension(&self) -> usize {
        2 * self.shape.len() + 4
    }

    pub fn to_vector(&self) -> DVector<f64> {
        let mut h: Vec<f64> = self.shape.iter().flatten().copied().collect();
        h.extend([self.scale, self.rotation, self.centroid[0], self.centroid[1]]);
        DVector::from_vec(h)
    }

    pub fn from_vector(h: &DVector<f64>) -> Result<Self, PlanError> {
        let d = h.len();
        if d < 4 || !d.is_multiple_of(2) {
            return Err(PlanError::InvalidInput(format!("HID vector of length {d} is not 2v+4")));
        }
        let v = (d - 4) / 2;
        Ok(Self {
            shape: (0..v).map(|i| [h[2 * i], h[2 * i + 1]]).collect(),
            scale: h[2 * v],
            rotation: h[2 * v + 1],
            centroid: [h[2 * v + 2], h[2 * v + 3]],
        })
    }

    pub fn polygon(&self) -> Result<Polygon, GeomError> {
        Polygon::new(self.shape.clone())
    }
}

/// How the mode sequence is chosen once the HID trajectory is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleMethod {
    #[default]
    Dp,
    Argmin,
}

fn default_one() -> f64 {
    1.0
}
fn default_r() -> f64 {
    100.0
}
fn default_qf() -> f64 {
    1500.0
}

/// Planner parameters. `a`, `b`, `q`, `r`, `q_f` are multiples of the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannerConfig {
    pub horizon: usize,
    #[serde(default = "default_one")]
    pub a: f64,
    #[serde(default = "default_one")]
    pub b: f64,
    #[serde(default = "default_one")]
    pub q: f64,
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default = "default_qf")]
    pub q_f: f64,
    pub radii: Vec<f64>,
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub agents: usize,
    #[serde(default)]
    pub switch_penalty: f64,
    #[serde(default)]
    pub schedule: ScheduleMethod,
}

impl PlannerConfig {
    /// Reference defaults: N=8, A=B=Q=I, R=100·I, Q_f=1500·I, radii {10, 40, 150},
    /// κ = (10⁶, 0.05, 2·10⁴).
    pub fn reference_defaults(agents: usize) -> Self {
        Self {
            horizon: 8,
            a: 1.0,
            b: 1.0,
            q: 1.0,
            r: 100.0,
            q_f: 1500.0,
            radii: vec![10.0, 40.0, 150.0],
            kappa1: 1e6,
            kappa2: 0.05,
            kappa3: 2e4,
            agents,
            switch_penalty: 0.0,
            schedule: ScheduleMethod::Dp,
        }
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        let bad = |msg: String| Err(PlanError::InvalidInput(msg));
        if self.horizon == 0 {
            return bad("horizon must be at least 1".into());
        }
        if self.agents < 2 {
            return bad(format!("agents must be at least 2, got {}", self.agents));
        }
        if self.radii.is_empty() {
            return bad("at least one mode radius is required".into());
        }
        if let Some(r) = self.radii.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return bad(format!("mode radius {r} must be positive"));
        }
        for (name, x) in [("q", self.q), ("r", self.r), ("q_f", self.q_f)] {
            if !(x.is_finite() && x > 0.0) {
                return bad(format!("{name} must be positive, got {x}"));
            }
        }
        for (name, x) in [("a", self.a), ("b", self.b)] {
            if !x.is_finite() || (name == "b" && x == 0.0) {
                return bad(format!("{name} must be finite and b nonzero, got {x}"));
            }
        }
        for (name, x) in [("kappa1", self.kappa1), ("kappa2", self.kappa2), ("kappa3", self.kappa3)] {
            if !(x.is_finite() && x >= 0.0) {
                return bad(format!("{name} must be nonnegative, got {x}"));
            }
        }
        if self.kappa2 == 0.0 && self.kappa1 != 0.0 {
            return bad("kappa2 must be positive".into());
        }
        if !(self.switch_penalty.is_finite() && self.switch_penalty >= 0.0) {
            return bad(format!("switch_penalty must be nonnegative, got {}", self.switch_penalty));
        }
        Ok(())
    }

    /// `(A, B, Q, R, Q_f)` of dimension `d`.
    pub fn matrices(&self, d: usize) -> [DMatrix<f64>; 5] {
        let eye = |x: f64| DMatrix::identity(d, d) * x;
        [eye(self.a), eye(self.b), eye(self.q), eye(self.r), eye(self.q_f)]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rollout {
    /// `h(0..=N)`.
    pub states: Vec<DVector<f64>>,
    /// `u(0..N)`.
    pub controls: Vec<DVector<f64>>,
    pub cost: f64,
}

/// Runs `h(l+1) = A h(l) + B u(l)` with `u(l) = −K(l)(h(l) − h_d)` and
/// evaluates `J_HID` on the error coordinates.
pub fn hid_rollout_with(
    h0: &DVector<f64>,
    h_d: &DVector<f64>,
    [a, b, q, r, q_f]: &[DMatrix<f64>; 5],
    horizon: usize,
) -> Result<Rollout, PlanError> {
    if h0.len() != h_d.len() || a.nrows() != h0.len() {
        return Err(PlanError::InvalidInput(format!(
            "HID dimensions differ: h0 {}, h_d {}, A {}",
            h0.len(),
            h_d.len(),
            a.nrows()
        )));
    }
    let lqr = riccati_lqr(a, b, q, r, q_f, horizon)?;
    let mut states = vec![h0.clone()];
    let mut controls = Vec::with_capacity(horizon);
    let mut cost = 0.0;
    for gain in &lqr.gains {
        let h = states.last().unwrap();
        let e = h - h_d;
        let u = -(gain * &e);
        cost += e.dot(&(q * &e)) + u.dot(&(r * &u));
        states.push(a * h + b * &u);
        controls.push(u);
    }
    let e = states.last().unwrap() - h_d;
    cost += e.dot(&(q_f * &e));
    Ok(Rollout { states, controls, cost })
}

/// [`hid_rollout_with`] using the identity-multiple matrices of `config`.
pub fn hid_rollout(h0: &HidState, h_d: &HidState, config: &PlannerConfig) -> Result<Rollout, PlanError> {
    if h0.dimension() != h_d.dimension() {
        return Err(PlanError::InvalidInput(format!(
            "HID dimensions differ: {} vs {} (match vertex counts first)",
            h0.dimension(),
            h_d.dimension()
        )));
    }
    hid_rollout_with(&h0.to_vector(), &h_d.to_vector(), &config.matrices(h0.dimension()), config.horizon)
}

/// `J_CON + J_COM` of formation `z` scaled by `scale`, one entry per mode.
pub fn mode_costs(z: &DMatrix<f64>, scale: f64, config: &PlannerConfig) -> Result<Vec<ModeCost>, PlanError> {
    let positions = z * scale;
    config
        .radii
        .iter()
        .map(|&radius| {
            let graph = netgraph::build_nu_disk_graph(&positions, radius)?;
            let con = netgraph::connectivity_cost(&graph, config.kappa1, config.kappa2)?;
            Ok(con + netgraph::communication_cost(&graph, config.kappa3))
        })
        .collect()
}

/// Per-step argmin over feasible modes, ties to the lowest index.
pub fn schedule_argmin(costs: &[Vec<ModeCost>]) -> Result<Vec<usize>, PlanError> {
    costs
        .iter()
        .enumerate()
        .map(|(l, row)| best_index(row.iter().map(|c| c.value())).ok_or(PlanError::Infeasible { step: l }))
        .collect()
}

fn best_index(values: impl Iterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.enumerate() {
        if v.is_finite() && best.is_none_or(|(_, b)| v < b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

/// Backward dynamic program over modes with a constant penalty per switch.
/// Ties resolve to the lowest mode index.
pub fn schedule_dp(costs: &[Vec<ModeCost>], switch_penalty: f64) -> Result<Vec<usize>, PlanError> {
    let n = costs.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let m = costs[0].len();
    for (l, row) in costs.iter().enumerate() {
        if row.len() != m {
            return Err(PlanError::InvalidInput(format!("cost row {l} has {} modes, expected {m}", row.len())));
        }
        if !row.iter().any(|c| c.is_feasible()) {
            return Err(PlanError::Infeasible { step: l });
        }
    }
    // value[l][μ]: best cost of steps l.. given mode μ at step l
    let mut value = vec![vec![f64::INFINITY; m]; n];
    let mut next = vec![vec![0usize; m]; n];
    value[n - 1] = costs[n - 1].iter().map(|c| c.value()).collect();
    for l in (0..n - 1).rev() {
        for mu in 0..m {
            let here = costs[l][mu].value();
            if !here.is_finite() {
                continue;
            }
            let step_cost = |nu: usize| value[l + 1][nu] + if nu == mu { 0.0 } else { switch_penalty };
            let nu = best_index((0..m).map(step_cost)).ok_or(PlanError::Infeasible { step: l + 1 })?;
            value[l][mu] = here + step_cost(nu);
            next[l][mu] = nu;
        }
    }
    let mut modes = vec![best_index(value[0].iter().copied()).ok_or(PlanError::Infeasible { step: 0 })?];
    for l in 0..n - 1 {
        modes.push(next[l][modes[l]]);
    }
    Ok(modes)
}

/// Schedule plus the cost table it was chosen from (`costs[l][μ]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSchedule {
    pub modes: Vec<usize>,
    pub costs: Vec<Vec<ModeCost>>,
}

fn choose(costs: Vec<Vec<ModeCost>>, config: &PlannerConfig) -> Result<ModeSchedule, PlanError> {
    let modes = match config.schedule {
        ScheduleMethod::Dp => schedule_dp(&costs, config.switch_penalty)?,
        ScheduleMethod::Argmin => schedule_argmin(&costs)?,
    };
    Ok(ModeSchedule { modes, costs })
}

fn regenerate(state: &HidState, agents: usize, step: usize) -> Result<DMatrix<f64>, PlanError> {
    let polygon = state.polygon().map_err(|source| PlanError::BadShape { step, source })?;
    Ok(geom::fill_polygon_uniform(&polygon, agents)?.z)
}

/// Prices every mode at every subgoal and picks the schedule.
pub fn mode_schedule(subgoals: &[HidState], config: &PlannerConfig) -> Result<ModeSchedule, PlanError> {
    config.validate()?;
    let costs = subgoals
        .iter()
        .enumerate()
        .map(|(l, h)| mode_costs(&regenerate(h, config.agents, l)?, h.scale, config))
        .collect::<Result<Vec<_>, _>>()?;
    choose(costs, config)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
    /// `h(0..=N)`.
    pub hid_states: Vec<HidState>,
    pub controls: Vec<Vec<f64>>,
    /// `mode_costs[l][μ]` for subgoal `l`.
    pub mode_costs: Vec<Vec<ModeCost>>,
    pub hid_cost: f64,
    pub total_cost: f64,
}

impl Plan {
    pub fn modes(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.mode).collect()
    }
}

/// The goal HID state for an intention, with vertex count matched to `h0` and
/// the rotation unwrapped onto the shortest path from `h0.rotation`.
pub fn goal_state(h0: &HidState, intention: &Intention) -> Result<(HidState, HidState), PlanError> {
    let start = h0.polygon()?;
    let (start, goal) = geom::match_vertex_counts(&start, &intention.shape);
    let from = HidState {
        shape: start.vertices().to_vec(),
        ..h0.clone()
    };
    let to = HidState {
        shape: goal.vertices().to_vec(),
        scale: intention.scale,
        rotation: h0.rotation + geom::normalize_angle(intention.rotation - h0.rotation),
        centroid: intention.centroid,
    };
    Ok((from, to))
}

/// Full planning pipeline: vertex matching, HID rollout, subgoal
/// regeneration, mode scheduling.
pub fn plan(h0: &HidState, intention: &Intention, config: &PlannerConfig) -> Result<Plan, PlanError> {
    config.validate()?;
    if !(h0.scale.is_finite() && h0.scale > 0.0) {
        return Err(PlanError::InvalidInput(format!("initial scale must be positive, got {}", h0.scale)));
    }
    let (from, to) = goal_state(h0, intention)?;
    let rollout = hid_rollout(&from, &to, config)?;
    let hid_states = rollout
        .states
        .iter()
        .map(HidState::from_vector)
        .collect::<Result<Vec<_>, _>>()?;

    let mut formations = Vec::with_capacity(config.horizon);
    for (l, h) in hid_states[1..].iter().enumerate() {
        if !(h.scale > 0.0) {
            return Err(PlanError::InvalidInput(format!("subgoal {l} has nonpositive scale {}", h.scale)));
        }
        formations.push(regenerate(h, config.agents, l)?);
    }
    let costs = formations
        .iter()
        .zip(&hid_states[1..])
        .map(|(z, h)| mode_costs(z, h.scale, config))
        .collect::<Result<Vec<_>, _>>()?;
    let schedule = choose(costs, config)?;

    let mode_total: f64 = schedule
        .modes
        .iter()
        .zip(&schedule.costs)
        .map(|(&mu, row)| row[mu].value())
        .sum();
    let steps = formations
        .into_iter()
        .zip(&hid_states[1..])
        .zip(&schedule.modes)
        .map(|((z, h), &mode)| PlanStep {
            z,
            scale: h.scale,
            centroid: h.centroid,
            rotation: geom::normalize_angle(h.rotation),
            mode,
        })
        .collect();
    Ok(Plan {
        steps,
        hid_states,
        controls: rollout.controls.iter().map(|u| u.iter().copied().collect()).collect(),
        mode_costs: schedule.costs,
        hid_cost: rollout.cost,
        total_cost: rollout.cost + mode_total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scalar(x: f64) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, x)
    }

    #[test]
    fn scalar_one_step_gain() {
        let sol = riccati_lqr(&scalar(1.0), &scalar(1.0), &scalar(1.0), &scalar(100.0), &scalar(1500.0), 1).unwrap();
        assert!((sol.gains[0][(0, 0)] - 0.9375).abs() < 1e-12);
        assert!((sol.values[0][(0, 0)] - 94.75).abs() < 1e-9);
    }

    #[test]
    fn zero_cost_gives_zero_gains() {
        let z = DMatrix::zeros(2, 2);
        let sol = riccati_lqr(&DMatrix::identity(2, 2), &DMatrix::identity(2, 2), &z, &DMatrix::identity(2, 2), &z, 4)
            .unwrap();
        assert!(sol.gains.iter().all(|k| k.iter().all(|&x| x == 0.0)));
    }

    #[test]
    fn singular_gram_is_reported() {
        let z = scalar(0.0);
        let err = riccati_lqr(&scalar(1.0), &scalar(1.0), &z, &z, &z, 2).unwrap_err();
        assert!(matches!(err, PlanError::Singular { .. }));
    }

    #[test]
    fn scalar_eight_step_gains() {
        let sol = riccati_lqr(&scalar(1.0), &scalar(1.0), &scalar(1.0), &scalar(100.0), &scalar(1500.0), 8).unwrap();
        let expected = [0.14498, 0.15957, 0.17987, 0.20931, 0.25472, 0.33178, 0.48652, 0.9375];
        for (k, e) in sol.gains.iter().zip(expected) {
            assert!((k[(0, 0)] - e).abs() < 5e-5, "{} vs {e}", k[(0, 0)]);
        }
    }

    #[test]
    fn hid_round_trip() {
        let h = HidState {
            shape: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            scale: 2.0,
            rotation: 0.5,
            centroid: [3.0, 4.0],
        };
        assert_eq!(h.dimension(), 10);
        assert_eq!(HidState::from_vector(&h.to_vector()).unwrap(), h);
        assert!(HidState::from_vector(&DVector::zeros(7)).is_err());
    }

    fn square_state() -> HidState {
        HidState {
            shape: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            scale: 1.0,
            rotation: 0.0,
            centroid: [0.0, 0.0],
        }
    }

    #[test]
    fn rollout_at_goal_is_still() {
        let h = square_state();
        let cfg = PlannerConfig::reference_defaults(4);
        let r = hid_rollout(&h, &h, &cfg).unwrap();
        assert_eq!(r.cost, 0.0);
        assert!(r.controls.iter().all(|u| u.iter().all(|&x| x == 0.0)));
        assert!(r.states.iter().all(|s| *s == h.to_vector()));
    }

    #[test]
    fn rollout_dimension_mismatch() {
        let mut tri = square_state();
        tri.shape.pop();
        let cfg = PlannerConfig::reference_defaults(4);
        assert!(matches!(hid_rollout(&square_state(), &tri, &cfg), Err(PlanError::InvalidInput(_))));
    }

    #[test]
    fn larger_r_gives_smaller_steps() {
        let h0 = square_state();
        let hd = HidState {
            shape: vec![[0.0, 0.0], [3.0, 0.0], [3.0, 1.0], [0.0, 2.0]],
            scale: 4.0,
            rotation: 1.0,
            centroid: [10.0, -5.0],
        };
        let mut prev = f64::INFINITY;
        for r in [1.0, 100.0, 1e4] {
            let cfg = PlannerConfig { r, horizon: 10, ..PlannerConfig::reference_defaults(4) };
            let roll = hid_rollout(&h0, &hd, &cfg).unwrap();
            let max_step = roll.states.windows(2).map(|w| (&w[1] - &w[0]).norm()).fold(0.0, f64::max);
            assert!(max_step < prev);
            prev = max_step;
        }
    }

    fn cost_table(rows: &[&[f64]]) -> Vec<Vec<ModeCost>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| if x.is_finite() { ModeCost::Finite(x) } else { ModeCost::Infeasible }).collect())
            .collect()
    }

    fn enumerate_best(costs: &[Vec<ModeCost>], penalty: f64) -> f64 {
        let n = costs.len();
        let m = costs[0].len();
        let mut best = f64::INFINITY;
        for code in 0..m.pow(n as u32) {
            let mut c = code;
            let seq: Vec<usize> = (0..n)
                .map(|_| {
                    let mu = c % m;
                    c /= m;
                    mu
                })
                .collect();
            best = best.min(schedule_cost(costs, &seq, penalty));
        }
        best
    }

    fn schedule_cost(costs: &[Vec<ModeCost>], seq: &[usize], penalty: f64) -> f64 {
        let switches = seq.windows(2).filter(|w| w[0] != w[1]).count() as f64;
        seq.iter().enumerate().map(|(l, &mu)| costs[l][mu].value()).sum::<f64>() + penalty * switches
    }

    #[test]
    fn dp_matches_enumeration_and_argmin() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let n = rng.random_range(1..=6);
            let m = rng.random_range(1..=3);
            let costs: Vec<Vec<ModeCost>> = (0..n)
                .map(|_| {
                    let mut row: Vec<ModeCost> = (0..m)
                        .map(|_| {
                            if rng.random_bool(0.2) {
                                ModeCost::Infeasible
                            } else {
                                ModeCost::Finite(rng.random_range(0..5) as f64)
                            }
                        })
                        .collect();
                    row[rng.random_range(0..m)] = ModeCost::Finite(rng.random_range(0..5) as f64);
                    row
                })
                .collect();
            let dp = schedule_dp(&costs, 0.0).unwrap();
            assert_eq!(dp, schedule_argmin(&costs).unwrap());
            assert_eq!(schedule_cost(&costs, &dp, 0.0), enumerate_best(&costs, 0.0));
            let penalty = rng.random_range(0.0..3.0);
            let dp = schedule_dp(&costs, penalty).unwrap();
            assert!((schedule_cost(&costs, &dp, penalty) - enumerate_best(&costs, penalty)).abs() < 1e-12);
        }
    }

    #[test]
    fn penalty_suppresses_switching() {
        let costs = cost_table(&[&[1.0, 2.0], &[2.0, 1.0], &[1.0, 2.0]]);
        assert_eq!(schedule_dp(&costs, 0.0).unwrap(), vec![0, 1, 0]);
        assert_eq!(schedule_dp(&costs, 5.0).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn infeasible_step_is_named() {
        let costs = cost_table(&[&[1.0], &[f64::INFINITY]]);
        assert_eq!(schedule_dp(&costs, 0.0), Err(PlanError::Infeasible { step: 1 }));
        assert_eq!(schedule_argmin(&costs), Err(PlanError::Infeasible { step: 1 }));
    }

    #[test]
    fn identical_radii_pick_first_mode() {
        let cfg = PlannerConfig {
            radii: vec![5.0, 5.0],
            ..PlannerConfig::reference_defaults(9)
        };
        let states = vec![square_state(); 3];
        let sched = mode_schedule(&states, &cfg).unwrap();
        assert_eq!(sched.modes, vec![0, 0, 0]);
    }

    #[test]
    fn plan_holding_position() {
        let h0 = square_state();
        let shape = h0.polygon().unwrap();
        let intention = Intention::new(shape, 1.0, 0.0, [0.0, 0.0]).unwrap();
        let cfg = PlannerConfig {
            radii: vec![0.5, 5.0],
            ..PlannerConfig::reference_defaults(9)
        };
        let plan = plan(&h0, &intention, &cfg).unwrap();
        assert_eq!(plan.steps.len(), 8);
        assert_eq!(plan.hid_cost, 0.0);
        let per_step = plan.mode_costs[0][plan.steps[0].mode].value();
        assert!((plan.total_cost - 8.0 * per_step).abs() < 1e-6 * per_step.abs());
        let z0 = &plan.steps[0].z;
        assert!(plan.steps.iter().all(|s| &s.z == z0));
    }

    #[test]
    fn single_step_plan_follows_terminal_gain() {
        let h0 = square_state();
        let goal = Polygon::new(vec![[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]]).unwrap();
        let intention = Intention::new(goal, 3.0, 0.0, [10.0, 0.0]).unwrap();
        let cfg = PlannerConfig {
            horizon: 1,
            ..PlannerConfig::reference_defaults(9)
        };
        let plan = plan(&h0, &intention, &cfg).unwrap();
        assert_eq!(plan.steps.len(), 1);
        let expected = 1.0 + 0.9375 * 2.0;
        assert!((plan.steps[0].scale - expected).abs() < 1e-12);
        assert!((plan.steps[0].centroid[0] - 9.375).abs() < 1e-12);
    }

    #[test]
    fn rotation_takes_short_way_round() {
        let h0 = HidState { rotation: 3.0, ..square_state() };
        let intention = Intention::new(h0.polygon().unwrap(), 1.0, -3.0, [0.0, 0.0]).unwrap();
        let (_, to) = goal_state(&h0, &intention).unwrap();
        assert!((to.rotation - (2.0 * std::f64::consts::PI - 3.0)).abs() < 1e-12);
    }
}
