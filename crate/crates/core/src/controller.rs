//! Decentralized second-order formation controller.
//!
//! Each agent runs a Jacobi-overrelaxation style shape update on
//! `p + v`, steers its velocity toward the commanded centroid using its own
//! dynamic-average-consensus (FODAC) estimate of the swarm centroid, and
//! keeps its previous position `q` for the consensus correction. Stacked
//! over the swarm, one synchronous round is the affine map
//! `X(t+1) = A X(t) + F` with `X = [p; v; ĉ; q]` ([`assemble_system`]);
//! [`agent_step`] is the same map evaluated from one agent's local view.

use std::ops::ControlFlow;

use log::warn;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{self, Point};
use crate::netgraph::{self, CommGraph, GraphError, SpectralSummary};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControllerError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("communication graph is disconnected")]
    Disconnected,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerGains {
    pub alpha: f64,
    pub kp: f64,
}

impl ControllerGains {
    pub fn new(alpha: f64, kp: f64) -> Result<Self, ControllerError> {
        let gains = Self { alpha, kp };
        gains.validate()?;
        Ok(gains)
    }

    pub fn validate(&self) -> Result<(), ControllerError> {
        for (name, g) in [("alpha", self.alpha), ("kp", self.kp)] {
            if !(g > 0.0 && g < 1.0) {
                return Err(ControllerError::InvalidInput(format!("{name} must lie in (0, 1), got {g}")));
            }
        }
        Ok(())
    }
}

/// Positions, velocities, centroid estimates and previous positions of the
/// whole swarm, one `M×2` matrix each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwarmState {
    #[serde(with = "crate::rows")]
    pub p: DMatrix<f64>,
    #[serde(with = "crate::rows")]
    pub v: DMatrix<f64>,
    #[serde(with = "crate::rows")]
    pub c_hat: DMatrix<f64>,
    #[serde(with = "crate::rows")]
    pub q: DMatrix<f64>,
}

impl SwarmState {
    /// Standard initialization: zero velocity, `ĉ(0) = p(0)`, `q(0) = p(0)`.
    pub fn at_rest(p: DMatrix<f64>) -> Self {
        let m = p.nrows();
        Self {
            v: DMatrix::zeros(m, 2),
            c_hat: p.clone(),
            q: p.clone(),
            p,
        }
    }

    pub fn len(&self) -> usize {
        self.p.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.p.nrows() == 0
    }

    /// Mean agent position.
    pub fn centroid(&self) -> Point {
        mean_row(&self.p)
    }

    /// `[p; v; ĉ; q]` as a `4M×2` matrix.
    pub fn stacked(&self) -> DMatrix<f64> {
        let m = self.len();
        let mut x = DMatrix::zeros(4 * m, 2);
        for (k, block) in [&self.p, &self.v, &self.c_hat, &self.q].into_iter().enumerate() {
            x.rows_mut(k * m, m).copy_from(block);
        }
        x
    }

    pub fn from_stacked(x: &DMatrix<f64>) -> Self {
        let m = x.nrows() / 4;
        Self {
            p: x.rows(0, m).into_owned(),
            v: x.rows(m, m).into_owned(),
            c_hat: x.rows(2 * m, m).into_owned(),
            q: x.rows(3 * m, m).into_owned(),
        }
    }

    pub fn agent(&self, i: usize) -> AgentState {
        AgentState {
            p: row(&self.p, i),
            v: row(&self.v, i),
            c_hat: row(&self.c_hat, i),
            q: row(&self.q, i),
        }
    }

    fn set_agent(&mut self, i: usize, a: &AgentState) {
        for k in 0..2 {
            self.p[(i, k)] = a.p[k];
            self.v[(i, k)] = a.v[k];
            self.c_hat[(i, k)] = a.c_hat[k];
            self.q[(i, k)] = a.q[k];
        }
    }
}

fn row(m: &DMatrix<f64>, i: usize) -> Point {
    [m[(i, 0)], m[(i, 1)]]
}

pub(crate) fn mean_row(m: &DMatrix<f64>) -> Point {
    let n = m.nrows().max(1) as f64;
    [m.column(0).sum() / n, m.column(1).sum() / n]
}

/// One interpreter subgoal: formation, placement and communication mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanStep {
    #[serde(with = "crate::rows")]
    pub z: DMatrix<f64>,
    pub scale: f64,
    pub centroid: Point,
    pub rotation: f64,
    /// Index into the mode radii table (0-based).
    pub mode: usize,
}

impl PlanStep {
    /// `Z^d = 1·c + s · z · R(θ)ᵀ`.
    pub fn target_positions(&self) -> DMatrix<f64> {
        geom::place(&self.z, self.scale, self.rotation, self.centroid)
    }

    /// `X^d = [Z^d; 0; 1·c; Z^d]`.
    pub fn desired_state(&self) -> SwarmState {
        let zd = self.target_positions();
        let m = zd.nrows();
        SwarmState {
            p: zd.clone(),
            v: DMatrix::zeros(m, 2),
            c_hat: DMatrix::from_fn(m, 2, |_, k| self.centroid[k]),
            q: zd,
        }
    }
}

/// Composite-Lyapunov stability certificate for one graph and gain pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityCertificate {
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
    /// Largest admissible proportional gain, `δ1·δ2 / 2`.
    pub kp_max: f64,
    /// The gain the `S` matrix was assembled with.
    pub kp: f64,
    pub s_matrix: [[f64; 3]; 3],
    pub leading_minors: [f64; 3],
    pub is_m_matrix: bool,
}

/// Builds the 3×3 interconnection matrix
/// `S = [[δ1, −k^p, 0], [−1, δ2, −1], [−1, 0, 1]]` for the candidate `kp` and
/// checks whether it is an M-matrix. Disconnected graphs give a zero bound
/// and a failed certificate.
pub fn stability_gain_bound(spectra: &SpectralSummary, alpha: f64, kp: f64) -> StabilityCertificate {
    let delta1 = 1.0 - (1.0 - alpha * spectra.lambda2_normalized).powi(2);
    let delta2 = 1.0 - (1.0 - spectra.lambda2_weighted).powi(2);
    let delta3 = 1.0;
    let s = [[delta1, -kp, 0.0], [-1.0, delta2, -1.0], [-1.0, 0.0, delta3]];
    let minor2 = s[0][0] * s[1][1] - s[0][1] * s[1][0];
    let minor3 = s[0][0] * (s[1][1] * s[2][2] - s[1][2] * s[2][1])
        - s[0][1] * (s[1][0] * s[2][2] - s[1][2] * s[2][0])
        + s[0][2] * (s[1][0] * s[2][1] - s[1][1] * s[2][0]);
    let minors = [s[0][0], minor2, minor3];
    let off_diagonal_ok = (0..3).all(|i| (0..3).all(|j| i == j || s[i][j] <= 0.0));
    let connected = spectra.connected
        && spectra.lambda2_normalized > netgraph::CONNECTIVITY_TOL
        && spectra.lambda2_weighted > netgraph::CONNECTIVITY_TOL;
    StabilityCertificate {
        delta1,
        delta2,
        delta3,
        kp_max: if connected { delta1 * delta2 / 2.0 } else { 0.0 },
        kp,
        s_matrix: s,
        leading_minors: minors,
        is_m_matrix: connected && off_diagonal_ok && minors.iter().all(|&m| m > 0.0),
    }
}

/// Dense affine form `X(t+1) = A X(t) + F` of one synchronous round.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSystem {
    pub a: DMatrix<f64>,
    pub f: DMatrix<f64>,
    pub x_desired: DMatrix<f64>,
}

impl DenseSystem {
    pub fn step(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        &self.a * x + &self.f
    }
}

/// Assembles the stacked closed-loop matrices for a fixed graph and subgoal.
pub fn assemble_system(
    graph: &CommGraph,
    gains: &ControllerGains,
    step: &PlanStep,
) -> Result<DenseSystem, ControllerError> {
    let m = graph.len();
    if step.z.nrows() != m {
        return Err(ControllerError::InvalidInput(format!(
            "formation has {} rows but the graph has {m} nodes",
            step.z.nrows()
        )));
    }
    if graph.degrees().contains(&0) {
        return Err(ControllerError::Disconnected);
    }
    let (alpha, kp) = (gains.alpha, gains.kp);
    let rw = graph.random_walk_laplacian();
    let w = graph.weights();
    let eye = DMatrix::<f64>::identity(m, m);

    let mut a = DMatrix::zeros(4 * m, 4 * m);
    let mut put = |r: usize, c: usize, block: &DMatrix<f64>| {
        a.view_mut((r * m, c * m), (m, m)).copy_from(block);
    };
    put(0, 0, &eye);
    put(0, 1, &eye);
    put(1, 0, &(-alpha * &rw - kp * &eye));
    put(1, 1, &(-alpha * &rw));
    put(1, 2, &(-kp * w));
    put(1, 3, &(kp * &eye));
    put(2, 0, &eye);
    put(2, 2, w);
    put(2, 3, &(-&eye));
    put(3, 0, &eye);

    let zr = geom::rotate_scale(&step.z, 1.0, step.rotation);
    let mut f = DMatrix::zeros(4 * m, 2);
    let drive = (step.scale * alpha) * (&rw * zr);
    for i in 0..m {
        for k in 0..2 {
            f[(m + i, k)] = drive[(i, k)] + kp * step.centroid[k];
        }
    }
    Ok(DenseSystem {
        a,
        f,
        x_desired: step.desired_state().stacked(),
    })
}

/// One agent's slice of the swarm state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub p: Point,
    pub v: Point,
    pub c_hat: Point,
    pub q: Point,
}

/// What agent `i` receives from neighbor `j` in one round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborMessage {
    /// `p_j + v_j`, the neighbor's next position.
    pub p_plus_v: Point,
    pub c_hat: Point,
    /// Metropolis weight `w_ij`.
    pub weight: f64,
    /// The neighbor's formation slot `z_j` (unrotated, unscaled).
    pub z: Point,
}

fn rotate(p: Point, rotation: f64) -> Point {
    let (s, c) = rotation.sin_cos();
    [c * p[0] - s * p[1], s * p[0] + c * p[1]]
}

/// Per-agent controller update using only local and neighbor information.
///
/// ```text
/// ĉ⁺ = ĉ + Σ_j w_ij (ĉ_j − ĉ) + p − q
/// v⁺ = −α[(p + v) − avg_j(p_j + v_j)] + sα[(zR)_i − avg_j (zR)_j] − k^p (ĉ⁺ − c)
/// p⁺ = p + v,  q⁺ = p
/// ```
///
/// Isolated agents drop both bracketed terms.
pub fn agent_step(
    own: &AgentState,
    own_z: Point,
    neighbors: &[NeighborMessage],
    step: &PlanStep,
    gains: &ControllerGains,
) -> AgentState {
    let mut c_next = [0.0; 2];
    let mut v_next = [0.0; 2];
    let zr_i = rotate(own_z, step.rotation);
    let d = neighbors.len() as f64;
    for k in 0..2 {
        let consensus: f64 = neighbors.iter().map(|n| n.weight * (n.c_hat[k] - own.c_hat[k])).sum();
        c_next[k] = own.c_hat[k] + consensus + own.p[k] - own.q[k];

        let mut shape = 0.0;
        if !neighbors.is_empty() {
            let avg_pv = neighbors.iter().map(|n| n.p_plus_v[k]).sum::<f64>() / d;
            let avg_zr = neighbors.iter().map(|n| rotate(n.z, step.rotation)[k]).sum::<f64>() / d;
            shape = -gains.alpha * ((own.p[k] + own.v[k]) - avg_pv)
                + step.scale * gains.alpha * (zr_i[k] - avg_zr);
        }
        v_next[k] = shape - gains.kp * (c_next[k] - step.centroid[k]);
    }
    AgentState {
        p: [own.p[0] + own.v[0], own.p[1] + own.v[1]],
        v: v_next,
        c_hat: c_next,
        q: own.p,
    }
}

/// Dense FODAC round `ĉ⁺ = W ĉ + p − q`.
pub fn fodac_update(
    graph: &CommGraph,
    c_hat: &DMatrix<f64>,
    p: &DMatrix<f64>,
    q: &DMatrix<f64>,
) -> DMatrix<f64> {
    graph.weights() * c_hat + p - q
}

/// Neighbor lists with Metropolis weights, fixed for the duration of a segment.
#[derive(Debug, Clone)]
pub struct Neighborhood {
    links: Vec<Vec<(usize, f64)>>,
}

impl Neighborhood {
    pub fn new(graph: &CommGraph) -> Self {
        let w = graph.weights();
        Self {
            links: (0..graph.len())
                .map(|i| graph.neighbors(i).map(|j| (j, w[(i, j)])).collect())
                .collect(),
        }
    }

    pub fn degree(&self, i: usize) -> usize {
        self.links[i].len()
    }

    /// One synchronous round: every agent reads time-`t` values, then all commit.
    pub fn step(&self, state: &SwarmState, step: &PlanStep, gains: &ControllerGains) -> SwarmState {
        let mut next = state.clone();
        let mut inbox = Vec::new();
        for (i, links) in self.links.iter().enumerate() {
            inbox.clear();
            inbox.extend(links.iter().map(|&(j, weight)| NeighborMessage {
                p_plus_v: [state.p[(j, 0)] + state.v[(j, 0)], state.p[(j, 1)] + state.v[(j, 1)]],
                c_hat: row(&state.c_hat, j),
                weight,
                z: row(&step.z, j),
            }));
            let updated = agent_step(&state.agent(i), row(&step.z, i), &inbox, step, gains);
            next.set_agent(i, &updated);
        }
        next
    }
}

/// Formation error (shape only, translation removed) and centroid error.
pub fn errors(state: &SwarmState, step: &PlanStep) -> (f64, f64) {
    let mean = mean_row(&state.p);
    let target = geom::rotate_scale(&step.z, step.scale, step.rotation);
    let mut ef2 = 0.0;
    for i in 0..state.len() {
        for k in 0..2 {
            ef2 += (state.p[(i, k)] - mean[k] - target[(i, k)]).powi(2);
        }
    }
    let ec = ((mean[0] - step.centroid[0]).powi(2) + (mean[1] - step.centroid[1]).powi(2)).sqrt();
    (ef2.sqrt(), ec)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SegmentLimits {
    pub max_steps: usize,
    pub tol_f: f64,
    pub tol_c: f64,
}

impl Default for SegmentLimits {
    fn default() -> Self {
        Self {
            max_steps: 2000,
            tol_f: 1e-3,
            tol_c: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: usize,
    pub e_f: f64,
    pub e_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentTrace {
    pub records: Vec<StepRecord>,
    pub steps_used: usize,
    pub converged: bool,
}

/// Outcome of [`run_segment_observed`].
#[derive(Debug, Clone)]
pub struct SegmentOutcome {
    pub state: SwarmState,
    pub trace: SegmentTrace,
    pub cancelled: bool,
}

/// Drives the swarm toward `step` with the graph built from the current
/// positions and held fixed, until both errors are within tolerance or
/// `max_steps` rounds have run.
pub fn run_segment(
    state: &SwarmState,
    step: &PlanStep,
    gains: &ControllerGains,
    radii: &[f64],
    limits: &SegmentLimits,
) -> Result<(SwarmState, SegmentTrace), ControllerError> {
    let out = run_segment_observed(state, step, gains, radii, limits, &mut |_, _| ControlFlow::Continue(()))?;
    Ok((out.state, out.trace))
}

/// [`run_segment`] with a per-round observer. The observer sees every recorded
/// round (including `t = 0`) and may stop the run early.
pub fn run_segment_observed(
    state: &SwarmState,
    step: &PlanStep,
    gains: &ControllerGains,
    radii: &[f64],
    limits: &SegmentLimits,
    observer: &mut dyn FnMut(&StepRecord, &SwarmState) -> ControlFlow<()>,
) -> Result<SegmentOutcome, ControllerError> {
    let radius = *radii.get(step.mode).ok_or_else(|| {
        ControllerError::InvalidInput(format!("mode {} outside radii table of {}", step.mode, radii.len()))
    })?;
    if step.z.nrows() != state.len() {
        return Err(ControllerError::InvalidInput(format!(
            "formation has {} rows but the swarm has {} agents",
            step.z.nrows(),
            state.len()
        )));
    }
    let graph = netgraph::build_nu_disk_graph(&state.p, radius)?;
    if state.len() > 1 && !netgraph::spectral_summary(&graph)?.connected {
        warn!("graph at radius {radius} is disconnected; running best effort");
    }
    let hood = Neighborhood::new(&graph);

    let mut current = state.clone();
    let mut records = Vec::new();
    let mut converged;
    let mut cancelled = false;
    let mut t = 0;
    loop {
        let (e_f, e_c) = errors(&current, step);
        let record = StepRecord { t, e_f, e_c };
        records.push(record);
        converged = e_f <= limits.tol_f && e_c <= limits.tol_c;
        if observer(&record, &current).is_break() {
            cancelled = true;
            break;
        }
        if converged || t >= limits.max_steps {
            break;
        }
        current = hood.step(&current, step, gains);
        t += 1;
    }
    Ok(SegmentOutcome {
        state: current,
        trace: SegmentTrace {
            records,
            steps_used: t,
            converged,
        },
        cancelled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgraph::{build_nu_disk_graph, spectral_summary};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, m: usize, scale: f64) -> DMatrix<f64> {
        DMatrix::from_fn(m, 2, |_, _| rng.random_range(-scale..scale))
    }

    fn centered(mut z: DMatrix<f64>) -> DMatrix<f64> {
        let mean = mean_row(&z);
        for mut r in z.row_iter_mut() {
            r[0] -= mean[0];
            r[1] -= mean[1];
        }
        z
    }

    fn random_case(seed: u64, m: usize) -> (CommGraph, PlanStep, SwarmState) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let p = random_matrix(&mut rng, m, 1.0);
            let g = build_nu_disk_graph(&p, 1.2).unwrap();
            if !spectral_summary(&g).unwrap().connected {
                continue;
            }
            let step = PlanStep {
                z: centered(random_matrix(&mut rng, m, 1.0)),
                scale: rng.random_range(0.5..2.0),
                centroid: [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)],
                rotation: rng.random_range(-3.0..3.0),
                mode: 0,
            };
            let state = SwarmState {
                p: p.clone(),
                v: random_matrix(&mut rng, m, 0.3),
                c_hat: random_matrix(&mut rng, m, 1.0),
                q: random_matrix(&mut rng, m, 1.0),
            };
            return (g, step, state);
        }
    }

    #[test]
    fn gain_bound_for_k2() {
        let k2 = CommGraph::from_edges(2, &[(0, 1)], 1.0).unwrap();
        let s = spectral_summary(&k2).unwrap();
        let cert = stability_gain_bound(&s, 0.15, 0.03);
        assert!((cert.delta1 - 0.51).abs() < 1e-12);
        assert!((cert.delta2 - 1.0).abs() < 1e-12);
        assert!((cert.kp_max - 0.255).abs() < 1e-12);
        assert!(cert.is_m_matrix);
    }

    #[test]
    fn zero_gain_decouples() {
        let p3 = CommGraph::from_edges(3, &[(0, 1), (1, 2)], 1.0).unwrap();
        let cert = stability_gain_bound(&spectral_summary(&p3).unwrap(), 0.15, 0.0);
        assert!(cert.leading_minors.iter().all(|&m| m > 0.0));
        assert!((cert.leading_minors[2] - cert.delta1 * cert.delta2).abs() < 1e-15);
        assert!(cert.is_m_matrix);
    }

    #[test]
    fn disconnected_graph_fails_certificate() {
        let g = CommGraph::from_edges(4, &[(0, 1), (2, 3)], 1.0).unwrap();
        let cert = stability_gain_bound(&spectral_summary(&g).unwrap(), 0.15, 0.01);
        assert_eq!(cert.kp_max, 0.0);
        assert!(!cert.is_m_matrix);
    }

    #[test]
    fn gains_must_lie_in_unit_interval() {
        assert!(ControllerGains::new(0.15, 0.03).is_ok());
        assert!(ControllerGains::new(1.0, 0.03).is_err());
        assert!(ControllerGains::new(0.15, 0.0).is_err());
    }

    #[test]
    fn desired_state_is_fixed_point() {
        for seed in 0..10 {
            let (g, step, _) = random_case(seed, 6);
            let gains = ControllerGains::new(0.15, 0.03).unwrap();
            let sys = assemble_system(&g, &gains, &step).unwrap();
            let residual = (sys.step(&sys.x_desired) - &sys.x_desired).abs().max();
            assert!(residual <= 1e-9, "residual {residual}");
        }
    }

    #[test]
    fn origin_goal_has_no_drive() {
        let (g, mut step, _) = random_case(3, 5);
        step.z = DMatrix::zeros(5, 2);
        step.centroid = [0.0, 0.0];
        let sys = assemble_system(&g, &ControllerGains::new(0.15, 0.03).unwrap(), &step).unwrap();
        assert!(sys.f.iter().all(|&x| x == 0.0));
        assert_eq!(sys.step(&DMatrix::zeros(20, 2)), DMatrix::zeros(20, 2));
    }

    #[test]
    fn assemble_rejects_isolated_nodes() {
        let g = CommGraph::from_edges(3, &[(0, 1)], 1.0).unwrap();
        let step = PlanStep {
            z: DMatrix::zeros(3, 2),
            scale: 1.0,
            centroid: [0.0, 0.0],
            rotation: 0.0,
            mode: 0,
        };
        let gains = ControllerGains::new(0.15, 0.03).unwrap();
        assert_eq!(assemble_system(&g, &gains, &step), Err(ControllerError::Disconnected));
    }

    #[test]
    fn distributed_round_matches_dense_step() {
        let gains = ControllerGains::new(0.15, 0.03).unwrap();
        for seed in 0..20 {
            let (g, step, state) = random_case(100 + seed, 5);
            let dense = SwarmState::from_stacked(&assemble_system(&g, &gains, &step).unwrap().step(&state.stacked()));
            let local = Neighborhood::new(&g).step(&state, &step, &gains);
            let diff = (local.stacked() - dense.stacked()).abs().max();
            assert!(diff <= 1e-9, "seed {seed}: {diff}");
        }
    }

    #[test]
    fn agents_at_goal_stay_put() {
        let (g, step, _) = random_case(7, 6);
        let gains = ControllerGains::new(0.15, 0.03).unwrap();
        let goal = step.desired_state();
        let next = Neighborhood::new(&g).step(&goal, &step, &gains);
        assert!((next.stacked() - goal.stacked()).abs().max() < 1e-12);
    }

    #[test]
    fn isolated_agent_at_goal_centroid_stops() {
        let step = PlanStep {
            z: DMatrix::from_row_slice(1, 2, &[0.3, -0.2]),
            scale: 2.0,
            centroid: [1.0, 2.0],
            rotation: 0.4,
            mode: 0,
        };
        let own = AgentState {
            p: [5.0, 5.0],
            v: [0.0, 0.0],
            c_hat: [1.0, 2.0],
            q: [5.0, 5.0],
        };
        let next = agent_step(&own, [0.3, -0.2], &[], &step, &ControllerGains::new(0.15, 0.03).unwrap());
        assert_eq!(next.v, [0.0, 0.0]);
    }

    #[test]
    fn error_definitions() {
        let (_, step, _) = random_case(11, 6);
        let mut s = step.desired_state();
        let (ef, ec) = errors(&s, &step);
        assert!(ef < 1e-12 && ec < 1e-12);
        for mut r in s.p.row_iter_mut() {
            r[0] += 1.0;
        }
        let (ef, ec) = errors(&s, &step);
        assert!(ef < 1e-12);
        assert!((ec - 1.0).abs() < 1e-12);
    }

    #[test]
    fn errors_match_matrix_recomputation() {
        let (_, step, state) = random_case(12, 7);
        let (ef, ec) = errors(&state, &step);
        // Second path: centering projector and explicit rotation matrix.
        let m = state.len();
        let centering = DMatrix::<f64>::identity(m, m) - DMatrix::from_element(m, m, 1.0 / m as f64);
        let (s, c) = step.rotation.sin_cos();
        let rt = DMatrix::from_row_slice(2, 2, &[c, s, -s, c]);
        let ef2 = (&centering * &state.p - step.scale * &step.z * rt).norm();
        let mean = state.p.row_mean();
        let ec2 = ((mean[0] - step.centroid[0]).powi(2) + (mean[1] - step.centroid[1]).powi(2)).sqrt();
        assert!((ef - ef2).abs() < 1e-12);
        assert!((ec - ec2).abs() < 1e-12);
    }

    #[test]
    fn segment_starting_at_goal_takes_no_steps() {
        let (_, step, _) = random_case(13, 5);
        let gains = ControllerGains::new(0.15, 0.03).unwrap();
        let (_, trace) = run_segment(&step.desired_state(), &step, &gains, &[10.0], &SegmentLimits::default()).unwrap();
        assert_eq!(trace.steps_used, 0);
        assert!(trace.converged);
        assert_eq!(trace.records.len(), 1);
    }

    #[test]
    fn exhausted_segment_reports_not_converged() {
        let (_, step, state) = random_case(14, 5);
        let gains = ControllerGains::new(0.15, 0.03).unwrap();
        let limits = SegmentLimits { max_steps: 3, ..Default::default() };
        let (_, trace) = run_segment(&state, &step, &gains, &[10.0], &limits).unwrap();
        assert_eq!(trace.steps_used, 3);
        assert!(!trace.converged);
        assert!(run_segment(&state, &PlanStep { mode: 4, ..step }, &gains, &[10.0], &limits).is_err());
    }

    #[test]
    fn closed_loop_spectrum_in_unit_disk() {
        let gains = ControllerGains::new(0.15, 0.03).unwrap();
        for seed in 0..5 {
            let (g, step, _) = random_case(200 + seed, 3 + seed as usize);
            let sys = assemble_system(&g, &gains, &step).unwrap();
            let eig = sys.a.clone().complex_eigenvalues();
            let mut on_circle = 0;
            for ev in eig.iter() {
                let r = ev.norm();
                assert!(r <= 1.0 + 1e-9, "eigenvalue {ev} outside unit disk");
                if r > 1.0 - 1e-9 {
                    on_circle += 1;
                    assert!((ev.re - 1.0).abs() < 1e-6, "unit-circle mode {ev} is not 1");
                }
            }
            // the (1, 0, 0, 1) translation mode excluded by FODAC initialization
            assert_eq!(on_circle, 1);
        }
    }

    #[test]
    fn fodac_tracks_frozen_swarm() {
        let (g, _, state) = random_case(15, 8);
        let p = state.p.clone();
        let mut c_hat = p.clone();
        for _ in 0..5000 {
            c_hat = fodac_update(&g, &c_hat, &p, &p);
        }
        let mean = mean_row(&p);
        for r in c_hat.row_iter() {
            assert!((r[0] - mean[0]).abs() < 1e-6 && (r[1] - mean[1]).abs() < 1e-6);
        }
    }
}
