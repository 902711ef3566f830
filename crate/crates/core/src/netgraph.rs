//! ν-disk communication graphs and the spectral quantities derived from them.
//!
//! A [`CommGraph`] is built once per swarm configuration and carries the
//! adjacency, Metropolis weights and the three Laplacians (combinatorial,
//! normalized, weighted). The planner's per-mode costs
//! ([`connectivity_cost`], [`communication_cost`]) live here as well because
//! they are pure functions of a graph.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Eigenvalues at or below this are treated as zero when deciding connectivity.
pub const CONNECTIVITY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("eigensolver did not converge on {which} (1-norm {norm:.3e}, diagonal span [{min_diag:.3e}, {max_diag:.3e}])")]
    EigenNonConvergence {
        which: &'static str,
        norm: f64,
        min_diag: f64,
        max_diag: f64,
    },
}

/// Undirected ν-disk graph over a set of agents together with its weight and
/// Laplacian matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct CommGraph {
    positions: Option<DMatrix<f64>>,
    radius: f64,
    adjacency: DMatrix<f64>,
    degrees: Vec<usize>,
    weights: DMatrix<f64>,
    laplacian: DMatrix<f64>,
    normalized_laplacian: DMatrix<f64>,
    weighted_laplacian: DMatrix<f64>,
}

impl CommGraph {
    /// Builds a graph from an explicit 0/1 adjacency matrix. `radius` is only
    /// used by [`communication_cost`].
    pub fn from_adjacency(adjacency: DMatrix<f64>, radius: f64) -> Result<Self, GraphError> {
        let m = adjacency.nrows();
        if m == 0 || adjacency.ncols() != m {
            return Err(GraphError::InvalidInput(format!(
                "adjacency must be square and non-empty, got {}x{}",
                adjacency.nrows(),
                adjacency.ncols()
            )));
        }
        for i in 0..m {
            if adjacency[(i, i)] != 0.0 {
                return Err(GraphError::InvalidInput(format!("self loop at node {i}")));
            }
            for j in 0..m {
                let a = adjacency[(i, j)];
                if a != 0.0 && a != 1.0 {
                    return Err(GraphError::InvalidInput(format!(
                        "adjacency entry ({i},{j}) = {a} is not binary"
                    )));
                }
                if a != adjacency[(j, i)] {
                    return Err(GraphError::InvalidInput(format!(
                        "adjacency not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(GraphError::InvalidInput(format!(
                "communication radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Self::assemble(None, radius, adjacency))
    }

    /// Builds a graph from an edge list over `m` nodes.
    pub fn from_edges(m: usize, edges: &[(usize, usize)], radius: f64) -> Result<Self, GraphError> {
        let mut adjacency = DMatrix::zeros(m, m);
        for &(i, j) in edges {
            if i >= m || j >= m || i == j {
                return Err(GraphError::InvalidInput(format!("bad edge ({i},{j}) for {m} nodes")));
            }
            adjacency[(i, j)] = 1.0;
            adjacency[(j, i)] = 1.0;
        }
        Self::from_adjacency(adjacency, radius)
    }

    fn assemble(positions: Option<DMatrix<f64>>, radius: f64, adjacency: DMatrix<f64>) -> Self {
        let m = adjacency.nrows();
        let degrees: Vec<usize> = (0..m)
            .map(|i| adjacency.row(i).iter().filter(|&&a| a != 0.0).count())
            .collect();
        let weights = metropolis_from(&adjacency, &degrees);

        let mut laplacian = -adjacency.clone();
        for (i, &d) in degrees.iter().enumerate() {
            laplacian[(i, i)] = d as f64;
        }

        // D^{-1/2} with 0 for isolated nodes.
        let inv_sqrt: Vec<f64> = degrees
            .iter()
            .map(|&d| if d == 0 { 0.0 } else { 1.0 / (d as f64).sqrt() })
            .collect();
        let normalized_laplacian =
            DMatrix::from_fn(m, m, |i, j| inv_sqrt[i] * laplacian[(i, j)] * inv_sqrt[j]);
        let weighted_laplacian = DMatrix::identity(m, m) - &weights;

        Self {
            positions,
            radius,
            adjacency,
            degrees,
            weights,
            laplacian,
            normalized_laplacian,
            weighted_laplacian,
        }
    }

    pub fn len(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn positions(&self) -> Option<&DMatrix<f64>> {
        self.positions.as_ref()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn laplacian(&self) -> &DMatrix<f64> {
        &self.laplacian
    }

    pub fn normalized_laplacian(&self) -> &DMatrix<f64> {
        &self.normalized_laplacian
    }

    pub fn weighted_laplacian(&self) -> &DMatrix<f64> {
        &self.weighted_laplacian
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.degrees.iter().sum::<usize>() / 2
    }

    /// Neighbor indices of node `i`, ascending.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&j| self.adjacency[(i, j)] != 0.0)
    }

    /// Random-walk Laplacian `D^{-1} L`, with zero rows for isolated nodes.
    pub fn random_walk_laplacian(&self) -> DMatrix<f64> {
        let m = self.len();
        DMatrix::from_fn(m, m, |i, j| match self.degrees[i] {
            0 => 0.0,
            d => self.laplacian[(i, j)] / d as f64,
        })
    }
}

/// Builds the ν-disk graph: agents `i != j` are adjacent iff `‖p_i − p_j‖ ≤ ν`.
pub fn build_nu_disk_graph(positions: &DMatrix<f64>, radius: f64) -> Result<CommGraph, GraphError> {
    let m = positions.nrows();
    if m == 0 {
        return Err(GraphError::InvalidInput("at least one agent is required".into()));
    }
    if positions.iter().any(|x| !x.is_finite()) {
        return Err(GraphError::InvalidInput("positions must be finite".into()));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(GraphError::InvalidInput(format!(
            "communication radius must be positive and finite, got {radius}"
        )));
    }
    let mut adjacency = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in (i + 1)..m {
            let dist = (positions.row(i) - positions.row(j)).norm();
            if dist <= radius {
                adjacency[(i, j)] = 1.0;
                adjacency[(j, i)] = 1.0;
            }
        }
    }
    Ok(CommGraph::assemble(Some(positions.clone()), radius, adjacency))
}

fn metropolis_from(adjacency: &DMatrix<f64>, degrees: &[usize]) -> DMatrix<f64> {
    let m = adjacency.nrows();
    let mut w = DMatrix::zeros(m, m);
    for i in 0..m {
        let mut off = 0.0;
        for j in 0..m {
            if i != j && adjacency[(i, j)] != 0.0 {
                let wij = 1.0 / (1.0 + degrees[i].max(degrees[j]) as f64);
                w[(i, j)] = wij;
                off += wij;
            }
        }
        w[(i, i)] = 1.0 - off;
    }
    w
}

/// Metropolis weight matrix of `graph`. Isolated nodes get `w_ii = 1`.
pub fn metropolis_weights(graph: &CommGraph) -> DMatrix<f64> {
    metropolis_from(&graph.adjacency, &graph.degrees)
}

/// Second-smallest eigenvalues of `L`, `L^N` and `L^W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub lambda2: f64,
    pub lambda2_normalized: f64,
    pub lambda2_weighted: f64,
    pub connected: bool,
}

/// Ascending eigenvalues of the symmetric part of `matrix`. Ties keep the
/// solver's index order.
pub fn sorted_symmetric_eigenvalues(
    matrix: &DMatrix<f64>,
    which: &'static str,
) -> Result<Vec<f64>, GraphError> {
    let sym = (matrix + matrix.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(sym.clone(), f64::EPSILON, 10_000).ok_or_else(|| {
        let diag = sym.diagonal();
        GraphError::EigenNonConvergence {
            which,
            norm: sym.column_iter().map(|c| c.abs().sum()).fold(0.0, f64::max),
            min_diag: diag.min(),
            max_diag: diag.max(),
        }
    })?;
    let mut values: Vec<(usize, f64)> = eig.eigenvalues.iter().copied().enumerate().collect();
    values.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0)));
    Ok(values.into_iter().map(|(_, v)| v).collect())
}

fn second_smallest(values: &[f64]) -> f64 {
    values.get(1).copied().unwrap_or(0.0)
}

/// Connectivity spectrum of `graph`. A single-node graph reports all zeros and
/// `connected = false`.
pub fn spectral_summary(graph: &CommGraph) -> Result<SpectralSummary, GraphError> {
    let l = sorted_symmetric_eigenvalues(&graph.laplacian, "L")?;
    let ln = sorted_symmetric_eigenvalues(&graph.normalized_laplacian, "L^N")?;
    let lw = sorted_symmetric_eigenvalues(&graph.weighted_laplacian, "L^W")?;
    let lambda2 = second_smallest(&l);
    let isolated = graph.degrees.contains(&0);
    Ok(SpectralSummary {
        lambda2,
        lambda2_normalized: second_smallest(&ln),
        lambda2_weighted: second_smallest(&lw),
        connected: lambda2 > CONNECTIVITY_TOL && !isolated,
    })
}

/// Orthonormal basis of the complement of `1`: an `M×(M−1)` matrix `F` with
/// `Fᵀ F = I` and `Fᵀ 1 = 0`.
///
/// Built from the Householder reflection that maps `e_1` to `1/√M`; the
/// remaining columns of the reflector span the complement.
pub fn complement_basis(m: usize) -> Result<DMatrix<f64>, GraphError> {
    if m < 2 {
        return Err(GraphError::InvalidInput(format!(
            "complement basis needs at least 2 nodes, got {m}"
        )));
    }
    let u = 1.0 / (m as f64).sqrt();
    let mut v = vec![-u; m];
    v[0] += 1.0;
    let vv: f64 = v.iter().map(|x| x * x).sum();
    Ok(DMatrix::from_fn(m, m - 1, |i, j| {
        let col = j + 1;
        let delta = if i == col { 1.0 } else { 0.0 };
        delta - 2.0 * v[i] * v[col] / vv
    }))
}

/// A per-mode planner cost. Infeasible modes compare greater than any finite
/// cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "Option<f64>", into = "Option<f64>")]
pub enum ModeCost {
    Finite(f64),
    Infeasible,
}

impl ModeCost {
    pub fn value(self) -> f64 {
        match self {
            ModeCost::Finite(v) => v,
            ModeCost::Infeasible => f64::INFINITY,
        }
    }

    pub fn is_feasible(self) -> bool {
        matches!(self, ModeCost::Finite(_))
    }
}

impl Add for ModeCost {
    type Output = ModeCost;

    fn add(self, rhs: ModeCost) -> ModeCost {
        match (self, rhs) {
            (ModeCost::Finite(a), ModeCost::Finite(b)) => ModeCost::Finite(a + b),
            _ => ModeCost::Infeasible,
        }
    }
}

impl From<Option<f64>> for ModeCost {
    fn from(v: Option<f64>) -> Self {
        v.map_or(ModeCost::Infeasible, ModeCost::Finite)
    }
}

impl From<ModeCost> for Option<f64> {
    fn from(c: ModeCost) -> Self {
        match c {
            ModeCost::Finite(v) => Some(v),
            ModeCost::Infeasible => None,
        }
    }
}

impl fmt::Display for ModeCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeCost::Finite(v) => write!(f, "{v:.6e}"),
            ModeCost::Infeasible => f.write_str("infeasible"),
        }
    }
}

/// `Fᵀ L^N F` for the complement basis of the graph's node count.
pub fn reduced_normalized_laplacian(graph: &CommGraph) -> Result<DMatrix<f64>, GraphError> {
    let f = complement_basis(graph.len())?;
    Ok(f.transpose() * graph.normalized_laplacian() * f)
}

/// `J_CON = −κ1 · ln det(κ2 · Fᵀ L^N F)`; infeasible for disconnected graphs.
pub fn connectivity_cost(graph: &CommGraph, kappa1: f64, kappa2: f64) -> Result<ModeCost, GraphError> {
    if graph.len() < 2 {
        return Ok(ModeCost::Infeasible);
    }
    let spectra = spectral_summary(graph)?;
    if !spectra.connected || spectra.lambda2_normalized <= CONNECTIVITY_TOL {
        return Ok(ModeCost::Infeasible);
    }
    if kappa1 == 0.0 {
        return Ok(ModeCost::Finite(0.0));
    }
    let g = reduced_normalized_laplacian(graph)? * kappa2;
    let sym = (&g + g.transpose()) * 0.5;
    let Some(chol) = sym.cholesky() else {
        return Ok(ModeCost::Infeasible);
    };
    let log_det: f64 = chol.l_dirty().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
    Ok(ModeCost::Finite(-kappa1 * log_det))
}

/// `J_COM = κ3 · ln(ν² · 1ᵀ A 1)`; infeasible for graphs without edges.
pub fn communication_cost(graph: &CommGraph, kappa3: f64) -> ModeCost {
    let links = 2 * graph.edge_count();
    if links == 0 {
        return ModeCost::Infeasible;
    }
    if kappa3 == 0.0 {
        return ModeCost::Finite(0.0);
    }
    let nu = graph.radius();
    ModeCost::Finite(kappa3 * (nu * nu * links as f64).ln())
}
