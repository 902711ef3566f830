//! Independent oracles and random case generators shared by the test targets.
#![allow(dead_code)]

use hsi_core::controller::{PlanStep, SwarmState};
use hsi_core::netgraph::{build_nu_disk_graph, spectral_summary, CommGraph};
use nalgebra::{DMatrix, Matrix4};
use rand::Rng;

pub fn uniform_matrix(rng: &mut impl Rng, rows: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    DMatrix::from_fn(rows, 2, |_, _| rng.random_range(lo..hi))
}

pub fn centered(mut z: DMatrix<f64>) -> DMatrix<f64> {
    let n = z.nrows() as f64;
    for k in 0..2 {
        let mean = z.column(k).sum() / n;
        z.column_mut(k).add_scalar_mut(-mean);
    }
    z
}

/// Positions in the unit square whose `radius`-disk graph is connected.
pub fn connected_positions(rng: &mut impl Rng, m: usize, radius: f64) -> (DMatrix<f64>, CommGraph) {
    loop {
        let p = uniform_matrix(rng, m, 0.0, 1.0);
        let g = build_nu_disk_graph(&p, radius).unwrap();
        if spectral_summary(&g).unwrap().connected {
            return (p, g);
        }
    }
}

pub fn random_step(rng: &mut impl Rng, m: usize) -> PlanStep {
    PlanStep {
        z: centered(uniform_matrix(rng, m, -0.5, 0.5)),
        scale: rng.random_range(0.5..2.0),
        centroid: [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)],
        rotation: rng.random_range(-3.0..3.0),
        mode: 0,
    }
}

pub fn random_state(rng: &mut impl Rng, p: DMatrix<f64>) -> SwarmState {
    let m = p.nrows();
    SwarmState {
        p,
        v: uniform_matrix(rng, m, -0.3, 0.3),
        c_hat: uniform_matrix(rng, m, -1.0, 1.0),
        q: uniform_matrix(rng, m, -1.0, 1.0),
    }
}

/// Optimal first-stage feedback of the finite-horizon problem, solved as one
/// stacked quadratic program over the whole control sequence:
/// `X = Φ x0 + Γ U`, `U* = −(ΓᵀQ̄Γ + R̄)⁻¹ ΓᵀQ̄Φ x0`.
pub fn batch_first_gain(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
    q_f: &DMatrix<f64>,
    horizon: usize,
) -> DMatrix<f64> {
    let n = a.nrows();
    let k = b.ncols();
    let steps = horizon + 1;
    let mut phi = DMatrix::zeros(n * steps, n);
    let mut power = DMatrix::identity(n, n);
    for s in 0..steps {
        phi.view_mut((s * n, 0), (n, n)).copy_from(&power);
        power = a * power;
    }
    let mut gamma = DMatrix::zeros(n * steps, k * horizon);
    for s in 1..steps {
        for j in 0..s {
            let mut block = b.clone();
            for _ in 0..(s - 1 - j) {
                block = a * block;
            }
            gamma.view_mut((s * n, j * k), (n, k)).copy_from(&block);
        }
    }
    let mut q_bar = DMatrix::zeros(n * steps, n * steps);
    for s in 0..steps {
        let w = if s == horizon { q_f } else { q };
        q_bar.view_mut((s * n, s * n), (n, n)).copy_from(w);
    }
    let mut r_bar = DMatrix::zeros(k * horizon, k * horizon);
    for s in 0..horizon {
        r_bar.view_mut((s * k, s * k), (k, k)).copy_from(r);
    }
    let hessian = gamma.transpose() * &q_bar * &gamma + r_bar;
    let linear = gamma.transpose() * &q_bar * &phi;
    let full = hessian.lu().solve(&linear).expect("batch hessian is nonsingular");
    full.rows(0, k).into_owned()
}

/// Steady-state posterior covariance of the Kalman filter with identity
/// observation, by iterating the prior-form Riccati map
/// `P ← F(P − P(P+R)⁻¹P)Fᵀ + Q` to a fixed point.
pub fn kalman_fixed_point(f: &Matrix4<f64>, q: &Matrix4<f64>, r: &Matrix4<f64>) -> Matrix4<f64> {
    let mut prior = *q + Matrix4::identity();
    for _ in 0..100_000 {
        let post = prior - prior * (prior + r).try_inverse().unwrap() * prior;
        let next = f * post * f.transpose() + q;
        if (next - prior).abs().max() < 1e-15 {
            prior = next;
            break;
        }
        prior = next;
    }
    prior - prior * (prior + r).try_inverse().unwrap() * prior
}
