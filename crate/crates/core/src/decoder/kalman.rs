//! Pointer tracking with a planar double-integrator Kalman filter.
//!
//! State `x = [px, py, vx, vy]`. Prediction over one step `η` with input
//! acceleration `a`:
//!
//! ```text
//! x⁺ = [I ηI; 0 I] x + [η²/2 I; ηI] a
//! ```
//!
//! The IMU observation maps to the state through `y = r_arm · o_imu`.

use nalgebra::{Matrix2x4, Matrix4, Vector2, Vector4};
use serde::{Deserialize, Serialize};

use super::DecoderError;
use crate::geom::Point;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KalmanState {
    pub position: Point,
    pub velocity: Point,
    pub covariance: [[f64; 4]; 4],
    /// Step length in seconds.
    pub eta: f64,
    pub r_arm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KalmanNoise {
    pub process: Matrix4<f64>,
    pub measurement: Matrix4<f64>,
}

impl KalmanNoise {
    pub fn isotropic(process: f64, measurement: f64) -> Self {
        Self {
            process: Matrix4::identity() * process,
            measurement: Matrix4::identity() * measurement,
        }
    }
}

impl KalmanState {
    pub fn new(position: Point, velocity: Point, variance: f64, eta: f64, r_arm: f64) -> Self {
        let mut s = Self {
            position,
            velocity,
            covariance: [[0.0; 4]; 4],
            eta,
            r_arm,
        };
        s.set_covariance(&(Matrix4::identity() * variance));
        s
    }

    pub fn mean(&self) -> Vector4<f64> {
        Vector4::new(self.position[0], self.position[1], self.velocity[0], self.velocity[1])
    }

    pub fn covariance_matrix(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|i, j| self.covariance[i][j])
    }

    fn set_mean(&mut self, x: &Vector4<f64>) {
        self.position = [x[0], x[1]];
        self.velocity = [x[2], x[3]];
    }

    fn set_covariance(&mut self, p: &Matrix4<f64>) {
        for i in 0..4 {
            for j in 0..4 {
                self.covariance[i][j] = 0.5 * (p[(i, j)] + p[(j, i)]);
            }
        }
    }
}

/// State-transition matrix for step `eta`.
pub fn transition(eta: f64) -> Matrix4<f64> {
    let mut f = Matrix4::identity();
    f[(0, 2)] = eta;
    f[(1, 3)] = eta;
    f
}

fn input_matrix(eta: f64) -> Matrix2x4<f64> {
    let h = 0.5 * eta * eta;
    Matrix2x4::new(h, 0.0, eta, 0.0, 0.0, h, 0.0, eta)
}

/// Predict with acceleration `accel`, then update with the IMU observation if
/// one is present. The update uses the Joseph form.
pub fn kalman_step(
    state: &KalmanState,
    accel: Point,
    observation: Option<[f64; 4]>,
    noise: &KalmanNoise,
) -> Result<KalmanState, DecoderError> {
    let f = transition(state.eta);
    let a = Vector2::new(accel[0], accel[1]);
    let x = f * state.mean() + input_matrix(state.eta).transpose() * a;
    let p = f * state.covariance_matrix() * f.transpose() + noise.process;
    let mut next = *state;
    let Some(o) = observation else {
        next.set_mean(&x);
        next.set_covariance(&p);
        return Ok(next);
    };
    let y = Vector4::from(o) * state.r_arm;
    let s = p + noise.measurement;
    let s_inv = s
        .try_inverse()
        .filter(|m| m.iter().all(|v| v.is_finite()))
        .ok_or_else(|| DecoderError::Numeric("innovation covariance is singular".into()))?;
    let gain = p * s_inv;
    let ikh = Matrix4::identity() - gain;
    next.set_mean(&(x + gain * (y - x)));
    next.set_covariance(&(ikh * p * ikh.transpose() + gain * noise.measurement * gain.transpose()));
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_free_double_integrator() {
        let noise = KalmanNoise::isotropic(0.0, 0.0);
        let mut s = KalmanState::new([0.0, 0.0], [1.0, 0.0], 0.0, 1.0, 1.0);
        for t in 1..=20 {
            s = kalman_step(&s, [0.0, 0.0], None, &noise).unwrap();
            assert_eq!(s.position, [t as f64, 0.0]);
            assert_eq!(s.velocity, [1.0, 0.0]);
        }
    }

    #[test]
    fn constant_acceleration() {
        let noise = KalmanNoise::isotropic(0.0, 0.0);
        let mut s = KalmanState::new([0.0, 0.0], [0.0, 0.0], 0.0, 0.5, 1.0);
        for _ in 0..4 {
            s = kalman_step(&s, [0.0, 2.0], None, &noise).unwrap();
        }
        // t = 2: y = ½·2·t² = 4, v = 4
        assert!((s.position[1] - 4.0).abs() < 1e-12);
        assert!((s.velocity[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn matching_measurement_leaves_state() {
        let noise = KalmanNoise {
            process: Matrix4::identity() * 0.1,
            measurement: Matrix4::zeros(),
        };
        let s = KalmanState::new([1.0, 2.0], [0.5, -0.5], 1.0, 0.1, 2.0);
        let predicted = kalman_step(&s, [0.0, 0.0], None, &noise).unwrap();
        let o = predicted.mean() / 2.0;
        let updated = kalman_step(&s, [0.0, 0.0], Some([o[0], o[1], o[2], o[3]]), &noise).unwrap();
        assert!((updated.mean() - predicted.mean()).norm() < 1e-12);
        assert!(updated.covariance_matrix().norm() < 1e-12);
    }

    #[test]
    fn singular_innovation_is_an_error() {
        let noise = KalmanNoise::isotropic(0.0, 0.0);
        let s = KalmanState::new([0.0, 0.0], [0.0, 0.0], 0.0, 0.1, 1.0);
        assert!(kalman_step(&s, [0.0, 0.0], Some([0.0; 4]), &noise).is_err());
    }

    #[test]
    fn covariance_stays_symmetric_psd() {
        let noise = KalmanNoise::isotropic(1e-3, 0.05);
        let mut s = KalmanState::new([0.0, 0.0], [0.0, 0.0], 10.0, 0.02, 0.7);
        for k in 0..200 {
            let obs = (k % 3 != 0).then_some([0.1, 0.2, 0.0, 0.0]);
            s = kalman_step(&s, [0.1, -0.1], obs, &noise).unwrap();
            let p = s.covariance_matrix();
            assert_eq!(p, p.transpose());
            let eig = p.symmetric_eigen().eigenvalues;
            assert!(eig.iter().all(|&e| e >= -1e-12));
        }
    }
}
