//! Gaussian kinematic beliefs: constant-acceleration prediction and the
//! association-weighted information-form measurement update.

use nalgebra::{Matrix2, Matrix3, Matrix3x2, Vector2, Vector3};

/// Gaussian belief over (range m, range-rate m/s, range-accel m/s^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicBelief {
    pub mean: Vector3<f64>,
    pub covariance: Matrix3<f64>,
}

const JITTER: f64 = 1e-9;

impl KinematicBelief {
    pub fn new(mean: Vector3<f64>, covariance: Matrix3<f64>) -> Self {
        let mut b = KinematicBelief { mean, covariance };
        b.symmetrize();
        b
    }

    /// Enforce exact symmetry; add diagonal jitter if the covariance has
    /// lost positive definiteness to rounding.
    pub fn symmetrize(&mut self) {
        self.covariance = (self.covariance + self.covariance.transpose()) * 0.5;
        if self.covariance.clone().cholesky().is_none() {
            self.covariance += Matrix3::identity() * JITTER;
        }
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let d = self.covariance - self.covariance.transpose();
        d.iter().all(|v| v.abs() < tol)
    }
}

/// Constant-acceleration transition matrix for step length `dt`.
pub fn ca_transition(dt: f64) -> Matrix3<f64> {
    Matrix3::new(
        1.0,
        dt,
        dt * dt / 2.0,
        0.0,
        1.0,
        dt,
        0.0,
        0.0,
        1.0,
    )
}

/// Process noise covariance of the constant-acceleration model with
/// driving-noise intensity `sigma_a` over step length `dt`.
pub fn ca_process_noise(dt: f64, sigma_a: f64) -> Matrix3<f64> {
    let s = sigma_a * sigma_a;
    let t2 = dt * dt;
    let t3 = t2 * dt;
    let t4 = t3 * dt;
    let t5 = t4 * dt;
    Matrix3::new(
        t5 / 20.0,
        t4 / 8.0,
        t3 / 6.0,
        t4 / 8.0,
        t3 / 3.0,
        t2 / 2.0,
        t3 / 6.0,
        t2 / 2.0,
        dt,
    ) * s
}

/// Kalman prediction: mean <- F m, covariance <- F P F' + Q.
pub fn predict_kinematic(
    prev: &KinematicBelief,
    transition: &Matrix3<f64>,
    process_noise: &Matrix3<f64>,
) -> KinematicBelief {
    let mean = transition * prev.mean;
    let cov = transition * prev.covariance * transition.transpose() + process_noise;
    KinematicBelief::new(mean, cov)
}

/// Association-weighted information-form measurement update.
///
/// Each measurement contributes its information scaled by the marginal
/// association probability `weights[j]`; with a single unit weight this is
/// the textbook Kalman update, with all weight on the missed-detection
/// hypothesis the prior is returned unchanged.
pub fn update_kinematic(
    pred: &KinematicBelief,
    measurement_matrix: &Matrix3x2<f64>, // stored as H^T (3x2)
    noise_inv: &Matrix2<f64>,
    measurements: &[Vector2<f64>],
    weights: &[f64],
) -> KinematicBelief {
    debug_assert_eq!(measurements.len(), weights.len());
    let prior_info = pred
        .covariance
        .try_inverse()
        .expect("prior covariance invertible");
    let mut info = prior_info;
    let mut info_vec = prior_info * pred.mean;
    let ht_rinv = measurement_matrix * noise_inv; // 3x2
    let h = measurement_matrix.transpose(); // 2x3
    for (z, &w) in measurements.iter().zip(weights) {
        if w <= 0.0 {
            continue;
        }
        info += ht_rinv * h * w;
        info_vec += ht_rinv * z * w;
    }
    let cov = info.try_inverse().expect("posterior information invertible");
    KinematicBelief::new(cov * info_vec, cov)
}
