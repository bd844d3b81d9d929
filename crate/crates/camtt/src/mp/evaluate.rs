//! Measurement evaluation: expected Gaussian log-likelihood under the
//! predicted kinematic belief, exponentiated to the mean-field
//! measurement-evaluation message, with ellipsoidal gating.

use nalgebra::{Matrix2, Matrix2x3, Matrix3x2, Vector2};

use super::gaussian::KinematicBelief;
use crate::error::{Error, Result};

/// Linear (range, Doppler) measurement model with Gaussian noise.
#[derive(Debug, Clone)]
pub struct MeasurementModel {
    /// 2x3 measurement matrix: range row [1,0,0], Doppler row [-2/lambda,0].
    pub h: Matrix2x3<f64>,
    /// Measurement noise covariance.
    pub r: Matrix2<f64>,
    /// Squared-Mahalanobis gate on the innovation; entries outside gate to 0.
    pub gate: f64,
}

impl MeasurementModel {
    pub fn new(wavelength: f64, range_sigma: f64, doppler_sigma: f64, gate: f64) -> Self {
        MeasurementModel {
            h: Matrix2x3::new(1.0, 0.0, 0.0, 0.0, -2.0 / wavelength, 0.0),
            r: Matrix2::new(range_sigma * range_sigma, 0.0, 0.0, doppler_sigma * doppler_sigma),
            gate,
        }
    }

    pub fn h_transpose(&self) -> Matrix3x2<f64> {
        self.h.transpose()
    }

    pub fn r_inverse(&self) -> Result<Matrix2<f64>> {
        self.r
            .try_inverse()
            .ok_or_else(|| Error::Config("singular measurement noise covariance".into()))
    }

    /// Predicted measurement for a state mean.
    pub fn predict(&self, belief: &KinematicBelief) -> Vector2<f64> {
        self.h * belief.mean
    }
}

/// Likelihood grid: `targets[i][j]` is the evaluation message for target i
/// (0-based) and measurement j; `clutter` is the i=0 clutter density row.
#[derive(Debug, Clone)]
pub struct LikelihoodGrid {
    pub targets: Vec<Vec<f64>>,
    pub clutter: Vec<f64>,
}

impl LikelihoodGrid {
    pub fn n_targets(&self) -> usize {
        self.targets.len()
    }
    pub fn n_measurements(&self) -> usize {
        self.clutter.len()
    }
}

/// Gaussian density of z under N(mean, cov).
fn gaussian2_density(z: &Vector2<f64>, mean: &Vector2<f64>, cov_inv: &Matrix2<f64>, det: f64) -> f64 {
    let d = z - mean;
    let q = (d.transpose() * cov_inv * d)[(0, 0)];
    (-0.5 * q).exp() / (2.0 * std::f64::consts::PI * det.sqrt())
}

/// Evaluate all (target, measurement) pairs.
///
/// For i>0 the entry is the closed-form exponentiated expectation of the
/// Gaussian log-density under the predicted belief:
/// `N(z; H m, R) * exp(-tr(R^-1 H P H^T)/2)`. The clutter row carries the
/// configured clutter density. Gating uses the innovation covariance
/// `H P H^T + R`.
pub fn evaluate_measurements(
    predictions: &[KinematicBelief],
    measurements: &[Vector2<f64>],
    model: &MeasurementModel,
    clutter_density: f64,
) -> Result<LikelihoodGrid> {
    let r_inv = model.r_inverse()?;
    let det_r = model.r.determinant();
    let mut targets = Vec::with_capacity(predictions.len());
    for pred in predictions {
        let hpht = model.h * pred.covariance * model.h.transpose();
        let correction = (-0.5 * (r_inv * hpht).trace()).exp();
        let innov_cov = hpht + model.r;
        let innov_inv = innov_cov
            .try_inverse()
            .ok_or_else(|| Error::Numerical("singular innovation covariance".into()))?;
        let z_pred = model.predict(pred);
        let row: Vec<f64> = measurements
            .iter()
            .map(|z| {
                let d = z - z_pred;
                let m2 = (d.transpose() * innov_inv * d)[(0, 0)];
                if m2 > model.gate {
                    0.0
                } else {
                    gaussian2_density(z, &z_pred, &r_inv, det_r) * correction
                }
            })
            .collect();
        targets.push(row);
    }
    Ok(LikelihoodGrid {
        targets,
        clutter: vec![clutter_density; measurements.len()],
    })
}
