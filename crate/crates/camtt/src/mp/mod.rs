//! Factor-graph tracker core: Gaussian kinematic filtering, Bernoulli
//! visibility chain, measurement evaluation, loopy-BP probabilistic data
//! association, and track management.

pub mod assoc;
pub mod evaluate;
pub mod gaussian;
pub mod track;
pub mod visibility;

pub use assoc::{bp_data_association, AssociationBeliefs, BpConfig};
pub use evaluate::{evaluate_measurements, LikelihoodGrid, MeasurementModel};
pub use gaussian::{predict_kinematic, update_kinematic, KinematicBelief};
pub use track::{manage_tracks, Track, TrackStatus};
pub use visibility::{
    evaluate_visibility, predict_visibility, update_visibility, DetectionModelParams,
    VisibilityBelief, VisibilityTransition,
};

use serde::{Deserialize, Serialize};

/// Tracker parameters shared across the per-scan message-passing steps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrackerConfig {
    /// Detection probability given the target is visible.
    pub pd_visible: f64,
    /// Detection probability given the target is invisible.
    pub pd_invisible: f64,
    /// Diagonal of the 2x2 visibility transition matrix.
    pub visibility_stay: f64,
    /// Clutter measurement spatial density (per m per Hz), the i=0 branch
    /// of measurement evaluation.
    pub clutter_density: f64,
    /// Measurement noise standard deviations (range m, Doppler Hz).
    pub range_sigma: f64,
    pub doppler_sigma: f64,
    /// Squared-Mahalanobis gate on the innovation.
    pub gate: f64,
    /// BP convergence threshold and iteration cap.
    pub bp_tolerance: f64,
    pub bp_max_iterations: usize,
    /// Track confirmation threshold on the visibility probability.
    pub confirm_threshold: f64,
    /// Maximum consecutive missed detections before termination.
    pub max_miss_streak: usize,
    /// Initial visibility probability of a spawned track.
    pub initial_visibility: f64,
    /// Maximum number of simultaneous tracks.
    pub max_tracks: usize,
    /// Prior standard deviation on range acceleration for spawned tracks.
    pub accel_sigma: f64,
    /// Extra range-rate standard deviation added at two-point spawn.
    pub spawn_velocity_sigma: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            pd_visible: 0.9,
            pd_invisible: 0.01,
            visibility_stay: 0.85,
            clutter_density: 2e-5,
            range_sigma: 15.0,
            doppler_sigma: 0.1,
            gate: 13.8,
            bp_tolerance: 1e-6,
            bp_max_iterations: 1000,
            confirm_threshold: 0.5,
            max_miss_streak: 3,
            initial_visibility: 0.5,
            max_tracks: 30,
            accel_sigma: 1.0,
            spawn_velocity_sigma: 0.5,
        }
    }
}

impl TrackerConfig {
    pub fn detection_params(&self) -> DetectionModelParams {
        DetectionModelParams {
            pd_visible: self.pd_visible,
            pd_invisible: self.pd_invisible,
        }
    }

    pub fn visibility_transition(&self) -> VisibilityTransition {
        VisibilityTransition::symmetric(self.visibility_stay)
    }

    pub fn bp(&self) -> BpConfig {
        BpConfig {
            tolerance: self.bp_tolerance,
            max_iterations: self.bp_max_iterations,
        }
    }
}
