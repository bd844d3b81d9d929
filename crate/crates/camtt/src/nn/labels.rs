//! Ground-truth labeling of measurements for classifier training: a
//! measurement is target-generated iff its noise-normalized distance to
//! the nearest truth position is within the threshold.

use crate::detect::Measurement;
use crate::scenario::{ScenarioConfig, TruthTarget};

/// Distance threshold in noise-normalized units.
pub const T_DIST_DEFAULT: f64 = 1.0;

/// Component scales used to normalize (range, Doppler) residuals before
/// the Euclidean norm: the measurement-noise standard deviations.
pub const RANGE_SCALE: f64 = 15.0;
pub const DOPPLER_SCALE: f64 = 0.1;

/// Normalized distance between a measurement and a truth state.
fn distance(meas: &Measurement, range: f64, doppler: f64, range_scale: f64, doppler_scale: f64) -> f64 {
    let dr = (meas.range - range) / range_scale;
    let df = (meas.doppler - doppler) / doppler_scale;
    (dr * dr + df * df).sqrt()
}

/// Label each measurement 1.0 (target) or 0.0 (clutter). The threshold is
/// inclusive: distance exactly `t_dist` labels 1.
pub fn label_measurements(
    measurements: &[Measurement],
    truth: &[TruthTarget],
    scan: usize,
    config: &ScenarioConfig,
    t_dist: f64,
    range_scale: f64,
    doppler_scale: f64,
) -> Vec<f64> {
    let wavelength = config.wavelength();
    let truth_obs: Vec<(f64, f64)> = truth
        .iter()
        .filter_map(|t| t.state_at(scan))
        .map(|s| (s[0], -2.0 * s[1] / wavelength))
        .collect();
    measurements
        .iter()
        .map(|m| {
            let hit = truth_obs
                .iter()
                .any(|&(r, d)| distance(m, r, d, range_scale, doppler_scale) <= t_dist);
            if hit {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}
