//! Synthetic radar scene generation: ground-truth trajectories, target
//! returns embedded in simulated sea clutter at a prescribed
//! signal-to-clutter ratio, and range-Doppler map formation.

pub mod io;
pub mod rdmap;
pub mod signal;
pub mod truth;

pub use rdmap::{form_rd_map, RdMap};
pub use signal::{synthesize_returns, PulseMatrix};
pub use truth::{generate_truth, TruthTarget};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 2.99792458e8;

/// Sea-clutter surrogate parameters: compound-Gaussian K-distributed
/// texture with AR(1)-correlated speckle shaped to a Gaussian Doppler
/// spectrum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClutterParams {
    /// "k" for K-distributed (gamma texture) or "gaussian" (unit texture).
    pub model: ClutterModel,
    /// Gamma shape of the texture.
    pub shape: f64,
    /// Center of the clutter Doppler ridge, Hz.
    pub mean_doppler: f64,
    /// Standard deviation of the clutter Doppler spectrum, Hz.
    pub spectral_width: f64,
    /// Lag-1 correlation of the texture across pulses.
    pub texture_correlation: f64,
    /// Mean clutter power per cell, linear.
    pub mean_power: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClutterModel {
    K,
    Gaussian,
}

impl Default for ClutterParams {
    fn default() -> Self {
        ClutterParams {
            model: ClutterModel::K,
            shape: 2.0,
            mean_doppler: 60.0,
            spectral_width: 50.0,
            texture_correlation: 0.9,
            mean_power: 1.0,
        }
    }
}

impl ClutterParams {
    pub fn validate(&self) -> Result<()> {
        if self.shape <= 0.0 {
            return Err(Error::Config("clutter shape must be positive".into()));
        }
        if self.spectral_width <= 0.0 {
            return Err(Error::Config("clutter spectral width must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.texture_correlation) {
            return Err(Error::Config(
                "texture correlation must be in [0, 1)".into(),
            ));
        }
        if self.mean_power <= 0.0 {
            return Err(Error::Config("clutter mean power must be positive".into()));
        }
        Ok(())
    }
}

/// Scene geometry, radar constants and target sampling bounds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub n_scans: usize,
    /// Time between scans, seconds; the step length of the
    /// constant-acceleration motion model.
    pub scan_period: f64,
    /// Driving-noise intensity of the acceleration process.
    pub sigma_a: f64,
    pub n_targets: usize,
    pub range_min: f64,
    pub range_max: f64,
    pub velocity_min: f64,
    pub velocity_max: f64,
    pub radial_length_min: f64,
    pub radial_length_max: f64,
    /// Pulse repetition frequency, Hz.
    pub prf: f64,
    /// Radar center frequency, Hz.
    pub center_frequency: f64,
    pub n_range_bins: usize,
    pub range_bin_size: f64,
    /// Pulses generated per scan.
    pub pulses_per_scan: usize,
    /// FFT length of one coherent processing interval.
    pub cpi_length: usize,
    pub clutter: ClutterParams,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            n_scans: 15,
            scan_period: 10.0,
            sigma_a: 1e-4,
            n_targets: 4,
            range_min: 200.0,
            range_max: 1200.0,
            velocity_min: -6.0,
            velocity_max: 6.0,
            radial_length_min: 5.0,
            radial_length_max: 30.0,
            prf: 1000.0,
            center_frequency: 9.0e9,
            n_range_bins: 96,
            range_bin_size: 15.0,
            pulses_per_scan: 512,
            cpi_length: 512,
            clutter: ClutterParams::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.center_frequency
    }

    pub fn pri(&self) -> f64 {
        1.0 / self.prf
    }

    pub fn validate(&self) -> Result<()> {
        if self.range_min > self.range_max
            || self.velocity_min > self.velocity_max
            || self.radial_length_min > self.radial_length_max
        {
            return Err(Error::Config("sampling bounds with min > max".into()));
        }
        if self.n_scans == 0 || self.n_range_bins == 0 || self.pulses_per_scan == 0 {
            return Err(Error::Config("scene dimensions must be positive".into()));
        }
        if self.cpi_length > self.pulses_per_scan {
            return Err(Error::Size(
                "CPI length exceeds pulses per scan".into(),
            ));
        }
        if !self.cpi_length.is_power_of_two() {
            return Err(Error::Config("CPI length must be a power of two".into()));
        }
        self.clutter.validate()
    }
}
