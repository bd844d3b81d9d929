//! Detection front end: CFAR thresholding of an RD map, density
//! clustering of primitive detections, amplitude-weighted centroiding,
//! and RD-patch extraction.

pub mod cfar;
pub mod dbscan;
pub mod extract;

pub use cfar::cfar_detect;
pub use dbscan::cluster;
pub use extract::extract_measurement;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::RdMap;

/// One CFAR threshold crossing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveDetection {
    pub range_bin: usize,
    pub doppler_bin: usize,
    /// Amplitude, dB.
    pub amplitude: f64,
}

/// A clustered measurement: spatial centroid plus its RD patch.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub range: f64,
    pub doppler: f64,
    /// N_m x N_p patch, stretched to [0, 255] dB, row-major.
    pub rd_patch: Vec<f64>,
    pub patch_rows: usize,
    pub patch_cols: usize,
    pub n_primitives: usize,
    pub scan_index: usize,
    /// Set when the patch ran off the map edge and was zero-padded.
    pub edge_padded: bool,
}

impl Measurement {
    pub fn spatial(&self) -> nalgebra::Vector2<f64> {
        nalgebra::Vector2::new(self.range, self.doppler)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Per-cell false alarm probability of the CFAR stage.
    pub pfa: f64,
    /// Guard cells on each side, per dimension.
    pub guard_cells: usize,
    /// Training cells total per dimension (split across both sides).
    pub training_cells: usize,
    /// DBSCAN neighborhood radius in range, m.
    pub r_th: f64,
    /// DBSCAN neighborhood radius in Doppler, Hz.
    pub d_th: f64,
    pub min_cluster_size: usize,
    /// Patch extent in range bins.
    pub patch_rows: usize,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            pfa: 0.28,
            guard_cells: 4,
            training_cells: 16,
            r_th: 45.0,
            d_th: 6.0,
            min_cluster_size: 5,
            patch_rows: 5,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.pfa) || self.pfa <= 0.0 {
            return Err(Error::Config("pfa must be in (0, 1)".into()));
        }
        if self.min_cluster_size == 0 {
            return Err(Error::Config("min_cluster_size must be at least 1".into()));
        }
        if self.training_cells == 0 || self.training_cells % 2 != 0 {
            return Err(Error::Config(
                "training_cells must be positive and even".into(),
            ));
        }
        Ok(())
    }
}

/// Run the full front end on one RD map.
pub fn detect_measurements(map: &RdMap, cfg: &DetectorConfig) -> Result<Vec<Measurement>> {
    let primitives = cfar_detect(map, cfg)?;
    let clusters = cluster(&primitives, map, cfg);
    Ok(clusters
        .iter()
        .map(|c| extract_measurement(c, map, cfg))
        .collect())
}
