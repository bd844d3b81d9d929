//! Amplitude-weighted centroiding and RD-patch extraction.

use super::{DetectorConfig, Measurement, PrimitiveDetection};
use crate::scenario::RdMap;

/// Stretch patch values so the minimum maps to 0 and the maximum to 255.
pub fn stretch_to_255(patch: &mut [f64]) {
    let min = patch.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = patch.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max > min {
        let span = max - min;
        for v in patch.iter_mut() {
            *v = (*v - min) / span * 255.0;
        }
    } else {
        patch.fill(0.0);
    }
}

/// Collapse one cluster into a measurement: amplitude-weighted centroid
/// in (range, Doppler), then a patch_rows x N_d window of the map
/// centered at the centroid's range bin, stretched to [0, 255].
pub fn extract_measurement(
    cluster: &[PrimitiveDetection],
    map: &RdMap,
    cfg: &DetectorConfig,
) -> Measurement {
    debug_assert!(!cluster.is_empty());
    let mut wsum = 0.0;
    let mut range = 0.0;
    let mut doppler = 0.0;
    for det in cluster {
        // dB back to linear amplitude for the weights.
        let w = 10f64.powf(det.amplitude / 20.0);
        wsum += w;
        range += w * map.range_axis[det.range_bin];
        doppler += w * map.doppler_axis[det.doppler_bin];
    }
    range /= wsum;
    doppler /= wsum;

    let center_bin = ((range / (map.range_axis[1] - map.range_axis[0])).floor() as isize)
        .clamp(0, map.n_range_bins as isize - 1);
    let half = cfg.patch_rows as isize / 2;
    let rows = cfg.patch_rows;
    let cols = map.n_doppler_bins;
    let mut patch = vec![0.0; rows * cols];
    let mut edge_padded = false;
    for (pr, row) in (center_bin - half..=center_bin + half).enumerate() {
        if row < 0 || row >= map.n_range_bins as isize {
            edge_padded = true;
            continue; // stays zero
        }
        for d in 0..cols {
            patch[pr * cols + d] = map.at(row as usize, d);
        }
    }
    stretch_to_255(&mut patch);

    Measurement {
        range,
        doppler,
        rd_patch: patch,
        patch_rows: rows,
        patch_cols: cols,
        n_primitives: cluster.len(),
        scan_index: map.scan_index,
        edge_padded,
    }
}
