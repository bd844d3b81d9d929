//! Two-dimensional cell-averaging CFAR with a cross-shaped training
//! window, operating in the linear power domain. Doppler wraps
//! toroidally; range clamps at the map edges.

use super::{DetectorConfig, PrimitiveDetection};
use crate::error::{Error, Result};
use crate::scenario::RdMap;

/// Threshold multiplier of a CA-CFAR with `n` training cells at false
/// alarm probability `pfa`: alpha = n (pfa^{-1/n} - 1).
pub fn threshold_multiplier(pfa: f64, n: usize) -> f64 {
    let n = n as f64;
    n * (pfa.powf(-1.0 / n) - 1.0)
}

pub fn cfar_detect(map: &RdMap, cfg: &DetectorConfig) -> Result<Vec<PrimitiveDetection>> {
    cfg.validate()?;
    let half_train = cfg.training_cells / 2;
    let reach = cfg.guard_cells + half_train;
    if 2 * reach + 1 > map.n_doppler_bins {
        return Err(Error::Config(format!(
            "CFAR window ({} cells) does not fit in {} Doppler bins",
            2 * reach + 1,
            map.n_doppler_bins
        )));
    }

    // Linear power copy.
    let power: Vec<f64> = map.amplitude_db.iter().map(|db| 10f64.powf(db / 10.0)).collect();
    let at = |m: usize, d: usize| power[m * map.n_doppler_bins + d];

    let mut detections = Vec::new();
    for m in 0..map.n_range_bins {
        for d in 0..map.n_doppler_bins {
            let mut sum = 0.0;
            let mut count = 0usize;
            // Range arm: clamp at the edges.
            for offset in (cfg.guard_cells + 1)..=reach {
                if m >= offset {
                    sum += at(m - offset, d);
                    count += 1;
                }
                if m + offset < map.n_range_bins {
                    sum += at(m + offset, d);
                    count += 1;
                }
            }
            // Doppler arm: toroidal wrap.
            for offset in (cfg.guard_cells + 1)..=reach {
                let lo = (d + map.n_doppler_bins - offset) % map.n_doppler_bins;
                let hi = (d + offset) % map.n_doppler_bins;
                sum += at(m, lo) + at(m, hi);
                count += 2;
            }
            let alpha = threshold_multiplier(cfg.pfa, count);
            if at(m, d) > alpha * sum / count as f64 {
                detections.push(PrimitiveDetection {
                    range_bin: m,
                    doppler_bin: d,
                    amplitude: map.at(m, d),
                });
            }
        }
    }
    Ok(detections)
}
