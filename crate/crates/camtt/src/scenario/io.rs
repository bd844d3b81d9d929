//! Flat little-endian binary persistence for pulse matrices and RD maps,
//! each with a JSON sidecar describing shape and axes.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::rdmap::RdMap;
use super::signal::PulseMatrix;
use crate::error::{Error, Result};

fn write_f64_le(path: &Path, values: impl Iterator<Item = f64>) -> Result<()> {
    let mut bytes = Vec::new();
    for v in values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

fn read_f64_le(path: &Path) -> Result<Vec<f64>> {
    let bytes =
        fs::read(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Serde(format!(
            "{}: length not a multiple of 8",
            path.display()
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

#[derive(Debug, Serialize, Deserialize)]
struct PulseSidecar {
    n_range_bins: usize,
    n_pulses: usize,
    prf: f64,
    wavelength: f64,
    range_bin_size: f64,
    layout: String,
}

pub fn write_pulse_matrix(matrix: &PulseMatrix, base: &Path) -> Result<()> {
    let bin = base.with_extension("bin");
    let values = matrix
        .samples
        .iter()
        .flat_map(|c| [c.re, c.im]);
    write_f64_le(&bin, values)?;
    let sidecar = PulseSidecar {
        n_range_bins: matrix.n_range_bins,
        n_pulses: matrix.n_pulses,
        prf: matrix.prf,
        wavelength: matrix.wavelength,
        range_bin_size: matrix.range_bin_size,
        layout: "row-major complex interleaved re,im".into(),
    };
    let json = serde_json::to_string_pretty(&sidecar).map_err(|e| Error::Serde(e.to_string()))?;
    fs::write(base.with_extension("json"), json)
        .map_err(|e| Error::io(format!("writing {}", base.display()), e))
}

pub fn read_pulse_matrix(base: &Path) -> Result<PulseMatrix> {
    let json = fs::read_to_string(base.with_extension("json"))
        .map_err(|e| Error::io(format!("reading {}", base.display()), e))?;
    let sidecar: PulseSidecar =
        serde_json::from_str(&json).map_err(|e| Error::Serde(e.to_string()))?;
    let raw = read_f64_le(&base.with_extension("bin"))?;
    let expect = sidecar.n_range_bins * sidecar.n_pulses * 2;
    if raw.len() != expect {
        return Err(Error::Size(format!(
            "pulse blob has {} values, expected {}",
            raw.len(),
            expect
        )));
    }
    let samples = raw
        .chunks_exact(2)
        .map(|c| Complex64::new(c[0], c[1]))
        .collect();
    Ok(PulseMatrix {
        samples,
        n_range_bins: sidecar.n_range_bins,
        n_pulses: sidecar.n_pulses,
        prf: sidecar.prf,
        wavelength: sidecar.wavelength,
        range_bin_size: sidecar.range_bin_size,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct RdSidecar {
    n_range_bins: usize,
    n_doppler_bins: usize,
    doppler_axis: Vec<f64>,
    range_axis: Vec<f64>,
    scan_index: usize,
    units: String,
}

pub fn write_rd_map(map: &RdMap, base: &Path) -> Result<()> {
    write_f64_le(&base.with_extension("bin"), map.amplitude_db.iter().copied())?;
    let sidecar = RdSidecar {
        n_range_bins: map.n_range_bins,
        n_doppler_bins: map.n_doppler_bins,
        doppler_axis: map.doppler_axis.clone(),
        range_axis: map.range_axis.clone(),
        scan_index: map.scan_index,
        units: "dB".into(),
    };
    let json = serde_json::to_string_pretty(&sidecar).map_err(|e| Error::Serde(e.to_string()))?;
    fs::write(base.with_extension("json"), json)
        .map_err(|e| Error::io(format!("writing {}", base.display()), e))
}

pub fn read_rd_map(base: &Path) -> Result<RdMap> {
    let json = fs::read_to_string(base.with_extension("json"))
        .map_err(|e| Error::io(format!("reading {}", base.display()), e))?;
    let sidecar: RdSidecar =
        serde_json::from_str(&json).map_err(|e| Error::Serde(e.to_string()))?;
    let amplitude_db = read_f64_le(&base.with_extension("bin"))?;
    if amplitude_db.len() != sidecar.n_range_bins * sidecar.n_doppler_bins {
        return Err(Error::Size("RD blob size mismatch".into()));
    }
    Ok(RdMap {
        amplitude_db,
        n_range_bins: sidecar.n_range_bins,
        n_doppler_bins: sidecar.n_doppler_bins,
        doppler_axis: sidecar.doppler_axis,
        range_axis: sidecar.range_axis,
        scan_index: sidecar.scan_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{form_rd_map, ScenarioConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pulse_and_rd_round_trip() {
        let cfg = ScenarioConfig {
            n_range_bins: 4,
            pulses_per_scan: 64,
            cpi_length: 64,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let truth = crate::scenario::generate_truth(&cfg, &mut rng).unwrap();
        let matrix =
            crate::scenario::synthesize_returns(&truth, 0, &cfg, 0.0, &mut rng).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let base = dir.path().join("scan0");
        write_pulse_matrix(&matrix, &base).unwrap();
        let back = read_pulse_matrix(&base).unwrap();
        assert_eq!(matrix.samples, back.samples);
        assert_eq!(matrix.n_pulses, back.n_pulses);

        let rd = form_rd_map(&matrix, 64, 0).unwrap();
        let base = dir.path().join("rd0");
        write_rd_map(&rd, &base).unwrap();
        let back = read_rd_map(&base).unwrap();
        assert_eq!(rd.amplitude_db, back.amplitude_db);
        assert_eq!(rd.doppler_axis, back.doppler_axis);
    }
}
