//! Range-Doppler map formation: per-range-bin FFT over one coherent
//! processing interval, unitary scaling, amplitudes in dB.

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::signal::PulseMatrix;
use crate::error::{Error, Result};

/// Amplitudes are clamped at this dB floor (zero signal).
pub const DB_FLOOR: f64 = -300.0;

/// Real amplitude grid (dB), M range bins by N_d Doppler bins.
#[derive(Debug, Clone)]
pub struct RdMap {
    pub amplitude_db: Vec<f64>,
    pub n_range_bins: usize,
    pub n_doppler_bins: usize,
    /// Doppler frequency of each column, Hz; spans (-prf/2, prf/2].
    pub doppler_axis: Vec<f64>,
    /// Range of each row center, m.
    pub range_axis: Vec<f64>,
    pub scan_index: usize,
}

impl RdMap {
    #[inline]
    pub fn at(&self, m: usize, d: usize) -> f64 {
        self.amplitude_db[m * self.n_doppler_bins + d]
    }

    /// Linear power at a cell.
    #[inline]
    pub fn power(&self, m: usize, d: usize) -> f64 {
        10f64.powf(self.at(m, d) / 10.0)
    }

    pub fn doppler_bin_width(&self) -> f64 {
        self.doppler_axis[1] - self.doppler_axis[0]
    }

    /// Nearest Doppler column to a frequency.
    pub fn nearest_doppler_bin(&self, freq: f64) -> usize {
        self.doppler_axis
            .iter()
            .enumerate()
            .min_by(|a, b| {
                (a.1 - freq)
                    .abs()
                    .partial_cmp(&(b.1 - freq).abs())
                    .unwrap()
            })
            .map(|(i, _)| i)
            .unwrap()
    }
}

/// Form the RD map from the first CPI of the pulse matrix.
pub fn form_rd_map(pulses: &PulseMatrix, cpi_length: usize, scan_index: usize) -> Result<RdMap> {
    if cpi_length > pulses.n_pulses {
        return Err(Error::Size(format!(
            "CPI length {} exceeds pulse count {}",
            cpi_length, pulses.n_pulses
        )));
    }
    if !cpi_length.is_power_of_two() {
        return Err(Error::Config("CPI length must be a power of two".into()));
    }
    let n_d = cpi_length;
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n_d);
    let scale = 1.0 / (n_d as f64).sqrt();
    let bin_hz = pulses.prf / n_d as f64;

    let mut amplitude_db = vec![DB_FLOOR; pulses.n_range_bins * n_d];
    let mut buf = vec![Complex64::new(0.0, 0.0); n_d];
    for m in 0..pulses.n_range_bins {
        for p in 0..n_d {
            buf[p] = pulses.at(m, p);
        }
        fft.process(&mut buf);
        for d in 0..n_d {
            // Output column d carries frequency (d + 1 - n_d/2) * bin_hz,
            // spanning (-prf/2, prf/2]; map back to the FFT bin.
            let k = d as isize + 1 - n_d as isize / 2;
            let fft_bin = k.rem_euclid(n_d as isize) as usize;
            let power = (buf[fft_bin] * scale).norm_sqr();
            amplitude_db[m * n_d + d] = if power > 0.0 {
                (10.0 * power.log10()).max(DB_FLOOR)
            } else {
                DB_FLOOR
            };
        }
    }

    let doppler_axis = (0..n_d)
        .map(|d| (d as isize + 1 - n_d as isize / 2) as f64 * bin_hz)
        .collect();
    let range_axis = (0..pulses.n_range_bins)
        .map(|m| (m as f64 + 0.5) * pulses.range_bin_size)
        .collect();
    Ok(RdMap {
        amplitude_db,
        n_range_bins: pulses.n_range_bins,
        n_doppler_bins: n_d,
        doppler_axis,
        range_axis,
        scan_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::signal::add_target_return;
    use crate::scenario::ScenarioConfig;
    use nalgebra::Vector3;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn cpi_longer_than_pulse_train_rejected() {
        let cfg = ScenarioConfig {
            pulses_per_scan: 64,
            cpi_length: 64,
            ..Default::default()
        };
        let m = PulseMatrix::zeros(&cfg);
        assert!(form_rd_map(&m, 128, 0).is_err());
    }

    #[test]
    fn all_zero_pulses_hit_the_floor() {
        let cfg = ScenarioConfig {
            pulses_per_scan: 64,
            cpi_length: 64,
            n_range_bins: 4,
            ..Default::default()
        };
        let m = PulseMatrix::zeros(&cfg);
        let rd = form_rd_map(&m, 64, 0).unwrap();
        assert!(rd.amplitude_db.iter().all(|&a| a == DB_FLOOR));
    }

    #[test]
    fn doppler_axis_spans_half_open_interval() {
        let cfg = ScenarioConfig {
            pulses_per_scan: 64,
            cpi_length: 64,
            n_range_bins: 1,
            ..Default::default()
        };
        let rd = form_rd_map(&PulseMatrix::zeros(&cfg), 64, 0).unwrap();
        let bin = cfg.prf / 64.0;
        approx::assert_abs_diff_eq!(rd.doppler_axis[0], -cfg.prf / 2.0 + bin, epsilon = 1e-9);
        approx::assert_abs_diff_eq!(*rd.doppler_axis.last().unwrap(), cfg.prf / 2.0, epsilon = 1e-9);
    }

    #[test]
    fn tone_peaks_at_predicted_doppler() {
        // Constant-velocity target, no clutter: argmax Doppler bin is the
        // nearest bin to -2*rdot/lambda.
        let cfg = ScenarioConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for &rdot in &[-4.0, -1.3, 0.7, 3.1] {
            let mut m = PulseMatrix::zeros(&cfg);
            let state = Vector3::new(600.0, rdot, 0.0);
            add_target_return(&mut m, &state, 10.0, 1.0, 0.99, &mut rng);
            let rd = form_rd_map(&m, cfg.cpi_length, 0).unwrap();
            let predicted = -2.0 * rdot / cfg.wavelength();
            let expect_bin = rd.nearest_doppler_bin(predicted);
            // argmax over the whole map
            let (mut best, mut best_val) = ((0, 0), f64::MIN);
            for mi in 0..rd.n_range_bins {
                for d in 0..rd.n_doppler_bins {
                    if rd.at(mi, d) > best_val {
                        best_val = rd.at(mi, d);
                        best = (mi, d);
                    }
                }
            }
            assert_eq!(best.1, expect_bin, "rdot {rdot}");
        }
    }

    #[test]
    fn white_noise_parseval() {
        let cfg = ScenarioConfig {
            n_range_bins: 8,
            pulses_per_scan: 512,
            cpi_length: 512,
            ..Default::default()
        };
        let mut m = PulseMatrix::zeros(&cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for s in m.samples.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *s = num_complex::Complex64::new(re, im);
        }
        let pulse_power = m.mean_power();
        let rd = form_rd_map(&m, 512, 0).unwrap();
        let rd_power: f64 = (0..rd.n_range_bins)
            .flat_map(|mi| (0..rd.n_doppler_bins).map(move |d| (mi, d)))
            .map(|(mi, d)| rd.power(mi, d))
            .sum::<f64>()
            / (rd.n_range_bins * rd.n_doppler_bins) as f64;
        assert!(
            (rd_power - pulse_power).abs() / pulse_power < 0.05,
            "RD {rd_power} vs pulse {pulse_power}"
        );
    }

    #[test]
    fn tone_power_concentrated_in_three_bins() {
        let cfg = ScenarioConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        // Fractional bin offset ~0.26 for this range rate.
        let rdot = 1.0;
        let mut m = PulseMatrix::zeros(&cfg);
        add_target_return(&mut m, &Vector3::new(600.0, rdot, 0.0), 10.0, 1.0, 0.99, &mut rng);
        let rd = form_rd_map(&m, cfg.cpi_length, 0).unwrap();
        let predicted = -2.0 * rdot / cfg.wavelength();
        let center = rd.nearest_doppler_bin(predicted);
        let mut total = 0.0;
        let mut near = 0.0;
        for mi in 0..rd.n_range_bins {
            for d in 0..rd.n_doppler_bins {
                let p = rd.power(mi, d);
                total += p;
                if (d as isize - center as isize).abs() <= 1 {
                    near += p;
                }
            }
        }
        assert!(near / total >= 0.9, "concentration {}", near / total);
    }
}
