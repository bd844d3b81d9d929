//! Pulse-domain synthesis: fluctuating target returns plus compound
//! Gaussian sea clutter at a prescribed signal-to-clutter ratio.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, Gamma, Normal};

use super::truth::TruthTarget;
use super::{ClutterModel, ClutterParams, ScenarioConfig};
use crate::error::Result;

/// Complex echo matrix of one scan: M range bins by P pulses, row-major.
#[derive(Debug, Clone)]
pub struct PulseMatrix {
    pub samples: Vec<Complex64>,
    pub n_range_bins: usize,
    pub n_pulses: usize,
    pub prf: f64,
    pub wavelength: f64,
    pub range_bin_size: f64,
}

impl PulseMatrix {
    pub fn zeros(config: &ScenarioConfig) -> Self {
        PulseMatrix {
            samples: vec![Complex64::new(0.0, 0.0); config.n_range_bins * config.pulses_per_scan],
            n_range_bins: config.n_range_bins,
            n_pulses: config.pulses_per_scan,
            prf: config.prf,
            wavelength: config.wavelength(),
            range_bin_size: config.range_bin_size,
        }
    }

    #[inline]
    pub fn at(&self, m: usize, p: usize) -> Complex64 {
        self.samples[m * self.n_pulses + p]
    }

    #[inline]
    pub fn add(&mut self, m: usize, p: usize, v: Complex64) {
        self.samples[m * self.n_pulses + p] += v;
    }

    pub fn mean_power(&self) -> f64 {
        self.samples.iter().map(|c| c.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }
}

/// Fraction of a target's radial extent overlapping each range bin.
/// Returns (first bin, weights summing to one) or None if fully off-scene.
pub fn range_weights(
    range: f64,
    radial_length: f64,
    bin_size: f64,
    n_bins: usize,
) -> Option<(usize, Vec<f64>)> {
    let lo = range - radial_length / 2.0;
    let hi = range + radial_length / 2.0;
    let first = (lo / bin_size).floor().max(0.0) as usize;
    let last = ((hi / bin_size).ceil() as isize - 1).min(n_bins as isize - 1);
    if last < first as isize || first >= n_bins {
        return None;
    }
    let last = last as usize;
    let mut weights = Vec::with_capacity(last - first + 1);
    for m in first..=last {
        let bin_lo = m as f64 * bin_size;
        let bin_hi = bin_lo + bin_size;
        let overlap = (hi.min(bin_hi) - lo.max(bin_lo)).max(0.0);
        weights.push(overlap / radial_length);
    }
    let sum: f64 = weights.iter().sum();
    if sum <= 0.0 {
        return None;
    }
    for w in &mut weights {
        *w /= sum;
    }
    Some((first, weights))
}

/// Correlated positive RCS fluctuation sequence: AR(1) on log-amplitude,
/// exponentiated, then normalized to unit mean power over the realization.
pub fn rcs_sequence(n: usize, ar_coefficient: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    const LOG_SIGMA: f64 = 0.2;
    let innovation = (1.0 - ar_coefficient * ar_coefficient).sqrt();
    let e0: f64 = StandardNormal.sample(rng);
    let mut log_amp = LOG_SIGMA * e0;
    let mut a = Vec::with_capacity(n);
    a.push(log_amp.exp());
    for _ in 1..n {
        let e: f64 = StandardNormal.sample(rng);
        log_amp = ar_coefficient * log_amp + LOG_SIGMA * innovation * e;
        a.push(log_amp.exp());
    }
    let mean_power = a.iter().map(|v| v * v).sum::<f64>() / n as f64;
    let scale = mean_power.sqrt().recip();
    for v in &mut a {
        *v *= scale;
    }
    a
}

fn complex_standard_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) / std::f64::consts::SQRT_2
}

/// Fill the matrix with compound-Gaussian clutter. Texture is gamma with
/// unit mean (Gaussian-copula AR(1) across pulses), speckle is a complex
/// AR(1) whose lag-1 correlation matches a Gaussian Doppler spectrum with
/// the configured mean Doppler and width.
pub fn add_clutter(matrix: &mut PulseMatrix, params: &ClutterParams, rng: &mut ChaCha8Rng) {
    let gamma = Gamma::new(params.shape, params.shape).expect("valid gamma");
    let unit_normal = Normal::new(0.0, 1.0).unwrap();
    // Gaussian spectrum autocorrelation at lag 1: exp(-2 (pi sigma_f / prf)^2),
    // rotated by the mean Doppler.
    let rho_mag = (-2.0 * (std::f64::consts::PI * params.spectral_width / matrix.prf).powi(2)).exp();
    let phase = 2.0 * std::f64::consts::PI * params.mean_doppler / matrix.prf;
    let rho = Complex64::from_polar(rho_mag, phase);
    let innovation = (1.0 - rho_mag * rho_mag).sqrt();
    let tex_rho = params.texture_correlation;
    let tex_innovation = (1.0 - tex_rho * tex_rho).sqrt();
    let amp = params.mean_power.sqrt();

    for m in 0..matrix.n_range_bins {
        let mut speckle = complex_standard_normal(rng);
        let mut tex_gauss: f64 = StandardNormal.sample(rng);
        for p in 0..matrix.n_pulses {
            if p > 0 {
                speckle = rho * speckle + innovation * complex_standard_normal(rng);
                let e: f64 = StandardNormal.sample(rng);
                tex_gauss = tex_rho * tex_gauss + tex_innovation * e;
            }
            let texture = match params.model {
                ClutterModel::Gaussian => 1.0,
                ClutterModel::K => {
                    let u = unit_normal.cdf(tex_gauss).clamp(1e-12, 1.0 - 1e-12);
                    gamma.inverse_cdf(u)
                }
            };
            matrix.add(m, p, amp * texture.sqrt() * speckle);
        }
    }
}

/// Add the returns of one target at its state for this scan.
pub fn add_target_return(
    matrix: &mut PulseMatrix,
    state: &nalgebra::Vector3<f64>,
    radial_length: f64,
    total_power: f64,
    ar_coefficient: f64,
    rng: &mut ChaCha8Rng,
) {
    let Some((first, weights)) = range_weights(
        state[0],
        radial_length,
        matrix.range_bin_size,
        matrix.n_range_bins,
    ) else {
        return;
    };
    let a = rcs_sequence(matrix.n_pulses, ar_coefficient, rng);
    let phi: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    let pri = 1.0 / matrix.prf;
    for (offset, w) in weights.iter().enumerate() {
        let amp0 = (total_power * w).sqrt();
        let m = first + offset;
        for (p, ap) in a.iter().enumerate() {
            let t = p as f64 * pri;
            let radial = state[0] + state[1] * t + 0.5 * state[2] * t * t;
            let phase = phi - 4.0 * std::f64::consts::PI * radial / matrix.wavelength;
            matrix.add(m, p, Complex64::from_polar(amp0 * ap, phase));
        }
    }
}

/// Synthesize the echo matrix of one scan: clutter plus every target
/// present at the scan, with total target power set by the SCR relative
/// to the clutter mean power.
pub fn synthesize_returns(
    truth: &[TruthTarget],
    scan: usize,
    config: &ScenarioConfig,
    scr_db: f64,
    rng: &mut ChaCha8Rng,
) -> Result<PulseMatrix> {
    config.validate()?;
    let mut matrix = PulseMatrix::zeros(config);
    add_clutter(&mut matrix, &config.clutter, rng);
    let total_power = 10f64.powf(scr_db / 10.0) * config.clutter.mean_power;
    let ar = 0.99;
    for target in truth {
        if let Some(state) = target.state_at(scan) {
            add_target_return(&mut matrix, state, target.radial_length, total_power, ar, rng);
        }
    }
    Ok(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::Vector3;
    use rand::SeedableRng;

    #[test]
    fn scr_zero_db_gives_unit_target_power() {
        assert_abs_diff_eq!(10f64.powf(0.0 / 10.0) * 1.0, 1.0);
    }

    #[test]
    fn single_bin_constant_sequence_modulus() {
        // With omega(m)=1 and a(p) constant = 1 (after normalization a
        // constant sequence stays 1), |s_t(m,p)| = sqrt(P_t).
        let cfg = ScenarioConfig {
            n_range_bins: 1,
            range_bin_size: 100.0,
            pulses_per_scan: 16,
            cpi_length: 16,
            ..Default::default()
        };
        let mut matrix = PulseMatrix::zeros(&cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // ar coefficient 0 with LOG_SIGMA applied still fluctuates; drive
        // the modulus check through the range-weight path with an
        // explicitly constant sequence instead.
        let (first, w) = range_weights(50.0, 10.0, 100.0, 1).unwrap();
        assert_eq!(first, 0);
        assert_abs_diff_eq!(w[0], 1.0);
        let pt = 4.0;
        let phi: f64 = rng.gen_range(-1.0..1.0);
        for p in 0..16 {
            matrix.add(0, p, Complex64::from_polar((pt * w[0]).sqrt(), phi));
        }
        for p in 0..16 {
            assert_abs_diff_eq!(matrix.at(0, p).norm(), pt.sqrt(), epsilon = 1e-12);
        }
    }

    #[test]
    fn range_weights_overlap_and_normalize() {
        // 10 m target centered at 28 m with 15 m bins spans bins 1..2.
        let (first, w) = range_weights(28.0, 10.0, 15.0, 96).unwrap();
        assert_eq!(first, 1);
        assert_eq!(w.len(), 2);
        assert_abs_diff_eq!(w.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        assert!(w[0] > w[1]); // [23,33] covers 7 m of bin 1, 3 m of bin 2
        assert_abs_diff_eq!(w[0], 0.7, epsilon = 1e-12);
    }

    #[test]
    fn rcs_sequence_positive_with_configured_correlation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = rcs_sequence(10_000, 0.99, &mut rng);
        assert!(a.iter().all(|&v| v > 0.0));
        let mean = a.iter().sum::<f64>() / a.len() as f64;
        let var = a.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / a.len() as f64;
        let lag1 = a
            .windows(2)
            .map(|w| (w[0] - mean) * (w[1] - mean))
            .sum::<f64>()
            / ((a.len() - 1) as f64 * var);
        assert!((lag1 - 0.99).abs() < 0.05, "lag-1 autocorr {lag1}");
        // Unit mean power by construction.
        let p = a.iter().map(|v| v * v).sum::<f64>() / a.len() as f64;
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mean_target_power_matches_pt() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cfg = ScenarioConfig::default();
        let pt = 2.5;
        let mut total = 0.0;
        let trials = 100;
        for _ in 0..trials {
            let mut m = PulseMatrix::zeros(&cfg);
            let state = Vector3::new(600.0, 1.0, 0.0);
            add_target_return(&mut m, &state, 20.0, pt, 0.99, &mut rng);
            // Sum over range bins of per-pulse power, averaged over pulses.
            total += m.samples.iter().map(|c| c.norm_sqr()).sum::<f64>() / cfg.pulses_per_scan as f64;
        }
        let mean = total / trials as f64;
        assert!((mean - pt).abs() / pt < 0.10, "mean target power {mean} vs {pt}");
    }

    #[test]
    fn realized_scr_within_half_db() {
        let cfg = ScenarioConfig::default();
        let scr_db = 3.0;
        let mut ratio_db_sum = 0.0;
        let seeds = 50;
        for seed in 0..seeds {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let mut clutter_only = PulseMatrix::zeros(&cfg);
            add_clutter(&mut clutter_only, &cfg.clutter, &mut rng);
            let clutter_power = clutter_only.mean_power();

            let mut target_only = PulseMatrix::zeros(&cfg);
            let pt = 10f64.powf(scr_db / 10.0) * cfg.clutter.mean_power;
            add_target_return(
                &mut target_only,
                &Vector3::new(600.0, 2.0, 0.0),
                20.0,
                pt,
                0.99,
                &mut rng,
            );
            let target_power = target_only
                .samples
                .iter()
                .map(|c| c.norm_sqr())
                .sum::<f64>()
                / cfg.pulses_per_scan as f64;
            ratio_db_sum += 10.0 * (target_power / clutter_power).log10();
        }
        let mean_db = ratio_db_sum / seeds as f64;
        assert!(
            (mean_db - scr_db).abs() < 0.5,
            "realized SCR {mean_db} dB vs nominal {scr_db} dB"
        );
    }

    #[test]
    fn clutter_mean_power_is_configured() {
        let cfg = ScenarioConfig::default();
        let mut acc = 0.0;
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut m = PulseMatrix::zeros(&cfg);
            add_clutter(&mut m, &cfg.clutter, &mut rng);
            acc += m.mean_power();
        }
        let mean = acc / 20.0;
        assert!((mean - 1.0).abs() < 0.1, "clutter mean power {mean}");
    }

    #[test]
    fn synthesis_deterministic_given_seed() {
        let cfg = ScenarioConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let truth = crate::scenario::generate_truth(&cfg, &mut rng).unwrap();
        let a = synthesize_returns(&truth, 0, &cfg, 0.0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = synthesize_returns(&truth, 0, &cfg, 0.0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a.samples, b.samples);
    }
}
