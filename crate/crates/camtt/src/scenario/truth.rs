//! Ground-truth target trajectories under the constant-acceleration model.

use nalgebra::Vector3;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::ScenarioConfig;
use crate::error::Result;
use crate::mp::gaussian::{ca_process_noise, ca_transition};

/// True trajectory of one target; stored states are the truth.
#[derive(Debug, Clone)]
pub struct TruthTarget {
    pub id: usize,
    /// One (range, range-rate, range-accel) state per scan.
    pub states: Vec<Vector3<f64>>,
    pub radial_length: f64,
    pub birth_scan: usize,
    pub death_scan: usize,
}

impl TruthTarget {
    pub fn state_at(&self, scan: usize) -> Option<&Vector3<f64>> {
        if scan < self.birth_scan || scan > self.death_scan {
            return None;
        }
        self.states.get(scan - self.birth_scan)
    }
}

/// Propagate initial states through the CA model with sampled process
/// noise. Deterministic given the seed.
pub fn generate_truth(config: &ScenarioConfig, rng: &mut ChaCha8Rng) -> Result<Vec<TruthTarget>> {
    config.validate()?;
    let f = ca_transition(config.scan_period);
    let q = ca_process_noise(config.scan_period, config.sigma_a);
    let chol = if config.sigma_a > 0.0 {
        q.cholesky().map(|c| c.l())
    } else {
        None
    };

    let mut targets = Vec::with_capacity(config.n_targets);
    for id in 0..config.n_targets {
        let mut state = Vector3::new(
            rng.gen_range(config.range_min..=config.range_max),
            rng.gen_range(config.velocity_min..=config.velocity_max),
            0.0,
        );
        let radial_length =
            rng.gen_range(config.radial_length_min..=config.radial_length_max);
        let mut states = Vec::with_capacity(config.n_scans);
        states.push(state);
        for _ in 1..config.n_scans {
            state = f * state;
            if let Some(l) = &chol {
                let e = Vector3::from_fn(|_, _| StandardNormal.sample(rng));
                state += l * e;
            }
            states.push(state);
        }
        targets.push(TruthTarget {
            id,
            states,
            radial_length,
            birth_scan: 0,
            death_scan: config.n_scans - 1,
        });
    }
    Ok(targets)
}
