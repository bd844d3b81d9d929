//! Probabilistic data association via the simplified bipartite
//! belief-propagation iteration (two ratio messages per target-measurement
//! pair), linear in targets and measurements per sweep.

/// Convergence parameters of the BP iteration.
#[derive(Debug, Clone, Copy)]
pub struct BpConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for BpConfig {
    fn default() -> Self {
        BpConfig {
            tolerance: 1e-6,
            max_iterations: 1000,
        }
    }
}

/// Marginal association probabilities.
///
/// `targets[i][0]` is the missed-detection marginal of target i and
/// `targets[i][j]` (j>=1) the marginal that measurement j-1 originated
/// from target i. `clutter[j]` is the marginal that measurement j is
/// clutter. Each target row sums to one; each measurement column
/// (clutter plus all targets) sums to one at BP convergence.
#[derive(Debug, Clone)]
pub struct AssociationBeliefs {
    pub targets: Vec<Vec<f64>>,
    pub clutter: Vec<f64>,
    /// Sum of incoming target-to-measurement messages per measurement at
    /// the fixed point; the non-clutter part of the column normalizer.
    pub target_mass: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

impl AssociationBeliefs {
    pub fn missed(&self, i: usize) -> f64 {
        self.targets[i][0]
    }

    /// Association weights of target i over measurements (index j-1).
    pub fn measurement_weights(&self, i: usize) -> &[f64] {
        &self.targets[i][1..]
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.targets[i].iter().sum()
    }

    pub fn column_sum(&self, j: usize) -> f64 {
        self.clutter[j] + self.targets.iter().map(|row| row[j + 1]).sum::<f64>()
    }
}

/// Input weights of one data-association instance.
///
/// `detected[i][j]` is the joint weight of "target i generated measurement
/// j" (detection prior times spatial likelihood); `missed[i]` the weight
/// of "target i missed"; `clutter[j]` the clutter-origin weight of
/// measurement j.
#[derive(Debug, Clone)]
pub struct AssociationWeights {
    pub detected: Vec<Vec<f64>>,
    pub missed: Vec<f64>,
    pub clutter: Vec<f64>,
}

impl AssociationWeights {
    pub fn from_likelihoods(
        likelihoods: &super::evaluate::LikelihoodGrid,
        missed_detected: &[(f64, f64)], // (detected weight, missed weight) per target
        clutter_messages: &[f64],
    ) -> Self {
        let detected = likelihoods
            .targets
            .iter()
            .zip(missed_detected)
            .map(|(row, &(pd, _))| row.iter().map(|&l| pd * l).collect())
            .collect();
        AssociationWeights {
            detected,
            missed: missed_detected.iter().map(|&(_, pm)| pm).collect(),
            clutter: clutter_messages.to_vec(),
        }
    }
}

/// Run the bipartite BP iteration to convergence and return normalized
/// marginals.
pub fn bp_data_association(weights: &AssociationWeights, cfg: &BpConfig) -> AssociationBeliefs {
    let n_t = weights.detected.len();
    let n_m = weights.clutter.len();
    debug_assert!(weights.detected.iter().all(|r| r.len() == n_m));
    debug_assert_eq!(weights.missed.len(), n_t);

    // mu[i][j]: target -> measurement ratio; nu[i][j]: measurement -> target.
    let mut nu = vec![vec![1.0f64; n_m]; n_t];
    let mut mu = vec![vec![0.0f64; n_m]; n_t];
    let mut converged = false;
    let mut iterations = 0;

    for it in 0..cfg.max_iterations.max(1) {
        iterations = it + 1;
        // Target-side update.
        for i in 0..n_t {
            let total: f64 = weights.missed[i]
                + (0..n_m).map(|j| weights.detected[i][j] * nu[i][j]).sum::<f64>();
            for j in 0..n_m {
                let denom = total - weights.detected[i][j] * nu[i][j];
                mu[i][j] = if denom > 0.0 {
                    weights.detected[i][j] / denom
                } else {
                    0.0
                };
            }
        }
        // Measurement-side update.
        let mut max_delta = 0.0f64;
        for j in 0..n_m {
            let total: f64 = weights.clutter[j] + (0..n_t).map(|i| mu[i][j]).sum::<f64>();
            for i in 0..n_t {
                let denom = total - mu[i][j];
                let new = if denom > 0.0 { 1.0 / denom } else { 0.0 };
                max_delta = max_delta.max((new - nu[i][j]).abs());
                nu[i][j] = new;
            }
        }
        if max_delta < cfg.tolerance {
            converged = true;
            break;
        }
    }

    // Row-normalized target marginals.
    let mut targets = Vec::with_capacity(n_t);
    for i in 0..n_t {
        let mut row = Vec::with_capacity(n_m + 1);
        row.push(weights.missed[i]);
        for j in 0..n_m {
            row.push(weights.detected[i][j] * nu[i][j]);
        }
        let sum: f64 = row.iter().sum();
        if sum > 0.0 {
            for v in &mut row {
                *v /= sum;
            }
        } else {
            row[0] = 1.0;
        }
        targets.push(row);
    }

    // Column-normalized clutter marginals.
    let mut clutter = Vec::with_capacity(n_m);
    let mut target_mass = Vec::with_capacity(n_m);
    for j in 0..n_m {
        let mass: f64 = (0..n_t).map(|i| mu[i][j]).sum();
        let total = weights.clutter[j] + mass;
        clutter.push(if total > 0.0 {
            weights.clutter[j] / total
        } else {
            1.0
        });
        target_mass.push(mass);
    }

    AssociationBeliefs {
        targets,
        clutter,
        target_mass,
        converged,
        iterations,
    }
}

/// Exhaustive enumeration of valid association events. Exponential; test
/// oracle and reference for small instances only.
pub fn enumerate_association(weights: &AssociationWeights) -> AssociationBeliefs {
    let n_t = weights.detected.len();
    let n_m = weights.clutter.len();
    let mut target_post = vec![vec![0.0f64; n_m + 1]; n_t];
    let mut clutter_post = vec![0.0f64; n_m];
    let mut total = 0.0f64;

    // assignment[i] in 0..=n_m, 0 = missed; measurements used at most once.
    let mut assignment = vec![0usize; n_t];
    loop {
        let mut used = vec![false; n_m];
        let mut valid = true;
        let mut weight = 1.0f64;
        for i in 0..n_t {
            let a = assignment[i];
            if a == 0 {
                weight *= weights.missed[i];
            } else {
                if used[a - 1] {
                    valid = false;
                    break;
                }
                used[a - 1] = true;
                weight *= weights.detected[i][a - 1];
            }
        }
        if valid {
            for j in 0..n_m {
                if !used[j] {
                    weight *= weights.clutter[j];
                }
            }
            total += weight;
            for i in 0..n_t {
                target_post[i][assignment[i]] += weight;
            }
            for j in 0..n_m {
                if !used[j] {
                    clutter_post[j] += weight;
                }
            }
        }
        // Next assignment in mixed radix.
        let mut pos = 0;
        loop {
            if pos == n_t {
                break;
            }
            assignment[pos] += 1;
            if assignment[pos] <= n_m {
                break;
            }
            assignment[pos] = 0;
            pos += 1;
        }
        if pos == n_t {
            break;
        }
    }

    for row in &mut target_post {
        for v in row.iter_mut() {
            *v /= total;
        }
    }
    for v in &mut clutter_post {
        *v /= total;
    }
    AssociationBeliefs {
        targets: target_post,
        clutter: clutter_post,
        target_mass: vec![0.0; n_m],
        converged: true,
        iterations: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn cfg() -> BpConfig {
        BpConfig::default()
    }

    #[test]
    fn no_measurements_forces_missed() {
        let w = AssociationWeights {
            detected: vec![vec![], vec![]],
            missed: vec![0.1, 0.3],
            clutter: vec![],
        };
        let b = bp_data_association(&w, &cfg());
        assert_abs_diff_eq!(b.missed(0), 1.0);
        assert_abs_diff_eq!(b.missed(1), 1.0);
    }

    #[test]
    fn single_pair_matches_enumeration() {
        let w = AssociationWeights {
            detected: vec![vec![0.9 * 5.0e-3]],
            missed: vec![0.1],
            clutter: vec![1e-6],
        };
        let bp = bp_data_association(&w, &cfg());
        let oracle = enumerate_association(&w);
        assert_abs_diff_eq!(bp.targets[0][1], oracle.targets[0][1], epsilon = 1e-6);
        assert_abs_diff_eq!(bp.clutter[0], oracle.clutter[0], epsilon = 1e-6);
    }

    #[test]
    fn symmetric_instance_has_symmetric_marginals() {
        let w = AssociationWeights {
            detected: vec![vec![0.4, 0.4], vec![0.4, 0.4]],
            missed: vec![0.1, 0.1],
            clutter: vec![0.05, 0.05],
        };
        let b = bp_data_association(&w, &cfg());
        assert_abs_diff_eq!(b.targets[0][1], b.targets[1][2], epsilon = 1e-9);
        assert_abs_diff_eq!(b.targets[0][2], b.targets[1][1], epsilon = 1e-9);
        assert_abs_diff_eq!(b.targets[0][1], b.targets[0][2], epsilon = 1e-9);
    }

    #[test]
    fn tree_cases_match_enumeration() {
        // One target vs many measurements and one measurement vs many
        // targets are tree-structured, where BP is exact.
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..200 {
            let n_m = rng.gen_range(1..5);
            let w = AssociationWeights {
                detected: vec![(0..n_m).map(|_| rng.gen_range(1e-4..1.0)).collect()],
                missed: vec![rng.gen_range(0.01..1.0)],
                clutter: (0..n_m).map(|_| rng.gen_range(1e-4..1.0)).collect(),
            };
            let bp = bp_data_association(&w, &cfg());
            let oracle = enumerate_association(&w);
            for j in 0..=n_m {
                assert_abs_diff_eq!(bp.targets[0][j], oracle.targets[0][j], epsilon = 1e-6);
            }
            for j in 0..n_m {
                assert_abs_diff_eq!(bp.clutter[j], oracle.clutter[j], epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn loopy_cases_satisfy_normalization() {
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..200 {
            let n_t = rng.gen_range(2..4);
            let n_m = rng.gen_range(2..5);
            let w = AssociationWeights {
                detected: (0..n_t)
                    .map(|_| (0..n_m).map(|_| rng.gen_range(1e-4..1.0)).collect())
                    .collect(),
                missed: (0..n_t).map(|_| rng.gen_range(0.01..1.0)).collect(),
                clutter: (0..n_m).map(|_| rng.gen_range(1e-4..1.0)).collect(),
            };
            let b = bp_data_association(&w, &cfg());
            assert!(b.converged);
            for i in 0..n_t {
                assert_abs_diff_eq!(b.row_sum(i), 1.0, epsilon = 1e-6);
            }
            for j in 0..n_m {
                assert_abs_diff_eq!(b.column_sum(j), 1.0, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn deterministic_given_inputs() {
        let w = AssociationWeights {
            detected: vec![vec![0.3, 0.2], vec![0.1, 0.4]],
            missed: vec![0.2, 0.2],
            clutter: vec![0.1, 0.1],
        };
        let a = bp_data_association(&w, &cfg());
        let b = bp_data_association(&w, &cfg());
        assert_eq!(a.targets, b.targets);
        assert_eq!(a.clutter, b.clutter);
    }
}
