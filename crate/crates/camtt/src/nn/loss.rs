//! Binary cross-entropy over a batch of classification probabilities,
//! with optional per-class weighting for imbalanced training sets.

pub const PROB_CLAMP: f64 = 1e-7;

fn clamp(p: f64) -> f64 {
    p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP)
}

/// Mean BCE: -(1/N) sum [y ln p + (1-y) ln(1-p)]. Empty batches score 0.
pub fn bce_loss(predictions: &[f64], labels: &[f64]) -> f64 {
    bce_loss_weighted(predictions, labels, 1.0)
}

/// Weighted mean BCE: the positive-class term is scaled by `pos_weight`.
pub fn bce_loss_weighted(predictions: &[f64], labels: &[f64], pos_weight: f64) -> f64 {
    assert_eq!(predictions.len(), labels.len());
    if predictions.is_empty() {
        return 0.0;
    }
    let sum: f64 = predictions
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let p = clamp(p);
            -(pos_weight * y * p.ln() + (1.0 - y) * (1.0 - p).ln())
        })
        .sum();
    sum / predictions.len() as f64
}

/// Gradient of the weighted mean BCE with respect to each prediction.
pub fn bce_grad(predictions: &[f64], labels: &[f64], pos_weight: f64) -> Vec<f64> {
    let n = predictions.len() as f64;
    predictions
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let p = clamp(p);
            (-pos_weight * y / p + (1.0 - y) / (1.0 - p)) / n
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn half_predictions_score_ln2() {
        let p = vec![0.5; 6];
        let y = vec![1.0, 0.0, 1.0, 1.0, 0.0, 0.0];
        assert_abs_diff_eq!(bce_loss(&p, &y), std::f64::consts::LN_2, epsilon = 1e-12);
    }

    #[test]
    fn perfect_predictions_score_near_zero() {
        let loss = bce_loss(&[1.0, 0.0], &[1.0, 0.0]);
        assert!(loss < 1e-6);
        assert!(loss >= 0.0);
    }

    #[test]
    fn single_item_hand_value() {
        assert_abs_diff_eq!(bce_loss(&[0.9], &[1.0]), -(0.9f64.ln()), epsilon = 1e-12);
        assert_abs_diff_eq!(bce_loss(&[0.9], &[1.0]), 0.105360516, epsilon = 1e-9);
    }

    #[test]
    fn empty_batch_is_zero() {
        assert_eq!(bce_loss(&[], &[]), 0.0);
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let p = vec![0.3, 0.8, 0.55];
        let y = vec![1.0, 0.0, 1.0];
        let g = bce_grad(&p, &y, 2.5);
        let h = 1e-7;
        for i in 0..p.len() {
            let mut hi = p.clone();
            let mut lo = p.clone();
            hi[i] += h;
            lo[i] -= h;
            let fd = (bce_loss_weighted(&hi, &y, 2.5) - bce_loss_weighted(&lo, &y, 2.5))
                / (2.0 * h);
            assert_abs_diff_eq!(g[i], fd, epsilon = 1e-5);
        }
    }

    #[test]
    fn positive_weight_scales_positive_term_only() {
        let base = bce_loss_weighted(&[0.4], &[1.0], 1.0);
        let scaled = bce_loss_weighted(&[0.4], &[1.0], 3.0);
        assert_abs_diff_eq!(scaled, 3.0 * base, epsilon = 1e-12);
        let neg = bce_loss_weighted(&[0.4], &[0.0], 3.0);
        assert_abs_diff_eq!(neg, bce_loss_weighted(&[0.4], &[0.0], 1.0), epsilon = 1e-12);
    }
}
