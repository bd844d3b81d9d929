//! Bernoulli target-visibility chain: prediction through the two-state
//! transition matrix, detection-model evaluation, and the Bayes update
//! from the missed-detection association belief.

/// Bernoulli belief that a target is visible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityBelief {
    pub p_visible: f64,
}

impl VisibilityBelief {
    pub fn new(p_visible: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&p_visible));
        VisibilityBelief { p_visible }
    }
}

/// Row-stochastic 2x2 transition matrix of the visibility chain, stored
/// as the two diagonal (stay) probabilities.
#[derive(Debug, Clone, Copy)]
pub struct VisibilityTransition {
    /// P(visible at k | visible at k-1)
    pub stay_visible: f64,
    /// P(invisible at k | invisible at k-1)
    pub stay_invisible: f64,
}

impl VisibilityTransition {
    pub fn symmetric(stay: f64) -> Self {
        VisibilityTransition {
            stay_visible: stay,
            stay_invisible: stay,
        }
    }
}

/// Detection probabilities conditioned on the visibility state.
#[derive(Debug, Clone, Copy)]
pub struct DetectionModelParams {
    pub pd_visible: f64,
    pub pd_invisible: f64,
}

pub fn predict_visibility(
    prev: &VisibilityBelief,
    transition: &VisibilityTransition,
) -> VisibilityBelief {
    let p = prev.p_visible * transition.stay_visible
        + (1.0 - prev.p_visible) * (1.0 - transition.stay_invisible);
    VisibilityBelief::new(p)
}

/// Prior weights on (detected, missed) for a target, marginalized over the
/// predicted visibility state.
pub fn evaluate_visibility(
    vis: &VisibilityBelief,
    params: &DetectionModelParams,
) -> (f64, f64) {
    let detected =
        vis.p_visible * params.pd_visible + (1.0 - vis.p_visible) * params.pd_invisible;
    (detected, 1.0 - detected)
}

/// Bayes update of the visibility belief from the marginal probability
/// that the target was missed, `b(a_{i,0}=1)`.
pub fn update_visibility(
    vis: &VisibilityBelief,
    p_missed: f64,
    params: &DetectionModelParams,
) -> VisibilityBelief {
    let p_detected = 1.0 - p_missed;
    let like_visible =
        p_detected * params.pd_visible + p_missed * (1.0 - params.pd_visible);
    let like_invisible =
        p_detected * params.pd_invisible + p_missed * (1.0 - params.pd_invisible);
    let num = vis.p_visible * like_visible;
    let den = num + (1.0 - vis.p_visible) * like_invisible;
    if den <= 0.0 {
        // Degenerate prior: keep it rather than produce NaN.
        return *vis;
    }
    VisibilityBelief::new(num / den)
}
