//! Dempster-Shafer evidence algebra over the two-hypothesis frame
//! {clutter-generated, target-generated}.
//!
//! Masses live on the four subsets of the frame. Although the mass
//! functions produced elsewhere in the crate are Bayesian (no mass on the
//! full frame), combination and the pignistic transform are implemented in
//! full generality.

/// Basic belief assignment over the power set of the two-element frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bba {
    /// Mass on the empty set. Always zero for a valid BBA.
    pub empty: f64,
    /// Mass on {clutter-generated}.
    pub clutter: f64,
    /// Mass on {target-generated}.
    pub target: f64,
    /// Mass on the full frame (total ignorance).
    pub unknown: f64,
}

/// Clamp applied to certain inputs before combination so that total
/// conflict (normalizer 1-K = 0) cannot occur.
pub const CONFLICT_CLAMP: f64 = 1e-9;

impl Bba {
    pub fn new(clutter: f64, target: f64, unknown: f64) -> Self {
        Bba {
            empty: 0.0,
            clutter,
            target,
            unknown,
        }
    }

    /// Bayesian BBA from a probability that the measurement is
    /// target-generated.
    pub fn from_probability(p_target: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&p_target));
        Bba::new(1.0 - p_target, p_target, 0.0)
    }

    /// Vacuous BBA: all mass on the frame.
    pub fn vacuous() -> Self {
        Bba::new(0.0, 0.0, 1.0)
    }

    pub fn mass_sum(&self) -> f64 {
        self.empty + self.clutter + self.target + self.unknown
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.empty == 0.0
            && self.clutter >= 0.0
            && self.target >= 0.0
            && self.unknown >= 0.0
            && (self.mass_sum() - 1.0).abs() <= tol
    }

    /// Pignistic probability of the target-generated hypothesis:
    /// singleton mass plus half of the frame mass.
    pub fn pignistic_target(&self) -> f64 {
        self.target + self.unknown / 2.0
    }

    /// Pignistic probability of the clutter-generated hypothesis.
    pub fn pignistic_clutter(&self) -> f64 {
        self.clutter + self.unknown / 2.0
    }
}

/// Outcome of a DS combination, flagging whether the inputs had to be
/// clamped away from total conflict.
#[derive(Debug, Clone, Copy)]
pub struct Combined {
    pub bba: Bba,
    pub clamped: bool,
}

fn clamp_certainties(m: &Bba) -> Bba {
    // Pull singleton certainties slightly off 1 so two opposed certain
    // sources never produce K = 1.
    let lo = CONFLICT_CLAMP;
    let hi = 1.0 - CONFLICT_CLAMP;
    let mut c = m.clutter;
    let mut t = m.target;
    if c > hi && m.unknown == 0.0 {
        c = hi;
        t = t.max(lo);
    }
    if t > hi && m.unknown == 0.0 {
        t = hi;
        c = c.max(lo);
    }
    let sum = c + t + m.unknown;
    Bba::new(c / sum, t / sum, m.unknown / sum)
}

/// Conjunctive combination of two BBAs with conflict renormalization.
///
/// Returns the clamped variant when the raw inputs are in (near-)total
/// conflict; the clamp keeps the rule continuous at K -> 1.
pub fn ds_combine(m1: &Bba, m2: &Bba) -> Combined {
    let raw_conflict = m1.clutter * m2.target + m1.target * m2.clutter;
    let clamped = raw_conflict >= 1.0 - 1e-12;
    let (a, b) = if clamped {
        (clamp_certainties(m1), clamp_certainties(m2))
    } else {
        (*m1, *m2)
    };

    let clutter = a.clutter * b.clutter + a.clutter * b.unknown + a.unknown * b.clutter;
    let target = a.target * b.target + a.target * b.unknown + a.unknown * b.target;
    let unknown = a.unknown * b.unknown;
    // Summing the surviving masses equals 1 - K but avoids the
    // cancellation of computing 1 - conflict when K is close to 1.
    let norm = clutter + target + unknown;
    Combined {
        bba: Bba::new(clutter / norm, target / norm, unknown / norm),
        clamped,
    }
}
