//! Tolerance-aware sign tests shared by the analysis modules.

/// Absolute tolerance used for comparisons against zero.
pub const ZERO_TOL: f64 = 1e-12;

/// Three-way sign of a quantity after snapping small values to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    /// Sign of `value`, treating `|value| <= 1e-12 * max(1, |scale|)` as zero.
    pub fn of(value: f64, scale: f64) -> Sign {
        let tol = ZERO_TOL * scale.abs().max(1.0);
        if value > tol {
            Sign::Positive
        } else if value < -tol {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn is_positive(self) -> bool {
        self == Sign::Positive
    }

    pub fn is_negative(self) -> bool {
        self == Sign::Negative
    }

    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }
}

/// Largest absolute value among the terms that were summed to build a quantity.
pub(crate) fn magnitude(terms: &[f64]) -> f64 {
    terms.iter().fold(0.0_f64, |acc, t| acc.max(t.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snaps_tiny_values() {
        assert_eq!(Sign::of(1e-13, 1.0), Sign::Zero);
        assert_eq!(Sign::of(-1e-13, 0.0), Sign::Zero);
        assert_eq!(Sign::of(2e-12, 1.0), Sign::Positive);
        assert_eq!(Sign::of(-5e-11, 10.0), Sign::Negative);
        // scale widens the band
        assert_eq!(Sign::of(5e-11, 100.0), Sign::Zero);
    }
}
