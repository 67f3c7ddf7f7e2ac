//! Extended real numbers `ℝ ∪ {+∞}` used for objective values.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

/// A real number or `+∞`. Arithmetic propagates `+∞` and never produces NaN
/// from the infinite case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtendedReal {
    Finite(f64),
    Infinity,
}

impl ExtendedReal {
    pub const ZERO: ExtendedReal = ExtendedReal::Finite(0.0);

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::Infinity => None,
        }
    }

    /// Lossy view as `f64` with `+∞` mapped to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::Finite(v) => v,
            ExtendedReal::Infinity => f64::INFINITY,
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl From<f64> for ExtendedReal {
    fn from(v: f64) -> Self {
        if v == f64::INFINITY {
            ExtendedReal::Infinity
        } else {
            ExtendedReal::Finite(v)
        }
    }
}

impl Add for ExtendedReal {
    type Output = ExtendedReal;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(a + b),
            _ => ExtendedReal::Infinity,
        }
    }
}

impl Add<f64> for ExtendedReal {
    type Output = ExtendedReal;
    fn add(self, rhs: f64) -> Self {
        self + ExtendedReal::Finite(rhs)
    }
}

/// Subtracting a finite number keeps `+∞` infinite.
impl Sub<f64> for ExtendedReal {
    type Output = ExtendedReal;
    fn sub(self, rhs: f64) -> Self {
        match self {
            ExtendedReal::Finite(a) => ExtendedReal::Finite(a - rhs),
            ExtendedReal::Infinity => ExtendedReal::Infinity,
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => a.partial_cmp(b),
            (ExtendedReal::Finite(_), ExtendedReal::Infinity) => Some(Ordering::Less),
            (ExtendedReal::Infinity, ExtendedReal::Finite(_)) => Some(Ordering::Greater),
            (ExtendedReal::Infinity, ExtendedReal::Infinity) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::Infinity => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_propagates() {
        let inf = ExtendedReal::Infinity;
        assert_eq!(inf + 1.0, inf);
        assert_eq!(ExtendedReal::Finite(2.0) + inf, inf);
        assert_eq!(inf - 5.0, inf);
        assert_eq!(ExtendedReal::Finite(1.5) + 2.0, ExtendedReal::Finite(3.5));
        assert!(ExtendedReal::Finite(1e300) < inf);
        assert_eq!(ExtendedReal::from(f64::INFINITY), inf);
        assert_eq!(inf.to_f64(), f64::INFINITY);
        assert_eq!(ExtendedReal::Finite(3.0).min(inf), ExtendedReal::Finite(3.0));
    }
}
