use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A validated family of p-values.
///
/// Values are kept in their original order; a stable ascending ordering of
/// the original indices is computed once at construction so every
/// procedure can walk ranks without re-sorting.
#[derive(Debug, Clone, PartialEq)]
pub struct PValueVector {
    values: Vec<f64>,
    ascending: Vec<usize>,
}

impl PValueVector {
    pub fn new(raw: Vec<f64>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut values = raw;
        for (index, v) in values.iter_mut().enumerate() {
            if !v.is_finite() {
                return Err(Error::NotFinite { index });
            }
            if !(0.0..=1.0).contains(v) {
                return Err(Error::OutOfRange { index, value: *v });
            }
            // fold -0.0 into +0.0 so ties compare equal
            *v += 0.0;
        }
        let mut ascending: Vec<usize> = (0..values.len()).collect();
        // stable: equal values keep original index order
        ascending.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        Ok(Self { values, ascending })
    }

    pub fn from_slice(raw: &[f64]) -> Result<Self> {
        Self::new(raw.to_vec())
    }

    /// Number of hypotheses.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, index: usize) -> f64 {
        self.values[index]
    }

    /// Original indices ordered by ascending p-value, ties by index.
    pub fn ascending(&self) -> &[usize] {
        &self.ascending
    }

    /// The p-value of 1-based rank `rank`.
    pub fn ordered(&self, rank: usize) -> f64 {
        self.values[self.ascending[rank - 1]]
    }

    pub fn sorted_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.ascending.iter().map(|&i| self.values[i])
    }
}

/// A target error rate: an FWER level α or an FDR level q*.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SignificanceLevel(f64);

impl SignificanceLevel {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidLevel(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for SignificanceLevel {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<SignificanceLevel> for f64 {
    fn from(level: SignificanceLevel) -> f64 {
        level.0
    }
}

impl fmt::Display for SignificanceLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_value() {
        let p = PValueVector::new(vec![0.5]).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.values(), &[0.5]);
    }

    #[test]
    fn rejects_out_of_range() {
        assert_eq!(
            PValueVector::new(vec![0.2, 1.5]),
            Err(Error::OutOfRange {
                index: 1,
                value: 1.5
            })
        );
        assert!(matches!(
            PValueVector::new(vec![-1e-300]),
            Err(Error::OutOfRange { index: 0, .. })
        ));
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert_eq!(PValueVector::new(vec![]), Err(Error::EmptyInput));
        assert_eq!(
            PValueVector::new(vec![0.1, f64::NAN]),
            Err(Error::NotFinite { index: 1 })
        );
        assert_eq!(
            PValueVector::new(vec![f64::INFINITY]),
            Err(Error::NotFinite { index: 0 })
        );
    }

    #[test]
    fn endpoints_are_legal() {
        let p = PValueVector::new(vec![1.0, 0.0, -0.0]).unwrap();
        assert_eq!(p.ascending(), &[1, 2, 0]);
        assert!(p.get(2).is_sign_positive());
    }

    #[test]
    fn ordering_is_stable_on_ties() {
        let p = PValueVector::new(vec![0.3, 0.1, 0.3, 0.1]).unwrap();
        assert_eq!(p.ascending(), &[1, 3, 0, 2]);
        assert_eq!(p.ordered(1), 0.1);
        assert_eq!(p.ordered(4), 0.3);
    }

    #[test]
    fn level_bounds() {
        assert!(SignificanceLevel::new(0.05).is_ok());
        for bad in [0.0, 1.0, 1.5, -0.1, f64::NAN] {
            assert!(SignificanceLevel::new(bad).is_err(), "{bad}");
        }
    }
}
