use core::fmt;

use crate::model::InterpolationMode;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Positions must have 2 or 3 coordinates.
    InvalidDimension(usize),
    /// Period with `begin > end`.
    InvalidPeriod,
    /// No feature carries a single sample.
    EmptyCollection,
    DimensionalityMismatch {
        expected: usize,
        found: usize,
    },
    UnsupportedInterpolation(InterpolationMode),
    /// The requested window does not overlap the feature.
    EmptyIntersection,
    /// Window with `t1 >= t2`.
    InvalidWindow,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidDimension(n) => write!(f, "positions need 2 or 3 coordinates, got {n}"),
            Error::InvalidPeriod => f.write_str("period begins after it ends"),
            Error::EmptyCollection => f.write_str("collection holds no samples"),
            Error::DimensionalityMismatch { expected, found } => {
                write!(f, "dimensionality mismatch: expected {expected}D, found {found}D")
            }
            Error::UnsupportedInterpolation(mode) => {
                write!(f, "operation not supported for {mode} interpolation")
            }
            Error::EmptyIntersection => f.write_str("window does not intersect the feature"),
            Error::InvalidWindow => f.write_str("window start must precede its end"),
        }
    }
}

impl core::error::Error for Error {}
