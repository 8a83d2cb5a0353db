//! Encoding-independent model of moving point features and the pure
//! algorithms that operate on it.
//!
//! The crate is `no_std` and only needs `alloc`. Parsing and serializing
//! the CSV, XML and JSON encodings lives in the companion `mf` crate.
//!
//! Time is carried as integer milliseconds since the Unix epoch (UTC).
//! Distances and speeds are plain Euclidean quantities in CRS units; no
//! geodesic computation is ever performed, even for geographic CRSs.

#![no_std]

extern crate alloc;

pub mod access;
pub mod bounds;
pub mod diag;
mod error;
pub mod interpolate;
pub mod model;
pub mod resample;
pub mod simplify;
pub mod time;
pub mod validate;

pub use crate::diag::{Diagnostic, Severity};
pub use crate::error::Error;
pub use crate::interpolate::SampleResult;
pub use crate::model::{
    FeatureCollection, InterpolationMode, MovingFeature, Position, STBounds, TemporalGeometry, TemporalProperty, Track,
    Value, ValueType,
};
pub use crate::time::{Period, TimeInstant};
