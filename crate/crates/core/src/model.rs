//! In-memory representation of moving point features.
//!
//! Values are plain data: constructing them never fails, and the
//! [`validate`](crate::validate) module reports which invariants a value
//! breaks. Codecs and operations only ever produce values that validate.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::Error;
use crate::time::{Period, TimeInstant};

/// A 2D or 3D coordinate tuple in CRS units.
#[derive(Clone, Copy, PartialEq)]
pub struct Position {
    coords: [f64; 3],
    dims: u8,
}

impl Position {
    pub const fn xy(x: f64, y: f64) -> Self {
        Position {
            coords: [x, y, 0.0],
            dims: 2,
        }
    }

    pub const fn xyz(x: f64, y: f64, z: f64) -> Self {
        Position {
            coords: [x, y, z],
            dims: 3,
        }
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self, Error> {
        match *coords {
            [x, y] => Ok(Position::xy(x, y)),
            [x, y, z] => Ok(Position::xyz(x, y, z)),
            _ => Err(Error::InvalidDimension(coords.len())),
        }
    }

    pub fn dims(&self) -> usize {
        self.dims as usize
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords[..self.dims as usize]
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|c| c.is_finite())
    }

    /// `self + fraction * (other - self)`, componentwise.
    pub fn lerp(&self, other: &Position, fraction: f64) -> Position {
        let mut out = *self;
        for i in 0..self.dims() {
            out.coords[i] = self.coords[i] + fraction * (other.coords[i] - self.coords[i]);
        }
        out
    }

    /// Euclidean distance over the shared axes.
    pub fn distance(&self, other: &Position) -> f64 {
        let n = self.dims().min(other.dims());
        let sum: f64 = (0..n)
            .map(|i| {
                let d = other.coords[i] - self.coords[i];
                d * d
            })
            .sum();
        libm::sqrt(sum)
    }

    pub(crate) fn set(&mut self, axis: usize, value: f64) {
        self.coords[axis] = value;
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut t = f.debug_tuple("");
        for c in self.as_slice() {
            t.field(c);
        }
        t.finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InterpolationMode {
    /// Defined only at the sampled instants.
    Discrete,
    /// The last sampled value holds until the next sample.
    Stepwise,
    /// Affine between consecutive samples.
    Linear,
}

impl InterpolationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            InterpolationMode::Discrete => "Discrete",
            InterpolationMode::Stepwise => "Stepwise",
            InterpolationMode::Linear => "Linear",
        }
    }
}

impl fmt::Display for InterpolationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownInterpolation(pub String);

impl fmt::Display for UnknownInterpolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown interpolation {:?}", self.0)
    }
}

impl core::error::Error for UnknownInterpolation {}

impl FromStr for InterpolationMode {
    type Err = UnknownInterpolation;

    /// Case-insensitive.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        [
            InterpolationMode::Discrete,
            InterpolationMode::Stepwise,
            InterpolationMode::Linear,
        ]
        .into_iter()
        .find(|m| m.as_str().eq_ignore_ascii_case(s))
        .ok_or_else(|| UnknownInterpolation(s.into()))
    }
}

/// Timestamped positions with no gap between them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Track {
    pub samples: Vec<(TimeInstant, Position)>,
}

impl Track {
    pub fn new(samples: Vec<(TimeInstant, Position)>) -> Self {
        Track { samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn start(&self) -> Option<TimeInstant> {
        self.samples.first().map(|s| s.0)
    }

    pub fn end(&self) -> Option<TimeInstant> {
        self.samples.last().map(|s| s.0)
    }

    pub fn period(&self) -> Option<Period> {
        Some(Period {
            begin: self.start()?,
            end: self.end()?,
        })
    }

    pub fn times(&self) -> impl Iterator<Item = TimeInstant> + '_ {
        self.samples.iter().map(|s| s.0)
    }
}

/// Gap-separated tracks sharing one interpolation mode.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalGeometry {
    pub tracks: Vec<Track>,
    pub interpolation: InterpolationMode,
}

impl TemporalGeometry {
    pub fn new(tracks: Vec<Track>, interpolation: InterpolationMode) -> Self {
        TemporalGeometry { tracks, interpolation }
    }

    pub fn single(samples: Vec<(TimeInstant, Position)>, interpolation: InterpolationMode) -> Self {
        TemporalGeometry::new(alloc::vec![Track::new(samples)], interpolation)
    }

    pub fn samples(&self) -> impl Iterator<Item = &(TimeInstant, Position)> + '_ {
        self.tracks.iter().flat_map(|t| t.samples.iter())
    }

    pub fn sample_count(&self) -> usize {
        self.tracks.iter().map(Track::len).sum()
    }

    /// Span from the first to the last sample, ignoring gaps.
    pub fn period(&self) -> Option<Period> {
        let begin = self.tracks.iter().find_map(Track::start)?;
        let end = self.tracks.iter().rev().find_map(Track::end)?;
        Some(Period { begin, end })
    }

    /// Dimensionality of the first sample.
    pub fn dims(&self) -> Option<usize> {
        self.samples().next().map(|s| s.1.dims())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValueType {
    Integer,
    Real,
    Text,
    Boolean,
}

impl ValueType {
    pub fn is_numeric(self) -> bool {
        matches!(self, ValueType::Integer | ValueType::Real)
    }
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValueType::Integer => "integer",
            ValueType::Real => "real",
            ValueType::Text => "text",
            ValueType::Boolean => "boolean",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Integer(i64),
    Real(f64),
    Text(String),
    Boolean(bool),
}

impl Value {
    pub fn value_type(&self) -> ValueType {
        match self {
            Value::Integer(_) => ValueType::Integer,
            Value::Real(_) => ValueType::Real,
            Value::Text(_) => ValueType::Text,
            Value::Boolean(_) => ValueType::Boolean,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Value::Integer(i) => Some(i as f64),
            Value::Real(r) => Some(r),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Integer(i) => write!(f, "{i}"),
            Value::Real(r) => write!(f, "{r}"),
            Value::Text(s) => f.write_str(s),
            Value::Boolean(b) => write!(f, "{b}"),
        }
    }
}

/// A named attribute with its own timeline.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalProperty {
    pub name: String,
    pub value_type: ValueType,
    pub samples: Vec<(TimeInstant, Value)>,
    pub interpolation: InterpolationMode,
}

impl TemporalProperty {
    pub fn new(
        name: impl Into<String>,
        value_type: ValueType,
        samples: Vec<(TimeInstant, Value)>,
        interpolation: InterpolationMode,
    ) -> Self {
        TemporalProperty {
            name: name.into(),
            value_type,
            samples,
            interpolation,
        }
    }

    pub fn times(&self) -> impl Iterator<Item = TimeInstant> + '_ {
        self.samples.iter().map(|s| s.0)
    }

    pub fn period(&self) -> Option<Period> {
        Some(Period {
            begin: self.samples.first()?.0,
            end: self.samples.last()?.0,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MovingFeature {
    pub id: String,
    pub geometry: TemporalGeometry,
    pub temporal_properties: Vec<TemporalProperty>,
    pub static_properties: BTreeMap<String, String>,
    /// Opaque CRS identifier, usually a URN. Never interpreted.
    pub crs: Option<String>,
}

impl MovingFeature {
    pub fn new(id: impl Into<String>, geometry: TemporalGeometry) -> Self {
        MovingFeature {
            id: id.into(),
            geometry,
            temporal_properties: Vec::new(),
            static_properties: BTreeMap::new(),
            crs: None,
        }
    }

    pub fn with_property(mut self, property: TemporalProperty) -> Self {
        self.temporal_properties.push(property);
        self
    }

    pub fn with_static(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.static_properties.insert(key.into(), value.into());
        self
    }

    pub fn property(&self, name: &str) -> Option<&TemporalProperty> {
        self.temporal_properties.iter().find(|p| p.name == name)
    }

    /// Compares everything that carries samples: id, modes, geometry
    /// samples and property timelines. Static properties and the CRS tag
    /// are not compared.
    pub fn sample_equal(&self, other: &MovingFeature) -> bool {
        self.id == other.id && self.geometry == other.geometry && self.temporal_properties == other.temporal_properties
    }
}

/// Combined spatial box and time period.
#[derive(Debug, Clone, PartialEq)]
pub struct STBounds {
    pub lower: Position,
    pub upper: Position,
    pub period: Period,
    /// Unit for offset times in segment encodings, e.g. `"sec"`.
    pub time_unit: String,
}

impl STBounds {
    pub fn contains_position(&self, p: &Position) -> bool {
        let n = self.lower.dims().min(p.dims());
        (0..n).all(|i| {
            let c = p.as_slice()[i];
            self.lower.as_slice()[i] <= c && c <= self.upper.as_slice()[i]
        })
    }

    pub fn contains_time(&self, t: TimeInstant) -> bool {
        self.period.contains(t)
    }

    pub fn contains_bounds(&self, other: &STBounds) -> bool {
        self.contains_position(&other.lower)
            && self.contains_position(&other.upper)
            && self.period.contains_period(&other.period)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureCollection {
    /// Declared bounds as read from a document, if any.
    pub bounds: Option<STBounds>,
    pub features: Vec<MovingFeature>,
}

impl FeatureCollection {
    pub fn new(features: Vec<MovingFeature>) -> Self {
        FeatureCollection { bounds: None, features }
    }

    pub fn feature(&self, id: &str) -> Option<&MovingFeature> {
        self.features.iter().find(|f| f.id == id)
    }

    /// Feature-wise [`MovingFeature::sample_equal`], in order.
    pub fn sample_equal(&self, other: &FeatureCollection) -> bool {
        self.features.len() == other.features.len()
            && self
                .features
                .iter()
                .zip(&other.features)
                .all(|(a, b)| a.sample_equal(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn position_arity() {
        assert_eq!(Position::from_slice(&[1.0]), Err(Error::InvalidDimension(1)));
        assert_eq!(Position::from_slice(&[1.0, 2.0]).unwrap().dims(), 2);
        assert_eq!(
            Position::from_slice(&[1.0, 2.0, 3.0]).unwrap().as_slice(),
            &[1.0, 2.0, 3.0]
        );
        assert!(Position::from_slice(&[0.0; 4]).is_err());
    }

    #[test]
    fn lerp_midpoint_is_exact_for_sample_vertices() {
        let p = Position::xy(10.0, 10.0).lerp(&Position::xy(10.4, 11.2), 0.5);
        assert_eq!(p, Position::xy(10.2, 10.6));
    }

    #[test]
    fn interpolation_names_parse_case_insensitively() {
        assert_eq!("linear".parse(), Ok(InterpolationMode::Linear));
        assert_eq!("STEPWISE".parse(), Ok(InterpolationMode::Stepwise));
        assert_eq!(" Discrete ".parse(), Ok(InterpolationMode::Discrete));
        assert!("Spline".parse::<InterpolationMode>().is_err());
        assert!("".parse::<InterpolationMode>().is_err());
    }
}
