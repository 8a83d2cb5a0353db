//! Invariant checks for features and collections.
//!
//! Validation never fails and never mutates; it returns diagnostics.
//! ERROR means a model invariant is broken, WARNING flags data that is
//! legal but suspicious.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::bounds::computed_bounds;
use crate::diag::Diagnostic;
use crate::model::{FeatureCollection, InterpolationMode, MovingFeature, Position, STBounds, TemporalProperty, Value};
use crate::time::TimeInstant;

pub mod codes {
    pub const EMPTY_ID: &str = "EMPTY_ID";
    pub const NO_SAMPLES: &str = "NO_SAMPLES";
    pub const EMPTY_TRACK: &str = "EMPTY_TRACK";
    pub const NON_INCREASING_TIMESTAMPS: &str = "NON_INCREASING_TIMESTAMPS";
    pub const LINEAR_TRACK_TOO_SHORT: &str = "LINEAR_TRACK_TOO_SHORT";
    pub const MIXED_DIMENSIONALITY: &str = "MIXED_DIMENSIONALITY";
    pub const NON_FINITE_COORDINATE: &str = "NON_FINITE_COORDINATE";
    pub const OVERLAPPING_TRACKS: &str = "OVERLAPPING_TRACKS";
    pub const DUPLICATE_PROPERTY_NAME: &str = "DUPLICATE_PROPERTY_NAME";
    pub const PROPERTY_TYPE_MISMATCH: &str = "PROPERTY_TYPE_MISMATCH";
    pub const LINEAR_NON_NUMERIC_PROPERTY: &str = "LINEAR_NON_NUMERIC_PROPERTY";
    pub const NON_FINITE_VALUE: &str = "NON_FINITE_VALUE";
    pub const EMPTY_PROPERTY: &str = "EMPTY_PROPERTY";
    pub const ZERO_DURATION: &str = "ZERO_DURATION";
    pub const DUPLICATE_FEATURE_ID: &str = "DUPLICATE_FEATURE_ID";
    pub const INVALID_BOUNDS: &str = "INVALID_BOUNDS";
    pub const BOUNDS_NOT_COVERING: &str = "BOUNDS_NOT_COVERING";
    pub const PERIOD_END_BEYOND_DATA: &str = "PERIOD_END_BEYOND_DATA";
    pub const PERIOD_BEGIN_BEFORE_DATA: &str = "PERIOD_BEGIN_BEFORE_DATA";
}

pub fn validate_feature(f: &MovingFeature) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if f.id.is_empty() {
        out.push(Diagnostic::error(codes::EMPTY_ID, "feature id is empty"));
    }
    let id = &f.id;
    let g = &f.geometry;

    if g.sample_count() == 0 {
        out.push(Diagnostic::error(
            codes::NO_SAMPLES,
            format!("feature {id}: geometry has no samples"),
        ));
    }

    let dims = g.dims();
    let mut mixed = false;
    let mut non_finite = false;
    for (k, track) in g.tracks.iter().enumerate() {
        if track.is_empty() {
            out.push(Diagnostic::error(
                codes::EMPTY_TRACK,
                format!("feature {id}: track {k} is empty"),
            ));
            continue;
        }
        if g.interpolation == InterpolationMode::Linear && track.len() < 2 {
            out.push(Diagnostic::error(
                codes::LINEAR_TRACK_TOO_SHORT,
                format!("feature {id}: linear track needs ≥2 samples (track {k} has 1)"),
            ));
        }
        if let Some(t) = first_non_increasing(track.times()) {
            out.push(Diagnostic::error(
                codes::NON_INCREASING_TIMESTAMPS,
                format!("feature {id}: non-increasing timestamps in track {k} at {t:?}"),
            ));
        }
        for (_, p) in &track.samples {
            mixed |= Some(p.dims()) != dims;
            non_finite |= !p.is_finite();
        }
    }
    if mixed {
        out.push(Diagnostic::error(
            codes::MIXED_DIMENSIONALITY,
            format!("feature {id}: positions mix 2D and 3D coordinates"),
        ));
    }
    if non_finite {
        out.push(Diagnostic::error(
            codes::NON_FINITE_COORDINATE,
            format!("feature {id}: non-finite coordinate"),
        ));
    }
    for (k, pair) in g.tracks.windows(2).enumerate() {
        if let (Some(end), Some(start)) = (pair[0].end(), pair[1].start()) {
            if end >= start {
                out.push(Diagnostic::error(
                    codes::OVERLAPPING_TRACKS,
                    format!("feature {id}: track {} does not start after track {k} ends", k + 1),
                ));
            }
        }
    }

    let mut names = BTreeSet::new();
    for p in &f.temporal_properties {
        if !names.insert(p.name.as_str()) {
            out.push(Diagnostic::error(
                codes::DUPLICATE_PROPERTY_NAME,
                format!("feature {id}: duplicate temporal property {:?}", p.name),
            ));
        }
        validate_property(id, p, &mut out);
    }

    if let Some(period) = g.period() {
        if g.sample_count() > 0 && period.duration_ms() == 0 && g.sample_count() == 1 {
            out.push(Diagnostic::warning(
                codes::ZERO_DURATION,
                format!("feature {id}: zero-duration feature"),
            ));
        }
    }
    out
}

fn validate_property(id: &str, p: &TemporalProperty, out: &mut Vec<Diagnostic>) {
    let name = &p.name;
    if p.samples.is_empty() {
        out.push(Diagnostic::warning(
            codes::EMPTY_PROPERTY,
            format!("feature {id}: property {name:?} has no samples"),
        ));
    }
    if let Some(t) = first_non_increasing(p.times()) {
        out.push(Diagnostic::error(
            codes::NON_INCREASING_TIMESTAMPS,
            format!("feature {id}: non-increasing timestamps in property {name:?} at {t:?}"),
        ));
    }
    if p.interpolation == InterpolationMode::Linear && !p.value_type.is_numeric() {
        out.push(Diagnostic::error(
            codes::LINEAR_NON_NUMERIC_PROPERTY,
            format!(
                "feature {id}: property {name:?} of type {} cannot use Linear interpolation",
                p.value_type
            ),
        ));
    }
    if let Some((t, v)) = p.samples.iter().find(|(_, v)| v.value_type() != p.value_type) {
        out.push(Diagnostic::error(
            codes::PROPERTY_TYPE_MISMATCH,
            format!(
                "feature {id}: property {name:?} declared {} holds {} at {t:?}",
                p.value_type,
                v.value_type()
            ),
        ));
    }
    if p.samples
        .iter()
        .any(|(_, v)| matches!(v, Value::Real(r) if !r.is_finite()))
    {
        out.push(Diagnostic::error(
            codes::NON_FINITE_VALUE,
            format!("feature {id}: property {name:?} holds a non-finite value"),
        ));
    }
}

fn first_non_increasing(mut times: impl Iterator<Item = TimeInstant>) -> Option<TimeInstant> {
    let mut prev = times.next()?;
    for t in times {
        if t <= prev {
            return Some(t);
        }
        prev = t;
    }
    None
}

pub fn validate_collection(c: &FeatureCollection) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut ids = BTreeSet::new();
    for f in &c.features {
        out.extend(validate_feature(f));
        if !ids.insert(f.id.as_str()) {
            out.push(Diagnostic::error(
                codes::DUPLICATE_FEATURE_ID,
                format!("duplicate feature id {:?}", f.id),
            ));
        }
    }
    if let Some(bounds) = &c.bounds {
        check_declared_bounds(bounds, c, &mut out);
    }
    out
}

fn check_declared_bounds(bounds: &STBounds, c: &FeatureCollection, out: &mut Vec<Diagnostic>) {
    let axes_ok = bounds.lower.dims() == bounds.upper.dims()
        && bounds
            .lower
            .as_slice()
            .iter()
            .zip(bounds.upper.as_slice())
            .all(|(l, u)| l <= u);
    if !axes_ok || bounds.period.begin > bounds.period.end {
        out.push(Diagnostic::error(
            codes::INVALID_BOUNDS,
            "declared bounds have lower corner above upper corner or begin after end",
        ));
        return;
    }

    for f in &c.features {
        let outside_space = f.geometry.samples().find(|(_, p)| !bounds.contains_position(p));
        if let Some((_, p)) = outside_space {
            out.push(Diagnostic::warning(
                codes::BOUNDS_NOT_COVERING,
                format!(
                    "bounds do not cover data: feature {} position {} lies outside {}–{}",
                    f.id,
                    coords(p),
                    coords(&bounds.lower),
                    coords(&bounds.upper)
                ),
            ));
        }
        let outside_time = f
            .geometry
            .samples()
            .map(|s| s.0)
            .chain(f.temporal_properties.iter().flat_map(|p| p.times()))
            .find(|t| !bounds.contains_time(*t));
        if let Some(t) = outside_time {
            out.push(Diagnostic::warning(
                codes::BOUNDS_NOT_COVERING,
                format!(
                    "bounds do not cover data: feature {} has a sample at {t:?} outside the declared period",
                    f.id
                ),
            ));
        }
    }

    if let Ok(data) = computed_bounds(c) {
        if bounds.period.end > data.period.end {
            out.push(Diagnostic::warning(
                codes::PERIOD_END_BEYOND_DATA,
                format!(
                    "declared period end beyond data by {} ms",
                    bounds.period.end.millis() - data.period.end.millis()
                ),
            ));
        }
        if bounds.period.begin < data.period.begin {
            out.push(Diagnostic::warning(
                codes::PERIOD_BEGIN_BEFORE_DATA,
                format!(
                    "declared period begin before data by {} ms",
                    data.period.begin.millis() - bounds.period.begin.millis()
                ),
            ));
        }
    }
}

fn coords(p: &Position) -> alloc::string::String {
    let parts: Vec<_> = p.as_slice().iter().map(|c| format!("{c}")).collect();
    format!("({})", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{TemporalGeometry, Track, ValueType};
    use alloc::vec;

    fn t(s: i64) -> TimeInstant {
        TimeInstant::from_secs(s)
    }

    fn vehicle_a() -> MovingFeature {
        MovingFeature::new(
            "A",
            TemporalGeometry::single(
                vec![(t(0), Position::xy(10.0, 10.0)), (t(5), Position::xy(10.2, 10.6))],
                InterpolationMode::Linear,
            ),
        )
        .with_property(TemporalProperty::new(
            "gear",
            ValueType::Integer,
            vec![(t(0), Value::Integer(1)), (t(5), Value::Integer(1))],
            InterpolationMode::Stepwise,
        ))
    }

    fn codes_of(d: &[Diagnostic]) -> Vec<&'static str> {
        d.iter().map(|d| d.code).collect()
    }

    #[test]
    fn clean_feature_has_no_diagnostics() {
        assert!(validate_feature(&vehicle_a()).is_empty());
    }

    #[test]
    fn identical_timestamps_are_an_error() {
        let mut f = vehicle_a();
        f.geometry.tracks[0].samples[1].0 = t(0);
        let d = validate_feature(&f);
        assert_eq!(codes_of(&d), vec![codes::NON_INCREASING_TIMESTAMPS]);
        assert!(d[0].message.contains("non-increasing timestamps"));
    }

    #[test]
    fn single_sample_linear_track_is_an_error() {
        let mut f = vehicle_a();
        f.geometry.tracks[0].samples.truncate(1);
        let d = validate_feature(&f);
        assert!(d
            .iter()
            .any(|d| d.is_error() && d.message.contains("linear track needs ≥2 samples")));
    }

    #[test]
    fn single_sample_stepwise_track_only_warns() {
        let mut f = vehicle_a();
        f.geometry.tracks[0].samples.truncate(1);
        f.geometry.interpolation = InterpolationMode::Stepwise;
        let d = validate_feature(&f);
        assert_eq!(codes_of(&d), vec![codes::ZERO_DURATION]);
    }

    #[test]
    fn overlapping_tracks_and_mixed_dims() {
        let mut f = vehicle_a();
        f.geometry.tracks.push(Track::new(vec![
            (t(5), Position::xyz(1.0, 1.0, 1.0)),
            (t(6), Position::xyz(1.0, 1.0, 1.0)),
        ]));
        let d = codes_of(&validate_feature(&f));
        assert!(d.contains(&codes::OVERLAPPING_TRACKS));
        assert!(d.contains(&codes::MIXED_DIMENSIONALITY));
    }

    #[test]
    fn property_checks() {
        let mut f = vehicle_a();
        f.temporal_properties.push(TemporalProperty::new(
            "gear",
            ValueType::Text,
            vec![(t(0), Value::Integer(3))],
            InterpolationMode::Linear,
        ));
        let d = codes_of(&validate_feature(&f));
        assert!(d.contains(&codes::DUPLICATE_PROPERTY_NAME));
        assert!(d.contains(&codes::LINEAR_NON_NUMERIC_PROPERTY));
        assert!(d.contains(&codes::PROPERTY_TYPE_MISMATCH));
    }

    #[test]
    fn empty_geometry_is_an_error() {
        let f = MovingFeature::new("A", TemporalGeometry::new(vec![], InterpolationMode::Linear));
        assert_eq!(codes_of(&validate_feature(&f)), vec![codes::NO_SAMPLES]);
    }

    #[test]
    fn empty_collection_is_clean() {
        assert!(validate_collection(&FeatureCollection::default()).is_empty());
    }

    #[test]
    fn duplicate_ids() {
        let c = FeatureCollection::new(vec![vehicle_a(), vehicle_a()]);
        let d = validate_collection(&c);
        assert_eq!(codes_of(&d), vec![codes::DUPLICATE_FEATURE_ID]);
        assert!(d[0].message.contains("duplicate feature id"));
    }
}
