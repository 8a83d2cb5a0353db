//! Shared machinery of the two segment-based encodings (CSV and XML).
//!
//! Reading: segments of each feature are sorted, intermediate vertices get
//! constant-speed timestamps, and contiguous segments whose junction
//! positions agree are chained into one track. Every attribute becomes a
//! property sampled at every vertex; the vertex that ends a track repeats
//! the last segment's value.
//!
//! Writing: each feature is cut at its union timeline so that every
//! attribute change falls on a segment boundary, giving one two-point
//! segment per consecutive pair of timeline instants.

use std::collections::BTreeMap;

use mf_core::bounds::computed_bounds;
use mf_core::interpolate::SampleResult;
use mf_core::resample::{positions_on, track_timelines, values_on};
use mf_core::{
    FeatureCollection, InterpolationMode, MovingFeature, Period, Position, STBounds, TemporalGeometry,
    TemporalProperty, TimeInstant, Track, Value, ValueType,
};

use crate::error::{CodecError, Result};
use crate::timefmt::{format_iso, format_offset, TimeUnit};

/// Attribute column declaration.
#[derive(Debug, Clone, PartialEq)]
pub struct AttrDef {
    pub name: String,
    pub ty: ValueType,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub feature: String,
    pub start: TimeInstant,
    pub end: TimeInstant,
    pub points: Vec<Position>,
    /// One entry per attribute: a single value held over the segment, or
    /// one value per point.
    pub attrs: Vec<Vec<Value>>,
    /// Location in the source document, for error messages.
    pub at: String,
}

pub fn xsd_type(name: &str) -> Option<ValueType> {
    let local = name.trim().rsplit(':').next().unwrap_or_default();
    Some(match local {
        "integer" | "int" | "long" | "short" | "byte" | "nonNegativeInteger" | "positiveInteger" => ValueType::Integer,
        "double" | "float" | "decimal" => ValueType::Real,
        "string" | "normalizedString" | "token" => ValueType::Text,
        "boolean" => ValueType::Boolean,
        _ => return None,
    })
}

pub fn xsd_name(ty: ValueType) -> &'static str {
    match ty {
        ValueType::Integer => "xsd:integer",
        ValueType::Real => "xsd:double",
        ValueType::Text => "xsd:string",
        ValueType::Boolean => "xsd:boolean",
    }
}

pub fn parse_value(text: &str, ty: ValueType, at: &str) -> Result<Value> {
    let s = text.trim();
    let bad = || CodecError::BadValue {
        at: at.to_string(),
        value: s.to_string(),
        ty: ty.to_string(),
    };
    Ok(match ty {
        ValueType::Integer => Value::Integer(s.parse().map_err(|_| bad())?),
        ValueType::Real => {
            let r: f64 = s.parse().map_err(|_| bad())?;
            if !r.is_finite() {
                return Err(bad());
            }
            Value::Real(r)
        }
        ValueType::Boolean => match s {
            "true" | "1" => Value::Boolean(true),
            "false" | "0" => Value::Boolean(false),
            _ => return Err(bad()),
        },
        ValueType::Text => Value::Text(s.to_string()),
    })
}

/// Shortest round-trip decimal that always shows a fractional part for
/// whole numbers ("10.0").
pub fn format_real(x: f64) -> String {
    format!("{x:?}")
}

pub fn format_value(v: &Value) -> String {
    match v {
        Value::Real(r) => format_real(*r),
        other => other.to_string(),
    }
}

pub fn parse_pos_list(text: &str, dims: usize, at: &str) -> Result<Vec<Position>> {
    let values = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CodecError::BadPosList {
                    at: at.to_string(),
                    reason: format!("{s:?} is not a finite number"),
                })
        })
        .collect::<Result<Vec<f64>>>()?;
    if dims == 0 || values.len() % dims != 0 || values.len() < 2 * dims {
        return Err(CodecError::BadCoordinateArity {
            at: at.to_string(),
            count: values.len(),
            dims,
        });
    }
    Ok(values
        .chunks(dims)
        .map(|c| Position::from_slice(c).expect("dims is 2 or 3"))
        .collect())
}

pub fn format_pos_list<'a>(points: impl IntoIterator<Item = &'a Position>) -> String {
    points
        .into_iter()
        .flat_map(|p| p.as_slice().iter().map(|c| format_real(*c)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Timestamps of the vertices of a segment, spaced by arc length
/// (constant speed), or evenly when the segment does not move.
fn vertex_times(seg: &Segment) -> Result<Vec<TimeInstant>> {
    let n = seg.points.len();
    let span = (seg.end.millis() - seg.start.millis()) as f64;
    let mut cumulative = Vec::with_capacity(n);
    let mut total = 0.0;
    for (i, p) in seg.points.iter().enumerate() {
        if i > 0 {
            total += seg.points[i - 1].distance(p);
        }
        cumulative.push(total);
    }
    let times: Vec<TimeInstant> = (0..n)
        .map(|i| {
            if i == 0 {
                seg.start
            } else if i + 1 == n {
                seg.end
            } else {
                let f = if total > 0.0 {
                    cumulative[i] / total
                } else {
                    i as f64 / (n - 1) as f64
                };
                seg.start.add_millis((f * span).round() as i64)
            }
        })
        .collect();
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CodecError::NonChronologicalSegment { at: seg.at.clone() });
    }
    Ok(times)
}

/// Chains segments into features. `order` fixes feature order; features
/// in `order` without segments get an empty geometry.
pub fn assemble(
    order: &[String],
    segments: Vec<Segment>,
    defs: &[AttrDef],
    attr_mode: InterpolationMode,
) -> Result<Vec<MovingFeature>> {
    let mut by_feature: BTreeMap<&str, Vec<Segment>> = BTreeMap::new();
    for seg in segments {
        if seg.end <= seg.start {
            return Err(CodecError::NonChronologicalSegment { at: seg.at });
        }
        let key = order
            .iter()
            .find(|id| **id == seg.feature)
            .map(String::as_str)
            .expect("segment feature listed in order");
        by_feature.entry(key).or_default().push(seg);
    }

    order
        .iter()
        .map(|id| {
            let mut segs = by_feature.remove(id.as_str()).unwrap_or_default();
            segs.sort_by_key(|s| s.start);
            chain(id, &segs, defs, attr_mode)
        })
        .collect()
}

fn chain(id: &str, segs: &[Segment], defs: &[AttrDef], attr_mode: InterpolationMode) -> Result<MovingFeature> {
    let mut tracks: Vec<Track> = Vec::new();
    let mut props: Vec<Vec<(TimeInstant, Value)>> = vec![Vec::new(); defs.len()];
    let mut open = false;
    let mut last_attrs: Vec<Value> = Vec::new();

    for (k, seg) in segs.iter().enumerate() {
        let times = vertex_times(seg)?;
        let contiguous = open && tracks.last().and_then(Track::end) == Some(seg.start);
        if k > 0 && !contiguous {
            let prev_end = segs[k - 1].end;
            if seg.start < prev_end {
                return Err(CodecError::OverlappingSegments {
                    at: seg.at.clone(),
                    feature: id.to_string(),
                });
            }
            close_track(&tracks, &mut props, &last_attrs);
        }
        if let Some(bad) = seg.attrs.iter().find(|v| v.len() != 1 && v.len() != seg.points.len()) {
            return Err(CodecError::Structure {
                at: seg.at.clone(),
                reason: format!("{} attribute values for {} points", bad.len(), seg.points.len()),
            });
        }
        if contiguous {
            let track = tracks.last_mut().expect("open track");
            if track.samples.last().map(|s| s.1) != Some(seg.points[0]) {
                return Err(CodecError::DiscontinuousJunction {
                    at: seg.at.clone(),
                    feature: id.to_string(),
                });
            }
            track
                .samples
                .extend(times.iter().copied().zip(seg.points.iter().copied()).skip(1));
        } else {
            tracks.push(Track::new(
                times.iter().copied().zip(seg.points.iter().copied()).collect(),
            ));
        }
        for (series, values) in props.iter_mut().zip(&seg.attrs) {
            for (j, &t) in times[..times.len() - 1].iter().enumerate() {
                series.push((t, values[j.min(values.len() - 1)].clone()));
            }
        }
        last_attrs = seg.attrs.iter().map(|v| v[v.len() - 1].clone()).collect();
        open = true;
    }
    if open {
        close_track(&tracks, &mut props, &last_attrs);
    }

    let mut feature = MovingFeature::new(id, TemporalGeometry::new(tracks, InterpolationMode::Linear));
    feature.temporal_properties = defs
        .iter()
        .zip(props)
        .map(|(def, samples)| TemporalProperty::new(def.name.clone(), def.ty, samples, attr_mode))
        .collect();
    Ok(feature)
}

/// Repeats the last segment's values at the end of the current track.
fn close_track(tracks: &[Track], props: &mut [Vec<(TimeInstant, Value)>], last_attrs: &[Value]) {
    if let Some(end) = tracks.last().and_then(Track::end) {
        for (series, value) in props.iter_mut().zip(last_attrs) {
            series.push((end, value.clone()));
        }
    }
}

/// Attribute schema shared by all features: the first feature's property
/// list, which every other feature must match by name and type.
pub fn attr_schema(features: &[MovingFeature]) -> Result<Vec<AttrDef>> {
    let Some(first) = features.first() else {
        return Ok(Vec::new());
    };
    let defs: Vec<AttrDef> = first
        .temporal_properties
        .iter()
        .map(|p| AttrDef {
            name: p.name.clone(),
            ty: p.value_type,
        })
        .collect();
    for f in &features[1..] {
        let same = f.temporal_properties.len() == defs.len()
            && defs
                .iter()
                .all(|d| f.property(&d.name).is_some_and(|p| p.value_type == d.ty));
        if !same {
            return Err(CodecError::InconsistentAttributes {
                at: format!("feature {}", f.id),
                reason: format!("expected the attributes of feature {}", first.id),
            });
        }
    }
    Ok(defs)
}

pub fn common_dims(features: &[MovingFeature]) -> Result<usize> {
    let mut dims = None;
    for p in features.iter().flat_map(|f| f.geometry.samples()) {
        match dims {
            None => dims = Some(p.1.dims()),
            Some(d) if d != p.1.dims() => return Err(CodecError::MixedDimensionality),
            _ => {}
        }
    }
    Ok(dims.unwrap_or(2))
}

/// Cuts a linear feature into two-point segments along its union timeline.
/// Attribute values are taken at each segment start; linear attributes
/// also carry the value at the segment end.
pub fn feature_segments(f: &MovingFeature, defs: &[AttrDef]) -> Result<Vec<Segment>> {
    let at = format!("feature {}", f.id);
    if f.geometry.interpolation != InterpolationMode::Linear {
        return Err(CodecError::UnsupportedInterpolation {
            at,
            mode: f.geometry.interpolation,
        });
    }
    let props: Vec<&TemporalProperty> = defs
        .iter()
        .map(|d| f.property(&d.name).expect("schema checked"))
        .collect();
    let owned: Vec<TemporalProperty> = props.iter().map(|p| (*p).clone()).collect();
    let mut out = Vec::new();
    for (track, times) in f.geometry.tracks.iter().zip(track_timelines(&f.geometry, &owned)) {
        if track.len() < 2 {
            return Err(CodecError::TrackTooShort { at });
        }
        let positions = positions_on(&f.geometry, &times).expect("timeline lies within its track");
        let values: Vec<Vec<SampleResult<Value>>> = props.iter().map(|p| values_on(p, &times)).collect();
        for i in 0..positions.len() - 1 {
            let attrs = props
                .iter()
                .zip(&values)
                .map(|(p, vals)| {
                    let ends: &[usize] = if p.interpolation == InterpolationMode::Linear {
                        &[i, i + 1]
                    } else {
                        &[i]
                    };
                    ends.iter()
                        .map(|&j| {
                            vals[j].clone().value().ok_or_else(|| CodecError::UndefinedAttribute {
                                at: at.clone(),
                                name: p.name.clone(),
                                time: format_iso(times[j]),
                            })
                        })
                        .collect::<Result<Vec<Value>>>()
                })
                .collect::<Result<Vec<Vec<Value>>>>()?;
            out.push(Segment {
                feature: f.id.clone(),
                start: positions[i].0,
                end: positions[i + 1].0,
                points: vec![positions[i].1, positions[i + 1].1],
                attrs,
                at: at.clone(),
            });
        }
    }
    Ok(out)
}

/// Bounds and offset unit for a written document: the declared bounds if
/// any, else the computed ones, else a zero placeholder. The declared unit
/// is kept when every segment boundary is an exact decimal in it.
pub fn frame<'a>(
    c: &FeatureCollection,
    dims: usize,
    segments: impl IntoIterator<Item = &'a Segment> + Clone,
) -> (STBounds, TimeUnit) {
    let bounds = match (&c.bounds, computed_bounds(c)) {
        (Some(b), _) => b.clone(),
        (None, Ok(b)) => b,
        (None, Err(_)) => {
            let zero = Position::from_slice(&[0.0; 3][..dims]).expect("2 or 3");
            STBounds {
                lower: zero,
                upper: zero,
                period: Period::instant(TimeInstant::from_millis(0)),
                time_unit: "sec".into(),
            }
        }
    };
    let origin = bounds.period.begin.millis();
    let declared = TimeUnit::parse(&bounds.time_unit).unwrap_or_else(TimeUnit::seconds);
    let exact = segments.into_iter().all(|s| {
        [s.start, s.end]
            .iter()
            .all(|t| format_offset(t.millis() - origin, &declared).is_some())
    });
    (bounds, if exact { declared } else { TimeUnit::seconds() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(start: i64, end: i64, pts: &[(f64, f64)], gear: i64) -> Segment {
        Segment {
            feature: "A".into(),
            start: TimeInstant::from_secs(start),
            end: TimeInstant::from_secs(end),
            points: pts.iter().map(|&(x, y)| Position::xy(x, y)).collect(),
            attrs: vec![vec![Value::Integer(gear)]],
            at: format!("segment {start}"),
        }
    }

    fn gear_def() -> Vec<AttrDef> {
        vec![AttrDef {
            name: "gear".into(),
            ty: ValueType::Integer,
        }]
    }

    fn build(segs: Vec<Segment>) -> Result<MovingFeature> {
        assemble(&["A".to_string()], segs, &gear_def(), InterpolationMode::Stepwise).map(|mut v| v.remove(0))
    }

    #[test]
    fn multi_point_segment_uses_constant_speed() {
        let f = build(vec![seg(0, 30, &[(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)], 1)]).unwrap();
        let times: Vec<_> = f.geometry.tracks[0].times().map(|t| t.millis()).collect();
        assert_eq!(times, vec![0, 10_000, 30_000]);
        assert_eq!(f.temporal_properties[0].samples.len(), 3);
    }

    #[test]
    fn segments_are_sorted_before_chaining() {
        let f = build(vec![
            seg(5, 10, &[(1.0, 1.0), (2.0, 2.0)], 2),
            seg(0, 5, &[(0.0, 0.0), (1.0, 1.0)], 1),
        ])
        .unwrap();
        assert_eq!(f.geometry.tracks.len(), 1);
        assert_eq!(f.geometry.sample_count(), 3);
        let gear: Vec<_> = f.temporal_properties[0].samples.iter().map(|s| s.1.clone()).collect();
        assert_eq!(gear, vec![Value::Integer(1), Value::Integer(2), Value::Integer(2)]);
    }

    #[test]
    fn junction_mismatch_and_overlap_are_errors() {
        let err = build(vec![
            seg(0, 5, &[(0.0, 0.0), (1.0, 1.0)], 1),
            seg(5, 10, &[(1.5, 1.0), (2.0, 2.0)], 1),
        ]);
        assert!(matches!(err, Err(CodecError::DiscontinuousJunction { .. })));
        let err = build(vec![
            seg(0, 5, &[(0.0, 0.0), (1.0, 1.0)], 1),
            seg(4, 10, &[(1.0, 1.0), (2.0, 2.0)], 1),
        ]);
        assert!(matches!(err, Err(CodecError::OverlappingSegments { .. })));
        let err = build(vec![seg(5, 5, &[(0.0, 0.0), (1.0, 1.0)], 1)]);
        assert!(matches!(err, Err(CodecError::NonChronologicalSegment { .. })));
    }

    #[test]
    fn pos_list_arity() {
        assert!(matches!(
            parse_pos_list("10.0 10.0 10.2", 2, "line 1"),
            Err(CodecError::BadCoordinateArity { count: 3, dims: 2, .. })
        ));
        assert!(matches!(
            parse_pos_list("10.0 10.0", 2, "line 1"),
            Err(CodecError::BadCoordinateArity { .. })
        ));
        assert_eq!(
            parse_pos_list("10.6, 12.2 1 2", 2, "x").unwrap()[0],
            Position::xy(10.6, 12.2)
        );
    }

    #[test]
    fn real_formatting_keeps_a_decimal_point() {
        assert_eq!(format_real(10.0), "10.0");
        assert_eq!(format_real(10.2), "10.2");
        assert_eq!(format_pos_list(&[Position::xy(2.0, 2.1)]), "2.0 2.1");
    }
}
