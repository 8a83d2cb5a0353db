//! MF-JSON: one object per feature with parallel `coordinates` and
//! `datetimes` arrays for the geometry and `values`/`datetimes` arrays for
//! each temporal property.
//!
//! A document is a single `MovingFeature` object, an array of them, or a
//! `MovingFeatureCollection` with a `features` array. Trailing commas are
//! tolerated. Interpolation is read from `interpolations` (or
//! `interpolation`) and defaults to linear, except for non-numeric
//! properties which default to stepwise.

use std::collections::BTreeMap;

use mf_core::bounds::feature_bounds;
use mf_core::validate::{codes as vcodes, validate_collection};
use mf_core::{
    Diagnostic, FeatureCollection, InterpolationMode, MovingFeature, Period, Position, STBounds, TemporalGeometry,
    TemporalProperty, TimeInstant, Track, Value, ValueType,
};
use serde_json::{json, Map, Number, Value as Json};

use crate::error::{CodecError, Result};
use crate::timefmt::{format_iso, parse_iso};
use crate::Parsed;

pub mod codes {
    pub const MISSING_ID: &str = "MISSING_ID";
}

/// Removes commas that directly precede `]` or `}` outside strings.
fn strip_trailing_commas(doc: &str) -> String {
    let mut out = String::with_capacity(doc.len());
    let mut in_string = false;
    let mut escaped = false;
    let mut pending_comma: Option<usize> = None;
    for c in doc.chars() {
        if in_string {
            out.push(c);
            match (escaped, c) {
                (true, _) => escaped = false,
                (false, '\\') => escaped = true,
                (false, '"') => in_string = false,
                _ => {}
            }
            continue;
        }
        match c {
            ']' | '}' => {
                if let Some(i) = pending_comma.take() {
                    out.remove(i);
                }
            }
            ',' => {
                pending_comma = Some(out.len());
                out.push(c);
                continue;
            }
            c if c.is_whitespace() => {
                out.push(c);
                continue;
            }
            '"' => in_string = true,
            _ => {}
        }
        pending_comma = None;
        out.push(c);
    }
    out
}

fn structure(at: &str, reason: impl Into<String>) -> CodecError {
    CodecError::Structure {
        at: at.to_string(),
        reason: reason.into(),
    }
}

fn array<'a>(v: &'a Json, at: &str, key: &str) -> Result<&'a Vec<Json>> {
    v.as_array()
        .ok_or_else(|| structure(at, format!("\"{key}\" must be an array")))
}

fn positional_id(index: usize) -> String {
    let mut n = index;
    let mut id = String::new();
    loop {
        id.insert(0, char::from(b'A' + (n % 26) as u8));
        if n < 26 {
            break;
        }
        n = n / 26 - 1;
    }
    id
}

fn parse_mode(v: Option<&Json>, at: &str, default: InterpolationMode) -> Result<InterpolationMode> {
    match v {
        None | Some(Json::Null) => Ok(default),
        Some(Json::String(s)) => s.parse().map_err(|_| CodecError::UnknownInterpolation {
            at: at.to_string(),
            value: s.clone(),
        }),
        Some(other) => Err(CodecError::UnknownInterpolation {
            at: at.to_string(),
            value: other.to_string(),
        }),
    }
}

fn interpolation_key(obj: &Map<String, Json>) -> Option<&Json> {
    obj.get("interpolations").or_else(|| obj.get("interpolation"))
}

fn parse_datetimes(v: Option<&Json>, at: &str) -> Result<Vec<TimeInstant>> {
    let Some(v) = v else {
        return Err(structure(at, "missing \"datetimes\""));
    };
    let times = array(v, at, "datetimes")?
        .iter()
        .map(|t| {
            match t {
                Json::String(s) => parse_iso(s),
                Json::Number(n) => n.as_i64().map(TimeInstant::from_millis),
                _ => None,
            }
            .ok_or_else(|| CodecError::BadTime {
                at: at.to_string(),
                value: t.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CodecError::NonIncreasingDatetimes { at: at.to_string() });
    }
    Ok(times)
}

fn check_parallel(at: &str, first: &'static str, first_len: usize, second_len: usize) -> Result<()> {
    if first_len != second_len {
        return Err(CodecError::ParallelArrayLengthMismatch {
            at: at.to_string(),
            first,
            first_len,
            second: "datetimes",
            second_len,
        });
    }
    Ok(())
}

fn parse_geometry(v: &Json, at: &str) -> Result<TemporalGeometry> {
    let obj = v
        .as_object()
        .ok_or_else(|| structure(at, "\"temporalGeometry\" must be an object"))?;
    let ty = obj.get("type").and_then(Json::as_str).unwrap_or_default();
    if ty != "MovingPoint" {
        return Err(CodecError::UnsupportedGeometryType {
            at: at.to_string(),
            ty: ty.to_string(),
        });
    }
    let coords = array(
        obj.get("coordinates")
            .ok_or_else(|| structure(at, "missing \"coordinates\""))?,
        at,
        "coordinates",
    )?;
    let times = parse_datetimes(obj.get("datetimes"), at)?;
    check_parallel(at, "coordinates", coords.len(), times.len())?;
    let mode = parse_mode(interpolation_key(obj), at, InterpolationMode::Linear)?;
    let positions = coords
        .iter()
        .map(|c| {
            let xs: Option<Vec<f64>> = c
                .as_array()
                .and_then(|a| a.iter().map(Json::as_f64).collect::<Option<Vec<_>>>());
            xs.and_then(|xs| Position::from_slice(&xs).ok())
                .ok_or_else(|| structure(at, format!("coordinate {c} is not a 2D or 3D number array")))
        })
        .collect::<Result<Vec<_>>>()?;
    let tracks = if positions.is_empty() {
        Vec::new()
    } else {
        vec![Track::new(times.into_iter().zip(positions).collect())]
    };
    Ok(TemporalGeometry::new(tracks, mode))
}

fn infer_type(values: &[Json], at: &str) -> Result<ValueType> {
    let mut ty: Option<ValueType> = None;
    for v in values {
        let this = match v {
            Json::Number(n) if n.is_i64() => ValueType::Integer,
            Json::Number(_) => ValueType::Real,
            Json::String(_) => ValueType::Text,
            Json::Bool(_) => ValueType::Boolean,
            other => return Err(structure(at, format!("unsupported property value {other}"))),
        };
        ty = Some(match (ty, this) {
            (None, t) => t,
            (Some(a), b) if a == b => a,
            (Some(ValueType::Integer), ValueType::Real) | (Some(ValueType::Real), ValueType::Integer) => {
                ValueType::Real
            }
            (Some(a), b) => return Err(structure(at, format!("values mix {a} and {b}"))),
        });
    }
    Ok(ty.unwrap_or(ValueType::Real))
}

fn to_value(v: &Json, ty: ValueType) -> Value {
    match (ty, v) {
        (ValueType::Integer, Json::Number(n)) => Value::Integer(n.as_i64().expect("inferred integer")),
        (ValueType::Real, Json::Number(n)) => Value::Real(n.as_f64().expect("finite JSON number")),
        (ValueType::Boolean, Json::Bool(b)) => Value::Boolean(*b),
        (_, Json::String(s)) => Value::Text(s.clone()),
        _ => unreachable!("type inferred from the same values"),
    }
}

fn parse_property(v: &Json, at: &str) -> Result<TemporalProperty> {
    let obj = v
        .as_object()
        .ok_or_else(|| structure(at, "temporal property must be an object"))?;
    let name = obj
        .get("name")
        .and_then(Json::as_str)
        .ok_or_else(|| structure(at, "temporal property without \"name\""))?;
    let at = format!("{at} property {name}");
    let values = array(
        obj.get("values").ok_or_else(|| structure(&at, "missing \"values\""))?,
        &at,
        "values",
    )?;
    let times = parse_datetimes(obj.get("datetimes"), &at)?;
    check_parallel(&at, "values", values.len(), times.len())?;
    let ty = infer_type(values, &at)?;
    let default = if ty.is_numeric() {
        InterpolationMode::Linear
    } else {
        InterpolationMode::Stepwise
    };
    let mode = parse_mode(interpolation_key(obj), &at, default)?;
    let samples = times.into_iter().zip(values.iter().map(|v| to_value(v, ty))).collect();
    Ok(TemporalProperty::new(name, ty, samples, mode))
}

fn parse_bounds(v: &Json, at: &str) -> Result<STBounds> {
    let bad = |reason: &str| structure(at, format!("\"stBoundedBy\": {reason}"));
    let bbox: Vec<f64> = v
        .get("bbox")
        .and_then(Json::as_array)
        .and_then(|a| a.iter().map(Json::as_f64).collect())
        .ok_or_else(|| bad("\"bbox\" must be a number array"))?;
    if bbox.len() != 4 && bbox.len() != 6 {
        return Err(bad("\"bbox\" needs 4 or 6 numbers"));
    }
    let (lower, upper) = bbox.split_at(bbox.len() / 2);
    let time = |key: &str| {
        v.get("period")
            .and_then(|p| p.get(key))
            .and_then(Json::as_str)
            .and_then(parse_iso)
            .ok_or_else(|| bad(&format!("missing or bad period {key}")))
    };
    Ok(STBounds {
        lower: Position::from_slice(lower).expect("2 or 3"),
        upper: Position::from_slice(upper).expect("2 or 3"),
        period: Period::new(time("begin")?, time("end")?).map_err(|_| bad("period begins after it ends"))?,
        time_unit: "sec".into(),
    })
}

fn parse_crs(v: &Json) -> Option<String> {
    match v {
        Json::String(s) => Some(s.clone()),
        other => other
            .pointer("/properties/name")
            .and_then(Json::as_str)
            .map(str::to_string),
    }
}

struct Decoded {
    feature: MovingFeature,
    bounds: Option<STBounds>,
}

fn parse_feature(v: &Json, index: usize, diagnostics: &mut Vec<Diagnostic>) -> Result<Decoded> {
    let obj = v
        .as_object()
        .ok_or_else(|| structure(&format!("feature {index}"), "expected an object"))?;
    if let Some(ty) = obj.get("type").and_then(Json::as_str) {
        if ty != "MovingFeature" && ty != "Feature" {
            return Err(structure(
                &format!("feature {index}"),
                format!("type {ty:?} is not MovingFeature"),
            ));
        }
    }
    let id = match obj.get("id") {
        Some(Json::String(s)) => s.clone(),
        Some(Json::Number(n)) => n.to_string(),
        _ => {
            let id = positional_id(index);
            diagnostics.push(Diagnostic::info(
                codes::MISSING_ID,
                format!("feature {index} has no \"id\"; named {id:?}"),
            ));
            id
        }
    };
    let at = format!("feature {id}");
    let geometry = parse_geometry(
        obj.get("temporalGeometry")
            .ok_or_else(|| structure(&at, "missing \"temporalGeometry\""))?,
        &at,
    )?;
    let mut feature = MovingFeature::new(id, geometry);
    if let Some(props) = obj.get("temporalProperties") {
        for p in array(props, &at, "temporalProperties")? {
            feature.temporal_properties.push(parse_property(p, &at)?);
        }
    }
    if let Some(statics) = obj.get("properties").filter(|p| !p.is_null()) {
        let statics = statics
            .as_object()
            .ok_or_else(|| structure(&at, "\"properties\" must be an object"))?;
        feature.static_properties = statics
            .iter()
            .map(|(k, v)| {
                let text = match v {
                    Json::String(s) => s.clone(),
                    other => other.to_string(),
                };
                (k.clone(), text)
            })
            .collect::<BTreeMap<_, _>>();
    }
    feature.crs = obj.get("crs").and_then(parse_crs);
    let bounds = obj.get("stBoundedBy").map(|b| parse_bounds(b, &at)).transpose()?;
    if let Some(b) = &bounds {
        let single = FeatureCollection {
            bounds: Some(b.clone()),
            features: vec![feature.clone()],
        };
        diagnostics.extend(validate_collection(&single).into_iter().filter(|d| {
            matches!(
                d.code,
                vcodes::BOUNDS_NOT_COVERING
                    | vcodes::PERIOD_END_BEYOND_DATA
                    | vcodes::PERIOD_BEGIN_BEFORE_DATA
                    | vcodes::INVALID_BOUNDS
            )
        }));
    }
    Ok(Decoded { feature, bounds })
}

fn union(a: STBounds, b: &STBounds) -> STBounds {
    if a.lower.dims() != b.lower.dims() {
        return a;
    }
    let pick = |x: &Position, y: &Position, f: fn(f64, f64) -> f64| {
        let v: Vec<f64> = x.as_slice().iter().zip(y.as_slice()).map(|(p, q)| f(*p, *q)).collect();
        Position::from_slice(&v).expect("same dims")
    };
    STBounds {
        lower: pick(&a.lower, &b.lower, f64::min),
        upper: pick(&a.upper, &b.upper, f64::max),
        period: a.period.union(&b.period),
        time_unit: a.time_unit,
    }
}

pub fn parse_json(doc: &str) -> Result<Parsed> {
    let root: Json = serde_json::from_str(&strip_trailing_commas(doc)).map_err(|e| CodecError::Json(e.to_string()))?;
    let (items, collection_bounds): (Vec<&Json>, Option<&Json>) = match &root {
        Json::Array(items) => (items.iter().collect(), None),
        Json::Object(obj) if obj.get("type").and_then(Json::as_str) == Some("MovingFeatureCollection") => {
            let features = obj
                .get("features")
                .ok_or_else(|| structure("collection", "missing \"features\""))?;
            (
                array(features, "collection", "features")?.iter().collect(),
                obj.get("stBoundedBy"),
            )
        }
        Json::Object(_) => (vec![&root], None),
        _ => return Err(structure("document", "expected an object or an array")),
    };
    let mut diagnostics = Vec::new();
    let mut features = Vec::new();
    let mut declared: Option<STBounds> = collection_bounds.map(|b| parse_bounds(b, "collection")).transpose()?;
    let from_collection = declared.is_some();
    for (i, item) in items.into_iter().enumerate() {
        let d = parse_feature(item, i, &mut diagnostics)?;
        if !from_collection {
            declared = match (declared, &d.bounds) {
                (None, Some(b)) if i == 0 => Some(b.clone()),
                (Some(a), Some(b)) => Some(union(a, b)),
                _ => None,
            };
        }
        features.push(d.feature);
    }
    Ok(Parsed {
        collection: FeatureCollection {
            bounds: declared,
            features,
        },
        diagnostics,
    })
}

fn number(x: f64) -> Json {
    Number::from_f64(x).map_or(Json::Null, Json::Number)
}

fn value_json(v: &Value) -> Json {
    match v {
        Value::Integer(i) => json!(i),
        Value::Real(r) => number(*r),
        Value::Text(s) => json!(s),
        Value::Boolean(b) => json!(b),
    }
}

fn feature_json(f: &MovingFeature) -> Result<Json> {
    if f.geometry.tracks.len() > 1 {
        return Err(CodecError::GapNotRepresentable {
            at: format!("feature {}", f.id),
            tracks: f.geometry.tracks.len(),
        });
    }
    let samples: Vec<&(TimeInstant, Position)> = f.geometry.samples().collect();
    let mut obj = Map::new();
    obj.insert("type".into(), json!("MovingFeature"));
    obj.insert("id".into(), json!(f.id));
    if let Some(crs) = &f.crs {
        obj.insert("crs".into(), json!({ "type": "Name", "properties": { "name": crs } }));
    }
    obj.insert(
        "temporalGeometry".into(),
        json!({
            "type": "MovingPoint",
            "coordinates": samples.iter().map(|s| s.1.as_slice().iter().map(|c| number(*c)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "datetimes": samples.iter().map(|s| format_iso(s.0)).collect::<Vec<_>>(),
            "interpolations": f.geometry.interpolation.as_str(),
        }),
    );
    obj.insert(
        "temporalProperties".into(),
        Json::Array(
            f.temporal_properties
                .iter()
                .map(|p| {
                    json!({
                        "name": p.name,
                        "values": p.samples.iter().map(|s| value_json(&s.1)).collect::<Vec<_>>(),
                        "datetimes": p.samples.iter().map(|s| format_iso(s.0)).collect::<Vec<_>>(),
                        "interpolations": p.interpolation.as_str(),
                    })
                })
                .collect(),
        ),
    );
    if let Ok(b) = feature_bounds(f) {
        let bbox: Vec<Json> = b
            .lower
            .as_slice()
            .iter()
            .chain(b.upper.as_slice())
            .map(|c| number(*c))
            .collect();
        obj.insert(
            "stBoundedBy".into(),
            json!({
                "bbox": bbox,
                "period": { "begin": format_iso(b.period.begin), "end": format_iso(b.period.end) },
            }),
        );
    }
    obj.insert("properties".into(), json!(f.static_properties));
    Ok(Json::Object(obj))
}

/// Writes one object for a single feature and an array otherwise. Bounds
/// are recomputed from the data.
pub fn write_json(c: &FeatureCollection) -> Result<String> {
    let features = c.features.iter().map(feature_json).collect::<Result<Vec<_>>>()?;
    let doc = match <[Json; 1]>::try_from(features) {
        Ok([one]) => one,
        Err(many) => Json::Array(many),
    };
    let mut out = serde_json::to_string_pretty(&doc).map_err(|e| CodecError::Json(e.to_string()))?;
    out.push('\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{"type": "MovingFeature", "id": "X",
        "temporalGeometry": {"type": "MovingPoint", "coordinates": [[0, 0], [1, 1], [2, 0]],
            "datetimes": ["2011-07-14T22:00:00Z", "2011-07-14T22:00:10Z", "2011-07-14T22:00:20Z"],
            "interpolations": "Stepwise"}}"#;

    #[test]
    fn trailing_commas_outside_strings() {
        assert_eq!(
            strip_trailing_commas(r#"[1, {"a": "x,]",}, ]"#),
            r#"[1, {"a": "x,]"} ]"#
        );
        assert_eq!(strip_trailing_commas(r#"{"a": "\",}"}"#), r#"{"a": "\",}"}"#);
    }

    #[test]
    fn positional_ids() {
        assert_eq!(positional_id(0), "A");
        assert_eq!(positional_id(25), "Z");
        assert_eq!(positional_id(26), "AA");
        assert_eq!(positional_id(27), "AB");
    }

    #[test]
    fn stepwise_geometry_variant() {
        let c = parse_json(DOC).unwrap().collection;
        let f = &c.features[0];
        assert_eq!(f.geometry.interpolation, InterpolationMode::Stepwise);
        let t = TimeInstant::from_millis(1_310_680_800_000 + 7_000);
        assert_eq!(mf_core::access::location_at(f, t).value(), Some(Position::xy(0.0, 0.0)));
    }

    #[test]
    fn parallel_arrays_must_match() {
        let doc = DOC.replace(r#", "2011-07-14T22:00:20Z""#, "");
        assert!(matches!(
            parse_json(&doc),
            Err(CodecError::ParallelArrayLengthMismatch {
                first_len: 3,
                second_len: 2,
                ..
            })
        ));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            parse_json(&DOC.replace("Stepwise", "cubic")).unwrap_err().code(),
            "UNKNOWN_INTERPOLATION"
        );
        assert_eq!(
            parse_json(&DOC.replace("MovingPoint", "MovingPolygon"))
                .unwrap_err()
                .code(),
            "UNSUPPORTED_GEOMETRY_TYPE"
        );
        assert_eq!(
            parse_json(&DOC.replace(":10Z", ":00Z")).unwrap_err().code(),
            "NON_INCREASING_DATETIMES"
        );
        assert_eq!(parse_json("{").unwrap_err().code(), "JSON_SYNTAX");
    }

    #[test]
    fn case_insensitive_modes_and_defaults() {
        let doc = DOC.replace("Stepwise", "lInEaR").replace(
            "}}",
            r#"}, "temporalProperties": [{"name": "s", "values": ["a", "b"], "datetimes": ["2011-07-14T22:00:00Z", "2011-07-14T22:00:20Z"]},
                {"name": "r", "values": [1, 2.5], "datetimes": ["2011-07-14T22:00:00Z", "2011-07-14T22:00:20Z"]}]}"#,
        );
        let c = parse_json(&doc).unwrap().collection;
        let f = &c.features[0];
        assert_eq!(f.geometry.interpolation, InterpolationMode::Linear);
        let s = f.property("s").unwrap();
        assert_eq!(
            (s.value_type, s.interpolation),
            (ValueType::Text, InterpolationMode::Stepwise)
        );
        let r = f.property("r").unwrap();
        assert_eq!(
            (r.value_type, r.interpolation),
            (ValueType::Real, InterpolationMode::Linear)
        );
        assert_eq!(r.samples[0].1, Value::Real(1.0));
    }

    #[test]
    fn arrays_and_collections() {
        let doc = format!("[{DOC}, {}]", DOC.replace("\"X\"", "\"Y\""));
        let c = parse_json(&doc).unwrap().collection;
        assert_eq!(c.features.len(), 2);
        let out = write_json(&c).unwrap();
        assert!(out.trim_start().starts_with('['));
        assert!(parse_json(&out).unwrap().collection.sample_equal(&c));

        let doc = format!(r#"{{"type": "MovingFeatureCollection", "features": [{DOC}]}}"#);
        assert_eq!(parse_json(&doc).unwrap().collection.features[0].id, "X");
    }

    #[test]
    fn gaps_are_refused() {
        let mut c = parse_json(DOC).unwrap().collection;
        let f = &mut c.features[0];
        let later = Track::new(vec![
            (TimeInstant::from_millis(1_310_690_000_000), Position::xy(5.0, 5.0)),
            (TimeInstant::from_millis(1_310_690_001_000), Position::xy(6.0, 5.0)),
        ]);
        f.geometry.tracks.push(later);
        assert!(matches!(
            write_json(&c),
            Err(CodecError::GapNotRepresentable { tracks: 2, .. })
        ));
    }

    #[test]
    fn crs_round_trips() {
        let mut c = parse_json(DOC).unwrap().collection;
        c.features[0].crs = Some("urn:ogc:def:crs:OGC:1.3:CRS84".into());
        let back = parse_json(&write_json(&c).unwrap()).unwrap().collection;
        assert_eq!(back.features[0].crs, c.features[0].crs);
    }
}
