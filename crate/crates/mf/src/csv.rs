//! MF-CSV: two header lines followed by one line per trajectory segment.
//!
//! ```text
//! @stboundedby,<crs>,<dims>D,<lower>,<upper>,<begin>,<end>,<time unit>
//! @columns,mfidref,trajectory,<name>,<xsd type>,...
//! <mfid>,<start>,<end>,<x y x y ...>,<value>,...
//! ```
//!
//! Start and end are offsets from `<begin>` in `<time unit>` or absolute
//! ISO-8601 instants. A physical line that starts with whitespace continues
//! the previous line. There is no quoting, so text values may not contain
//! commas or line breaks.

use mf_core::{FeatureCollection, InterpolationMode, Position, STBounds, TimeInstant};

use crate::error::{CodecError, Result};
use crate::segments::{
    assemble, attr_schema, common_dims, feature_segments, format_pos_list, format_value, frame, parse_pos_list,
    parse_value, xsd_name, xsd_type, AttrDef, Segment,
};
use crate::timefmt::{format_iso, format_offset, parse_iso, parse_time, TimeUnit};
use crate::Parsed;
#[cfg(test)]
use mf_core::bounds::computed_bounds;

/// Joins continuation lines; yields `(first physical line number, text)`.
fn logical_lines(doc: &str) -> Vec<(usize, String)> {
    let mut out: Vec<(usize, String)> = Vec::new();
    for (i, raw) in doc.lines().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            continue;
        }
        let continues = line.starts_with([' ', '\t']);
        match out.last_mut() {
            Some((_, prev)) if continues => prev.push_str(line.trim()),
            _ => out.push((i + 1, line.trim().to_string())),
        }
    }
    out
}

fn header_err(line: usize, reason: impl Into<String>) -> CodecError {
    CodecError::MalformedHeader {
        at: format!("line {line}"),
        reason: reason.into(),
    }
}

struct Header {
    crs: Option<String>,
    dims: usize,
    bounds: STBounds,
    unit: TimeUnit,
}

fn parse_bounds_line(line: usize, text: &str) -> Result<Header> {
    let mut fields: Vec<&str> = text.split(',').map(str::trim).collect();
    while fields.len() > 8 && fields.last() == Some(&"") {
        fields.pop();
    }
    if fields.first() != Some(&"@stboundedby") {
        return Err(header_err(line, "first line must start with @stboundedby"));
    }
    let [_, crs, dims, lower, upper, begin, end, unit] = fields[..] else {
        return Err(header_err(
            line,
            format!("@stboundedby needs 7 fields, found {}", fields.len() - 1),
        ));
    };
    let dims = match dims.to_ascii_uppercase().as_str() {
        "2D" => 2,
        "3D" => 3,
        other => return Err(header_err(line, format!("dimension {other:?} is not 2D or 3D"))),
    };
    let corner = |s: &str| -> Result<Position> {
        let coords: Vec<f64> = s
            .split_whitespace()
            .map(|c| c.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| header_err(line, format!("bad corner {s:?}")))?;
        if coords.len() != dims {
            return Err(header_err(line, format!("corner {s:?} is not {dims}D")));
        }
        Ok(Position::from_slice(&coords).expect("checked arity"))
    };
    let time = |s: &str| parse_iso(s).ok_or_else(|| header_err(line, format!("bad time {s:?}")));
    let unit = TimeUnit::parse(unit).ok_or_else(|| header_err(line, format!("unknown time unit {unit:?}")))?;
    let begin = time(begin)?;
    let end = time(end)?;
    if begin > end {
        return Err(header_err(line, "period begins after it ends"));
    }
    Ok(Header {
        crs: (!crs.is_empty()).then(|| crs.to_string()),
        dims,
        bounds: STBounds {
            lower: corner(lower)?,
            upper: corner(upper)?,
            period: mf_core::Period { begin, end },
            time_unit: unit.name().to_string(),
        },
        unit,
    })
}

fn parse_columns_line(line: usize, text: &str) -> Result<Vec<AttrDef>> {
    let fields: Vec<&str> = text.split(',').map(str::trim).collect();
    if fields.len() < 3 || fields[0] != "@columns" || fields[1] != "mfidref" || fields[2] != "trajectory" {
        return Err(header_err(
            line,
            "second line must start with @columns,mfidref,trajectory",
        ));
    }
    let rest = &fields[3..];
    if !rest.len().is_multiple_of(2) {
        return Err(header_err(line, "attribute columns come in name,type pairs"));
    }
    rest.chunks(2)
        .map(|pair| {
            let ty = xsd_type(pair[1]).ok_or_else(|| CodecError::UnknownColumnType {
                at: format!("line {line}"),
                ty: pair[1].to_string(),
            })?;
            Ok(AttrDef {
                name: pair[0].to_string(),
                ty,
            })
        })
        .collect()
}

pub fn parse_csv(doc: &str) -> Result<Parsed> {
    let lines = logical_lines(doc.strip_prefix('\u{feff}').unwrap_or(doc));
    let mut it = lines.iter();
    let (l1, first) = it.next().ok_or_else(|| header_err(1, "document is empty"))?;
    let header = parse_bounds_line(*l1, first)?;
    let (l2, second) = it.next().ok_or_else(|| header_err(l1 + 1, "missing @columns line"))?;
    let defs = parse_columns_line(*l2, second)?;

    let origin = header.bounds.period.begin;
    let mut order: Vec<String> = Vec::new();
    let mut segments = Vec::new();
    for (line, text) in it {
        let at = format!("line {line}");
        if text.starts_with('@') {
            return Err(CodecError::MalformedLine {
                at,
                reason: "header lines must precede data lines".into(),
            });
        }
        let fields: Vec<&str> = text.split(',').map(str::trim).collect();
        if fields.len() != 4 + defs.len() {
            return Err(CodecError::MalformedLine {
                reason: format!("expected {} fields, found {}", 4 + defs.len(), fields.len()),
                at,
            });
        }
        let id = fields[0];
        if id.is_empty() {
            return Err(CodecError::MalformedLine {
                at,
                reason: "empty mfidref".into(),
            });
        }
        let time = |s: &str| -> Result<TimeInstant> {
            parse_time(s, origin, &header.unit).ok_or_else(|| CodecError::BadTime {
                at: at.clone(),
                value: s.to_string(),
            })
        };
        let start = time(fields[1])?;
        let end = time(fields[2])?;
        if end <= start {
            return Err(CodecError::NonChronologicalSegment { at });
        }
        let points = parse_pos_list(fields[3], header.dims, &at).map_err(|e| match e {
            CodecError::BadPosList { at, reason } => CodecError::MalformedLine { at, reason },
            other => other,
        })?;
        let attrs = defs
            .iter()
            .zip(&fields[4..])
            .map(|(d, s)| parse_value(s, d.ty, &at).map(|v| vec![v]))
            .collect::<Result<Vec<_>>>()?;
        if !order.iter().any(|o| o == id) {
            order.push(id.to_string());
        }
        segments.push(Segment {
            feature: id.to_string(),
            start,
            end,
            points,
            attrs,
            at,
        });
    }

    let mut features = assemble(&order, segments, &defs, InterpolationMode::Stepwise)?;
    for f in &mut features {
        f.crs.clone_from(&header.crs);
    }
    Ok(Parsed {
        collection: FeatureCollection {
            bounds: Some(header.bounds),
            features,
        },
        diagnostics: Vec::new(),
    })
}

fn check_field(s: &str, at: &str) -> Result<()> {
    if s.contains([',', '\n', '\r']) {
        return Err(CodecError::UnrepresentableValue {
            at: at.to_string(),
            value: s.to_string(),
        });
    }
    Ok(())
}

/// Writes a collection whose features all have linear geometry and
/// stepwise attributes. Uses the declared bounds when present.
pub fn write_csv(c: &FeatureCollection) -> Result<String> {
    let dims = common_dims(&c.features)?;
    let defs = attr_schema(&c.features)?;
    for f in &c.features {
        for p in &f.temporal_properties {
            if p.interpolation != InterpolationMode::Stepwise {
                return Err(CodecError::UnsupportedInterpolation {
                    at: format!("feature {} attribute {}", f.id, p.name),
                    mode: p.interpolation,
                });
            }
        }
    }
    let segments = c
        .features
        .iter()
        .map(|f| feature_segments(f, &defs))
        .collect::<Result<Vec<_>>>()?;

    let (bounds, unit) = frame(c, dims, segments.iter().flatten());
    let origin = bounds.period.begin;
    let offset = |t: TimeInstant| format_offset(t.millis() - origin.millis(), &unit).expect("unit checked");

    let crs = c.features.iter().find_map(|f| f.crs.clone()).unwrap_or_default();
    check_field(&crs, "CRS")?;
    let mut out = format!(
        "@stboundedby,{crs},{dims}D,{},{},{},{},{}\n",
        format_pos_list([&bounds.lower]),
        format_pos_list([&bounds.upper]),
        format_iso(bounds.period.begin),
        format_iso(bounds.period.end),
        unit.name()
    );
    out.push_str("@columns,mfidref,trajectory");
    for d in &defs {
        check_field(&d.name, "attribute name")?;
        out.push_str(&format!(",{},{}", d.name, xsd_name(d.ty)));
    }
    out.push('\n');
    for seg in segments.iter().flatten() {
        check_field(&seg.feature, "mfidref")?;
        out.push_str(&format!(
            "{},{},{},{}",
            seg.feature,
            offset(seg.start),
            offset(seg.end),
            format_pos_list(&seg.points)
        ));
        for v in seg.attrs.iter().flatten() {
            let text = format_value(v);
            check_field(&text, &seg.at)?;
            out.push(',');
            out.push_str(&text);
        }
        out.push('\n');
    }
    Ok(out)
}
