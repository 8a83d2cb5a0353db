//! Conversion between encodings with an explicit account of what each
//! target cannot carry.
//!
//! [`prepare`] rewrites a collection into the form the target encoding
//! reads back: for the segment encodings every property is sampled at
//! every vertex of the union timeline under the target's single attribute
//! interpolation. [`transcode`] then serializes it, unless a loss is an
//! error (or, in strict mode, a warning).

use std::fmt::Write as _;

use mf_core::diag::has_errors;
use mf_core::interpolate::value_or_held;
use mf_core::resample::{positions_on, track_timelines};
use mf_core::validate::validate_collection;
use mf_core::{
    Diagnostic, FeatureCollection, InterpolationMode, MovingFeature, SampleResult, Severity, TemporalGeometry,
    TemporalProperty, TimeInstant, Track, Value,
};

use crate::format::Format;
use crate::timefmt::format_iso;

pub mod codes {
    pub const GAP_NOT_REPRESENTABLE: &str = "GAP_NOT_REPRESENTABLE";
    pub const PER_ATTR_INTERPOLATION_COLLAPSED: &str = "PER_ATTR_INTERPOLATION_COLLAPSED";
    pub const STATIC_PROPS_DROPPED: &str = "STATIC_PROPS_DROPPED";
    pub const ATTR_RESAMPLED: &str = "ATTR_RESAMPLED";
    pub const INTERPOLATION_UNSUPPORTED: &str = "INTERPOLATION_UNSUPPORTED";
    pub const ATTR_SAMPLES_DROPPED: &str = "ATTR_SAMPLES_DROPPED";
    pub const ATTR_UNDEFINED: &str = "ATTR_UNDEFINED";
    pub const INCONSISTENT_ATTRIBUTES: &str = "INCONSISTENT_ATTRIBUTES";
    pub const INVALID_INPUT: &str = "INVALID_INPUT";
    pub const ENCODE_FAILED: &str = "ENCODE_FAILED";
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TranscodeReport {
    pub losses: Vec<Diagnostic>,
}

impl TranscodeReport {
    pub fn refused(&self) -> bool {
        has_errors(&self.losses)
    }

    pub fn codes(&self) -> Vec<&'static str> {
        self.losses.iter().map(|d| d.code).collect()
    }

    pub fn contains(&self, code: &str) -> bool {
        self.losses.iter().any(|d| d.code == code)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transcoded {
    /// `None` when the conversion was refused.
    pub document: Option<String>,
    pub report: TranscodeReport,
}

/// The attribute interpolation a segment encoding will use, and whether
/// each property keeps its own mode under it.
fn target_attr_mode(c: &FeatureCollection, target: Format) -> InterpolationMode {
    let props = || c.features.iter().flat_map(|f| &f.temporal_properties);
    if target == Format::Csv {
        return InterpolationMode::Stepwise;
    }
    let mut modes = props().map(|p| p.interpolation);
    let shared = match modes.next() {
        Some(first) if modes.all(|m| m == first) => Some(first),
        Some(_) => None,
        None => return InterpolationMode::Stepwise,
    };
    match shared {
        Some(m @ (InterpolationMode::Stepwise | InterpolationMode::Linear)) => m,
        _ if props().all(|p| p.value_type.is_numeric()) => InterpolationMode::Linear,
        _ => InterpolationMode::Stepwise,
    }
}

/// Resamples one property onto the feature's union timeline under `mode`.
fn resample_property(
    f: &MovingFeature,
    p: &TemporalProperty,
    timelines: &[Vec<TimeInstant>],
    mode: InterpolationMode,
    losses: &mut Vec<Diagnostic>,
) -> TemporalProperty {
    let who = format!("feature {} attribute {}", f.id, p.name);
    let outside = p
        .samples
        .iter()
        .filter(|(t, _)| {
            !f.geometry
                .tracks
                .iter()
                .any(|tr| tr.period().is_some_and(|per| per.contains(*t)))
        })
        .count();
    if outside > 0 {
        losses.push(Diagnostic::warning(
            codes::ATTR_SAMPLES_DROPPED,
            format!("{who}: {outside} samples outside the geometry's tracks dropped"),
        ));
    }

    let mut samples = Vec::new();
    let mut undefined: Option<TimeInstant> = None;
    let mut end_changes = 0;
    for times in timelines {
        let n = times.len();
        let mut held: Option<Value> = None;
        for (i, &t) in times.iter().enumerate() {
            let own = value_or_held(p, t);
            let last = i + 1 == n && n > 1;
            let value = if last && mode != InterpolationMode::Linear {
                if let (SampleResult::Value(v), Some(h)) = (&own, &held) {
                    if v != h {
                        end_changes += 1;
                    }
                }
                held.clone()
            } else {
                own.value()
            };
            match value {
                Some(v) => {
                    held = Some(v.clone());
                    samples.push((t, v));
                }
                None => {
                    undefined.get_or_insert(t);
                }
            }
        }
    }
    if let Some(t) = undefined {
        losses.push(Diagnostic::error(
            codes::ATTR_UNDEFINED,
            format!("{who} has no value at {} but the encoding needs one", format_iso(t)),
        ));
    }
    if end_changes > 0 {
        losses.push(Diagnostic::warning(
            codes::ATTR_SAMPLES_DROPPED,
            format!("{who}: {end_changes} value changes at a track end cannot be encoded"),
        ));
    }
    let mut out = TemporalProperty::new(p.name.clone(), p.value_type, samples, mode);
    if out.samples != p.samples && undefined.is_none() {
        losses.push(Diagnostic::info(
            codes::ATTR_RESAMPLED,
            format!("{who} resampled onto {} instants", out.samples.len()),
        ));
    }
    out.samples.shrink_to_fit();
    out
}

fn prepare_segmented(c: &FeatureCollection, target: Format, losses: &mut Vec<Diagnostic>) -> FeatureCollection {
    let mode = target_attr_mode(c, target);
    if let Some(first) = c.features.first() {
        for f in &c.features[1..] {
            let same = f.temporal_properties.len() == first.temporal_properties.len()
                && first
                    .temporal_properties
                    .iter()
                    .all(|p| f.property(&p.name).is_some_and(|q| q.value_type == p.value_type));
            if !same {
                losses.push(Diagnostic::error(
                    codes::INCONSISTENT_ATTRIBUTES,
                    format!(
                        "feature {} does not have the same attributes as feature {}; {target} needs one schema",
                        f.id, first.id
                    ),
                ));
            }
        }
    }

    let mut features = Vec::with_capacity(c.features.len());
    for f in &c.features {
        if f.geometry.interpolation != InterpolationMode::Linear {
            losses.push(Diagnostic::error(
                codes::INTERPOLATION_UNSUPPORTED,
                format!(
                    "feature {}: {target} only encodes linear geometry, not {}",
                    f.id, f.geometry.interpolation
                ),
            ));
            features.push(f.clone());
            continue;
        }
        let kept: Vec<&String> = match target {
            Format::Xml => f
                .static_properties
                .keys()
                .filter(|k| *k != "name" && *k != "description")
                .collect(),
            _ => f.static_properties.keys().collect(),
        };
        if !kept.is_empty() {
            let mut names = String::new();
            for (i, k) in kept.iter().enumerate() {
                let _ = write!(names, "{}{k}", if i > 0 { ", " } else { "" });
            }
            losses.push(Diagnostic::warning(
                codes::STATIC_PROPS_DROPPED,
                format!("feature {}: {target} cannot carry static properties {names}", f.id),
            ));
        }
        for p in &f.temporal_properties {
            if p.interpolation != mode {
                losses.push(Diagnostic::warning(
                    codes::PER_ATTR_INTERPOLATION_COLLAPSED,
                    format!(
                        "feature {} attribute {}: {} interpolation becomes {mode}; {target} uses one interpolation for all attributes",
                        f.id, p.name, p.interpolation
                    ),
                ));
            }
        }

        let timelines = track_timelines(&f.geometry, &f.temporal_properties);
        let tracks = timelines
            .iter()
            .map(|times| Track::new(positions_on(&f.geometry, times).expect("timeline lies within its track")))
            .collect();
        let mut out = MovingFeature::new(f.id.clone(), TemporalGeometry::new(tracks, InterpolationMode::Linear));
        out.crs.clone_from(&f.crs);
        out.static_properties = f
            .static_properties
            .iter()
            .filter(|(k, _)| target == Format::Xml && (*k == "name" || *k == "description"))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        out.temporal_properties = f
            .temporal_properties
            .iter()
            .map(|p| resample_property(f, p, &timelines, mode, losses))
            .collect();
        features.push(out);
    }
    FeatureCollection {
        bounds: c.bounds.clone(),
        features,
    }
}

/// Rewrites `c` into what `target` can represent and lists the losses.
/// The result is only meaningful when the losses contain no error.
pub fn prepare(c: &FeatureCollection, target: Format) -> (FeatureCollection, Vec<Diagnostic>) {
    let mut losses = Vec::new();
    let invalid: Vec<Diagnostic> = validate_collection(c)
        .into_iter()
        .filter(Diagnostic::is_error)
        .collect();
    if !invalid.is_empty() {
        for d in invalid {
            losses.push(Diagnostic::error(
                codes::INVALID_INPUT,
                format!("input is not valid: {} {}", d.code, d.message),
            ));
        }
        return (c.clone(), losses);
    }
    let prepared = match target {
        Format::Csv | Format::Xml => prepare_segmented(c, target, &mut losses),
        Format::Json => {
            for f in &c.features {
                if f.geometry.tracks.len() > 1 {
                    losses.push(Diagnostic::error(
                        codes::GAP_NOT_REPRESENTABLE,
                        format!(
                            "feature {} has {} tracks; json cannot encode temporal gaps",
                            f.id,
                            f.geometry.tracks.len()
                        ),
                    ));
                }
            }
            c.clone()
        }
    };
    (prepared, losses)
}

pub fn transcode(c: &FeatureCollection, target: Format, strict: bool) -> Transcoded {
    let (prepared, mut losses) = prepare(c, target);
    if strict {
        for d in &mut losses {
            if d.severity == Severity::Warning {
                d.severity = Severity::Error;
            }
        }
    }
    if has_errors(&losses) {
        return Transcoded {
            document: None,
            report: TranscodeReport { losses },
        };
    }
    match target.write(&prepared) {
        Ok(doc) => Transcoded {
            document: Some(doc),
            report: TranscodeReport { losses },
        },
        Err(e) => {
            losses.push(Diagnostic::error(codes::ENCODE_FAILED, e.to_string()));
            Transcoded {
                document: None,
                report: TranscodeReport { losses },
            }
        }
    }
}
