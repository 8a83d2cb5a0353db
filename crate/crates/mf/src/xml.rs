//! MF-XML: bounds, members and attribute definitions followed by a
//! foliation of `mf:LinearTrajectory` segments that reference members by
//! `mfIdRef`.
//!
//! Elements are matched by local name, so undeclared or unusual prefixes
//! are accepted. All attributes share one interpolation, named by an
//! optional `interpolation` attribute on `mf:VaryingAttrDefs` (stepwise
//! when absent). Under linear interpolation an `mf:Attr` may list one
//! value per point of its `gml:posList`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use mf_core::{Diagnostic, FeatureCollection, InterpolationMode, Period, Position, STBounds, ValueType};
use quick_xml::escape::{escape, resolve_predefined_entity};
use quick_xml::events::Event;
use quick_xml::Reader;

use crate::error::{CodecError, Result};
use crate::segments::{
    assemble, attr_schema, common_dims, feature_segments, format_pos_list, format_value, frame, parse_pos_list,
    parse_value, xsd_name, xsd_type, AttrDef, Segment,
};
use crate::timefmt::{format_iso, format_offset, parse_iso, parse_time, TimeUnit};
use crate::Parsed;

pub const MF_NS: &str = "http://schemas.opengis.net/mf-core/1.0";
pub const GML_NS: &str = "http://www.opengis.net/gml/3.2";
pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema";

pub mod codes {
    pub const UNKNOWN_ELEMENT: &str = "UNKNOWN_ELEMENT";
    pub const DUPLICATE_GML_ID: &str = "DUPLICATE_GML_ID";
}

#[derive(Debug, Default)]
struct Node {
    name: String,
    attrs: Vec<(String, String)>,
    children: Vec<Node>,
    text: String,
    line: usize,
}

fn local(name: &str) -> &str {
    name.rsplit(':').next().unwrap_or(name)
}

impl Node {
    fn local(&self) -> &str {
        local(&self.name)
    }

    fn attr(&self, local_name: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| local(k) == local_name)
            .map(|(_, v)| v.as_str())
    }

    fn child(&self, local_name: &str) -> Option<&Node> {
        self.children.iter().find(|c| c.local() == local_name)
    }

    fn at(&self) -> String {
        format!("line {} <{}>", self.line, self.name)
    }
}

fn line_of(doc: &str, pos: u64) -> usize {
    let pos = (pos as usize).min(doc.len());
    doc.as_bytes()[..pos].iter().filter(|&&b| b == b'\n').count() + 1
}

fn xml_err(doc: &str, pos: u64, e: impl std::fmt::Display) -> CodecError {
    CodecError::Xml(format!("line {}: {e}", line_of(doc, pos)))
}

/// Reads the document into a tree. Attributes without values (as in
/// `<a ...>`) are kept with an empty value.
fn parse_tree(doc: &str) -> Result<Node> {
    let mut reader = Reader::from_str(doc);
    let mut stack: Vec<Node> = Vec::new();
    let mut root: Option<Node> = None;
    loop {
        let pos = reader.buffer_position();
        let event = reader
            .read_event()
            .map_err(|e| xml_err(doc, reader.error_position(), e))?;
        let open = |e: &quick_xml::events::BytesStart| -> Result<Node> {
            let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
            let attrs = e
                .html_attributes()
                .map(|a| {
                    let a = a.map_err(|err| xml_err(doc, pos, err))?;
                    let key = String::from_utf8_lossy(a.key.as_ref()).into_owned();
                    let value = a.unescape_value().map_err(|err| xml_err(doc, pos, err))?.into_owned();
                    Ok((key, value))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Node {
                name,
                attrs,
                line: line_of(doc, pos),
                ..Node::default()
            })
        };
        match event {
            Event::Start(e) => stack.push(open(&e)?),
            Event::Empty(e) => {
                let node = open(&e)?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(node),
                    None if root.is_none() => root = Some(node),
                    None => return Err(xml_err(doc, pos, "more than one root element")),
                }
            }
            Event::End(_) => {
                let node = stack.pop().expect("reader checks end tags");
                match stack.last_mut() {
                    Some(parent) => parent.children.push(node),
                    None if root.is_none() => root = Some(node),
                    None => return Err(xml_err(doc, pos, "more than one root element")),
                }
            }
            Event::Text(t) => {
                if let Some(top) = stack.last_mut() {
                    top.text.push_str(&t.decode().map_err(|e| xml_err(doc, pos, e))?);
                }
            }
            Event::CData(t) => {
                if let Some(top) = stack.last_mut() {
                    top.text.push_str(&t.decode().map_err(|e| xml_err(doc, pos, e))?);
                }
            }
            Event::GeneralRef(r) => {
                let resolved = match r.resolve_char_ref().map_err(|e| xml_err(doc, pos, e))? {
                    Some(c) => c.to_string(),
                    None => {
                        let name = r.decode().map_err(|e| xml_err(doc, pos, e))?;
                        resolve_predefined_entity(&name)
                            .ok_or_else(|| xml_err(doc, pos, format!("unknown entity &{name};")))?
                            .to_string()
                    }
                };
                if let Some(top) = stack.last_mut() {
                    top.text.push_str(&resolved);
                }
            }
            Event::Eof => break,
            Event::Decl(_) | Event::PI(_) | Event::Comment(_) | Event::DocType(_) => {}
        }
    }
    if let Some(open) = stack.last() {
        return Err(CodecError::Xml(format!("{}: element is never closed", open.at())));
    }
    root.ok_or_else(|| CodecError::Xml("document has no root element".into()))
}

fn structure(node: &Node, reason: impl Into<String>) -> CodecError {
    CodecError::Structure {
        at: node.at(),
        reason: reason.into(),
    }
}

fn unknown(node: &Node, diagnostics: &mut Vec<Diagnostic>) {
    diagnostics.push(Diagnostic::warning(
        codes::UNKNOWN_ELEMENT,
        format!("{}: skipped unknown element", node.at()),
    ));
}

fn corner(node: &Node) -> Result<Position> {
    let coords: Vec<f64> = node
        .text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().ok().filter(|v| v.is_finite()))
        .collect::<Option<_>>()
        .ok_or_else(|| structure(node, format!("bad corner {:?}", node.text.trim())))?;
    Position::from_slice(&coords).map_err(|_| structure(node, format!("corner {:?} is not 2D or 3D", node.text.trim())))
}

struct Bounds {
    bounds: STBounds,
    unit: TimeUnit,
    crs: Option<String>,
}

fn parse_bounds(node: &Node, diagnostics: &mut Vec<Diagnostic>) -> Result<Bounds> {
    let unit_name = node.attr("offset").unwrap_or("sec");
    let unit =
        TimeUnit::parse(unit_name).ok_or_else(|| structure(node, format!("unknown offset unit {unit_name:?}")))?;
    let mut envelope = None;
    for c in &node.children {
        match c.local() {
            "EnvelopeWithTimePeriod" | "Envelope" if envelope.is_none() => envelope = Some(c),
            _ => unknown(c, diagnostics),
        }
    }
    let env = envelope.ok_or_else(|| structure(node, "missing gml:EnvelopeWithTimePeriod"))?;
    let part = |name: &str| {
        env.child(name)
            .ok_or_else(|| structure(env, format!("missing gml:{name}")))
    };
    let time = |name: &str| -> Result<_> {
        let n = part(name)?;
        parse_iso(&n.text).ok_or_else(|| CodecError::BadTime {
            at: n.at(),
            value: n.text.trim().to_string(),
        })
    };
    for c in &env.children {
        if !matches!(
            c.local(),
            "lowerCorner" | "upperCorner" | "beginPosition" | "endPosition"
        ) {
            unknown(c, diagnostics);
        }
    }
    let lower = corner(part("lowerCorner")?)?;
    let upper = corner(part("upperCorner")?)?;
    if lower.dims() != upper.dims() {
        return Err(structure(env, "corners differ in dimension"));
    }
    let period = Period::new(time("beginPosition")?, time("endPosition")?)
        .map_err(|_| structure(env, "period begins after it ends"))?;
    Ok(Bounds {
        bounds: STBounds {
            lower,
            upper,
            period,
            time_unit: unit.name().to_string(),
        },
        unit,
        crs: env.attr("srsName").filter(|s| !s.is_empty()).map(str::to_string),
    })
}

struct Member {
    id: String,
    statics: Vec<(String, String)>,
}

fn parse_member(node: &Node, members: &mut Vec<Member>, diagnostics: &mut Vec<Diagnostic>) -> Result<()> {
    for mf in &node.children {
        if mf.local() != "MovingFeature" {
            unknown(mf, diagnostics);
            continue;
        }
        let id = mf
            .attr("id")
            .filter(|s| !s.is_empty())
            .ok_or_else(|| structure(mf, "mf:MovingFeature without gml:id"))?;
        if members.iter().any(|m| m.id == id) {
            return Err(structure(mf, format!("duplicate member id {id:?}")));
        }
        let mut statics = Vec::new();
        for c in &mf.children {
            match c.local() {
                key @ ("name" | "description") => statics.push((key.to_string(), c.text.trim().to_string())),
                _ => unknown(c, diagnostics),
            }
        }
        members.push(Member {
            id: id.to_string(),
            statics,
        });
    }
    Ok(())
}

fn parse_header(node: &Node, diagnostics: &mut Vec<Diagnostic>) -> Result<(Vec<AttrDef>, InterpolationMode)> {
    let mut defs = Vec::new();
    let mut mode = InterpolationMode::Stepwise;
    for c in &node.children {
        if c.local() != "VaryingAttrDefs" {
            unknown(c, diagnostics);
            continue;
        }
        if let Some(m) = c.attr("interpolation") {
            mode = m.parse().map_err(|_| CodecError::UnknownInterpolation {
                at: c.at(),
                value: m.to_string(),
            })?;
        }
        for d in &c.children {
            if d.local() != "attrDef" {
                unknown(d, diagnostics);
                continue;
            }
            let name = d.attr("name").ok_or_else(|| structure(d, "mf:attrDef without name"))?;
            let ty_name = d.attr("type").ok_or_else(|| structure(d, "mf:attrDef without type"))?;
            let ty = xsd_type(ty_name).ok_or_else(|| CodecError::UnknownColumnType {
                at: d.at(),
                ty: ty_name.to_string(),
            })?;
            for a in &d.children {
                if a.local() != "AttrAnnotation" {
                    unknown(a, diagnostics);
                }
            }
            defs.push(AttrDef {
                name: name.to_string(),
                ty,
            });
        }
    }
    Ok((defs, mode))
}

struct Context<'a> {
    frame: &'a Bounds,
    dims: usize,
    defs: &'a [AttrDef],
    mode: InterpolationMode,
}

fn parse_trajectory(node: &Node, cx: &Context) -> Result<Segment> {
    let at = match node.attr("id") {
        Some(id) => format!("line {} trajectory {id}", node.line),
        None => node.at(),
    };
    let required = |name: &str| {
        node.attr(name)
            .ok_or_else(|| structure(node, format!("mf:LinearTrajectory without {name}")))
    };
    let origin = cx.frame.bounds.period.begin;
    let time = |name: &str| -> Result<_> {
        let s = required(name)?;
        parse_time(s, origin, &cx.frame.unit).ok_or_else(|| CodecError::BadTime {
            at: at.clone(),
            value: s.to_string(),
        })
    };
    let feature = required("mfIdRef")?.to_string();
    let start = time("start")?;
    let end = time("end")?;
    if end <= start {
        return Err(CodecError::NonChronologicalSegment { at });
    }
    let pos_list = node.child("posList").ok_or_else(|| CodecError::BadPosList {
        at: at.clone(),
        reason: "missing gml:posList".into(),
    })?;
    let dims = match pos_list.attr("srsDimension") {
        Some(d) => d.trim().parse().map_err(|_| CodecError::BadPosList {
            at: at.clone(),
            reason: format!("bad srsDimension {d:?}"),
        })?,
        None => cx.dims,
    };
    let points = parse_pos_list(&pos_list.text, dims, &at).map_err(|e| match e {
        CodecError::BadCoordinateArity { at, count, dims } => CodecError::BadPosList {
            at,
            reason: format!("{count} coordinate values do not form at least two {dims}D points"),
        },
        other => other,
    })?;
    let attr_nodes: Vec<&Node> = node.children.iter().filter(|c| c.local() == "Attr").collect();
    if attr_nodes.len() != cx.defs.len() {
        return Err(CodecError::AttrCountMismatch {
            at,
            expected: cx.defs.len(),
            found: attr_nodes.len(),
        });
    }
    let attrs = cx
        .defs
        .iter()
        .zip(attr_nodes)
        .map(|(d, n)| {
            let words: Vec<&str> = n.text.split_whitespace().collect();
            if cx.mode == InterpolationMode::Linear && d.ty.is_numeric() && words.len() > 1 {
                words.iter().map(|w| parse_value(w, d.ty, &at)).collect()
            } else {
                parse_value(&n.text, d.ty, &at).map(|v| vec![v])
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Segment {
        feature,
        start,
        end,
        points,
        attrs,
        at,
    })
}

/// Parses an MF-XML document. Skipped elements and repeated trajectory
/// ids are reported as warnings.
pub fn parse_xml(doc: &str) -> Result<Parsed> {
    let root = parse_tree(doc)?;
    if root.local() != "MovingFeatures" {
        return Err(structure(&root, "root element must be mf:MovingFeatures"));
    }
    let mut diagnostics = Vec::new();
    let mut frame_node = None;
    let mut members = Vec::new();
    let mut header = None;
    let mut foliations = Vec::new();
    for c in &root.children {
        match c.local() {
            "STBoundedBy" if frame_node.is_none() => frame_node = Some(c),
            "Member" => parse_member(c, &mut members, &mut diagnostics)?,
            "Header" if header.is_none() => header = Some(parse_header(c, &mut diagnostics)?),
            "Foliation" => foliations.push(c),
            _ => unknown(c, &mut diagnostics),
        }
    }
    let frame = parse_bounds(frame_node.ok_or(CodecError::MissingSTBoundedBy)?, &mut diagnostics)?;
    let (defs, mode) = header.unwrap_or((Vec::new(), InterpolationMode::Stepwise));
    let cx = Context {
        frame: &frame,
        dims: frame.bounds.lower.dims(),
        defs: &defs,
        mode,
    };

    let mut seen_ids = BTreeSet::new();
    let mut segments = Vec::new();
    for node in foliations.iter().flat_map(|f| &f.children) {
        if node.local() != "LinearTrajectory" {
            unknown(node, &mut diagnostics);
            continue;
        }
        if let Some(id) = node.attr("id") {
            if !seen_ids.insert(id) {
                diagnostics.push(Diagnostic::warning(
                    codes::DUPLICATE_GML_ID,
                    format!("line {}: gml:id {id:?} is used by more than one trajectory", node.line),
                ));
            }
        }
        let seg = parse_trajectory(node, &cx)?;
        if !members.iter().any(|m| m.id == seg.feature) {
            return Err(CodecError::UnknownMfIdRef {
                at: seg.at,
                id: seg.feature,
            });
        }
        segments.push(seg);
    }

    let order: Vec<String> = members.iter().map(|m| m.id.clone()).collect();
    let mut features = assemble(&order, segments, &defs, mode)?;
    for (f, m) in features.iter_mut().zip(&members) {
        f.crs.clone_from(&frame.crs);
        f.static_properties.extend(m.statics.iter().cloned());
    }
    Ok(Parsed {
        collection: FeatureCollection {
            bounds: Some(frame.bounds),
            features,
        },
        diagnostics,
    })
}

/// The interpolation shared by every attribute of every feature.
fn shared_mode(c: &FeatureCollection) -> Result<InterpolationMode> {
    let mut mode = None;
    for f in &c.features {
        for p in &f.temporal_properties {
            match mode {
                None => mode = Some(p.interpolation),
                Some(m) if m != p.interpolation => {
                    return Err(CodecError::UnsupportedInterpolation {
                        at: format!(
                            "feature {} attribute {} (attributes must share one interpolation)",
                            f.id, p.name
                        ),
                        mode: p.interpolation,
                    })
                }
                _ => {}
            }
            if p.interpolation == InterpolationMode::Linear && !p.value_type.is_numeric() {
                return Err(CodecError::AttrTypeUnsupported {
                    at: format!("feature {}", f.id),
                    name: p.name.clone(),
                    ty: p.value_type.to_string(),
                    mode: p.interpolation,
                });
            }
        }
    }
    Ok(mode.unwrap_or(InterpolationMode::Stepwise))
}

/// Writes a collection with linear geometry and one interpolation shared
/// by all attributes. Static properties other than `name` and
/// `description` are not written.
pub fn write_xml(c: &FeatureCollection) -> Result<String> {
    let dims = common_dims(&c.features)?;
    let defs = attr_schema(&c.features)?;
    let mode = shared_mode(c)?;
    let segments = c
        .features
        .iter()
        .map(|f| feature_segments(f, &defs))
        .collect::<Result<Vec<_>>>()?;
    let (bounds, unit) = frame(c, dims, segments.iter().flatten());
    let origin = bounds.period.begin.millis();
    let offset = |t: mf_core::TimeInstant| format_offset(t.millis() - origin, &unit).expect("unit checked");

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<mf:MovingFeatures xmlns:mf=\"{MF_NS}\" xmlns:gml=\"{GML_NS}\" xmlns:xsd=\"{XSD_NS}\">"
    );
    let _ = writeln!(out, "\t<mf:STBoundedBy offset=\"{}\">", unit.name());
    let crs = c.features.iter().find_map(|f| f.crs.as_deref());
    match crs {
        Some(crs) => {
            let _ = writeln!(out, "\t\t<gml:EnvelopeWithTimePeriod srsName=\"{}\">", escape(crs));
        }
        None => out.push_str("\t\t<gml:EnvelopeWithTimePeriod>\n"),
    }
    let _ = writeln!(
        out,
        "\t\t\t<gml:lowerCorner>{}</gml:lowerCorner>",
        format_pos_list([&bounds.lower])
    );
    let _ = writeln!(
        out,
        "\t\t\t<gml:upperCorner>{}</gml:upperCorner>",
        format_pos_list([&bounds.upper])
    );
    let _ = writeln!(
        out,
        "\t\t\t<gml:beginPosition>{}</gml:beginPosition>",
        format_iso(bounds.period.begin)
    );
    let _ = writeln!(
        out,
        "\t\t\t<gml:endPosition>{}</gml:endPosition>",
        format_iso(bounds.period.end)
    );
    out.push_str("\t\t</gml:EnvelopeWithTimePeriod>\n\t</mf:STBoundedBy>\n");

    for f in &c.features {
        out.push_str("\t<mf:Member>\n");
        let _ = writeln!(out, "\t\t<mf:MovingFeature gml:id=\"{}\">", escape(f.id.as_str()));
        for key in ["name", "description"] {
            if let Some(v) = f.static_properties.get(key) {
                let _ = writeln!(out, "\t\t\t<gml:{key}>{}</gml:{key}>", escape(v.as_str()));
            }
        }
        out.push_str("\t\t</mf:MovingFeature>\n\t</mf:Member>\n");
    }

    out.push_str("\t<mf:Header>\n");
    match mode {
        InterpolationMode::Stepwise => out.push_str("\t\t<mf:VaryingAttrDefs>\n"),
        m => {
            let _ = writeln!(out, "\t\t<mf:VaryingAttrDefs interpolation=\"{m}\">");
        }
    }
    for d in &defs {
        let _ = writeln!(
            out,
            "\t\t\t<mf:attrDef name=\"{}\" type=\"{}\"/>",
            escape(d.name.as_str()),
            xsd_name(d.ty)
        );
    }
    out.push_str("\t\t</mf:VaryingAttrDefs>\n\t</mf:Header>\n");

    out.push_str("\t<mf:Foliation>\n");
    let feature_ids: BTreeSet<&str> = c.features.iter().map(|f| f.id.as_str()).collect();
    let mut ids = (1..)
        .map(|n| format!("LT{n:04}"))
        .filter(|id| !feature_ids.contains(id.as_str()));
    for seg in segments.iter().flatten() {
        let _ = writeln!(
            out,
            "\t\t<mf:LinearTrajectory gml:id=\"{}\" mfIdRef=\"{}\" start=\"{}\" end=\"{}\">",
            ids.next().expect("unbounded"),
            escape(seg.feature.as_str()),
            offset(seg.start),
            offset(seg.end)
        );
        let _ = writeln!(out, "\t\t\t<gml:posList>{}</gml:posList>", format_pos_list(&seg.points));
        for (d, values) in defs.iter().zip(&seg.attrs) {
            let text: Vec<String> = values.iter().map(format_value).collect();
            if d.ty == ValueType::Text && text[0].trim() != text[0] {
                return Err(CodecError::UnrepresentableValue {
                    at: seg.at.clone(),
                    value: text[0].clone(),
                });
            }
            let _ = writeln!(out, "\t\t\t<mf:Attr>{}</mf:Attr>", escape(text.join(" ")));
        }
        out.push_str("\t\t</mf:LinearTrajectory>\n");
    }
    out.push_str("\t</mf:Foliation>\n</mf:MovingFeatures>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mf_core::{MovingFeature, TemporalGeometry, TemporalProperty, TimeInstant, Value};

    const MINIMAL: &str = r#"<mf:MovingFeatures xmlns:mf="http://schemas.opengis.net/mf-core/1.0" xmlns:gml="http://www.opengis.net/gml/3.2">
  <mf:STBoundedBy offset="sec">
    <gml:EnvelopeWithTimePeriod>
      <gml:lowerCorner>0 0</gml:lowerCorner>
      <gml:upperCorner>1 1</gml:upperCorner>
      <gml:beginPosition>2011-07-14T22:00:00Z</gml:beginPosition>
      <gml:endPosition>2011-07-14T22:00:10Z</gml:endPosition>
    </gml:EnvelopeWithTimePeriod>
  </mf:STBoundedBy>
  <mf:Member><mf:MovingFeature gml:id="A"/></mf:Member>
  <mf:Foliation>
    FOLIATION
  </mf:Foliation>
</mf:MovingFeatures>"#;

    fn with_foliation(body: &str) -> String {
        MINIMAL.replace("FOLIATION", body)
    }

    #[test]
    fn empty_foliation_gives_an_empty_member() {
        let parsed = parse_xml(&with_foliation("")).unwrap();
        let a = &parsed.collection.features[0];
        assert_eq!(a.id, "A");
        assert_eq!(a.geometry.sample_count(), 0);
        assert!(parsed.diagnostics.is_empty());
    }

    #[test]
    fn dangling_reference() {
        let doc = with_foliation(
            r#"<mf:LinearTrajectory gml:id="T" mfIdRef="C" start="0" end="10"><gml:posList>0 0 1 1</gml:posList></mf:LinearTrajectory>"#,
        );
        assert!(matches!(parse_xml(&doc), Err(CodecError::UnknownMfIdRef { id, .. }) if id == "C"));
    }

    #[test]
    fn attr_count_must_match_definitions() {
        let doc = with_foliation(
            r#"<mf:LinearTrajectory mfIdRef="A" start="0" end="10"><gml:posList>0 0 1 1</gml:posList><mf:Attr>1</mf:Attr></mf:LinearTrajectory>"#,
        );
        assert!(matches!(
            parse_xml(&doc),
            Err(CodecError::AttrCountMismatch {
                expected: 0,
                found: 1,
                ..
            })
        ));
    }

    #[test]
    fn bad_pos_list() {
        let doc = with_foliation(
            r#"<mf:LinearTrajectory mfIdRef="A" start="0" end="10"><gml:posList>0 0 1</gml:posList></mf:LinearTrajectory>"#,
        );
        assert_eq!(parse_xml(&doc).unwrap_err().code(), "BAD_POSLIST");
    }

    #[test]
    fn missing_bounds() {
        let doc = r#"<mf:MovingFeatures xmlns:mf="x"><mf:Foliation/></mf:MovingFeatures>"#;
        assert_eq!(parse_xml(doc).unwrap_err(), CodecError::MissingSTBoundedBy);
    }

    #[test]
    fn unknown_elements_warn() {
        let doc = MINIMAL
            .replace("<mf:Foliation>", "<ext:Extra>ignored</ext:Extra><mf:Foliation>")
            .replace("FOLIATION", "");
        let parsed = parse_xml(&doc).unwrap();
        assert_eq!(parsed.diagnostics.len(), 1);
        assert_eq!(parsed.diagnostics[0].code, codes::UNKNOWN_ELEMENT);
    }

    #[test]
    fn malformed_xml_is_a_syntax_error() {
        assert_eq!(parse_xml("<mf:MovingFeatures>").unwrap_err().code(), "XML_SYNTAX");
        assert_eq!(parse_xml("<a></b>").unwrap_err().code(), "XML_SYNTAX");
    }

    fn feature(mode: InterpolationMode, ty: ValueType, values: [Value; 2]) -> MovingFeature {
        let t = |s: i64| TimeInstant::from_secs(1_310_680_800 + s);
        let [v0, v1] = values;
        MovingFeature::new(
            "A",
            TemporalGeometry::single(
                vec![(t(0), Position::xy(0.0, 0.0)), (t(10), Position::xy(1.0, 1.0))],
                InterpolationMode::Linear,
            ),
        )
        .with_property(TemporalProperty::new("v", ty, vec![(t(0), v0), (t(10), v1)], mode))
        .with_static("name", "A & <co>")
    }

    #[test]
    fn linear_attributes_round_trip_with_end_values() {
        let f = feature(
            InterpolationMode::Linear,
            ValueType::Real,
            [Value::Real(1.5), Value::Real(4.0)],
        );
        let c = FeatureCollection::new(vec![f]);
        let doc = write_xml(&c).unwrap();
        assert!(doc.contains("interpolation=\"Linear\""));
        assert!(doc.contains("<mf:Attr>1.5 4.0</mf:Attr>"));
        let back = parse_xml(&doc).unwrap().collection;
        assert!(back.sample_equal(&c));
        assert_eq!(back.features[0].static_properties["name"], "A & <co>");
    }

    #[test]
    fn writer_preconditions() {
        let text = feature(
            InterpolationMode::Linear,
            ValueType::Text,
            [Value::Text("a".into()), Value::Text("b".into())],
        );
        let err = write_xml(&FeatureCollection::new(vec![text])).unwrap_err();
        assert_eq!(err.code(), "ATTR_TYPE_UNSUPPORTED");

        let mut f = feature(
            InterpolationMode::Stepwise,
            ValueType::Integer,
            [Value::Integer(1), Value::Integer(2)],
        );
        f.geometry.interpolation = InterpolationMode::Stepwise;
        let err = write_xml(&FeatureCollection::new(vec![f])).unwrap_err();
        assert_eq!(err.code(), "UNSUPPORTED_INTERPOLATION");

        let mut f = feature(
            InterpolationMode::Stepwise,
            ValueType::Integer,
            [Value::Integer(1), Value::Integer(2)],
        );
        let mut other = f.temporal_properties[0].clone();
        other.name = "w".into();
        other.interpolation = InterpolationMode::Discrete;
        f.temporal_properties.push(other);
        let err = write_xml(&FeatureCollection::new(vec![f])).unwrap_err();
        assert_eq!(err.code(), "UNSUPPORTED_INTERPOLATION");
    }

    #[test]
    fn generated_ids_avoid_feature_ids() {
        let mut f = feature(
            InterpolationMode::Stepwise,
            ValueType::Integer,
            [Value::Integer(1), Value::Integer(2)],
        );
        f.id = "LT0001".into();
        let doc = write_xml(&FeatureCollection::new(vec![f])).unwrap();
        assert!(doc.contains("<mf:LinearTrajectory gml:id=\"LT0002\" mfIdRef=\"LT0001\""));
    }
}
