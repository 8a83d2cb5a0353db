//! The `mf` command-line tool.
//!
//! Exit status: 0 on success, 1 when the data has errors or a conversion
//! is refused, 2 when the input cannot be read or decoded or the
//! arguments are unusable.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mf_core::access::{
    acceleration_at, distance_between, location_at, speed_at, sub_trajectory, time_at_position, time_to_distance,
    velocity_at,
};
use mf_core::bounds::computed_bounds;
use mf_core::interpolate::value_at;
use mf_core::simplify::simplify_feature;
use mf_core::validate::validate_collection;
use mf_core::{
    Diagnostic, FeatureCollection, InterpolationMode, MovingFeature, Position, SampleResult, Severity, TimeInstant,
    Value,
};

use crate::format::Format;
use crate::timefmt::{format_iso, is_offset_literal, parse_iso, parse_offset, TimeUnit};
use crate::transcode::transcode;
use crate::Parsed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Xml,
    Json,
    Auto,
}

impl FormatArg {
    fn resolve(self) -> Option<Format> {
        match self {
            FormatArg::Csv => Some(Format::Csv),
            FormatArg::Xml => Some(Format::Xml),
            FormatArg::Json => Some(Format::Json),
            FormatArg::Auto => None,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mf",
    version,
    about = "Read, check, convert and query moving feature documents"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a document and print diagnostics to standard error.
    Validate {
        /// Input file, or - for standard input.
        input: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        format: FormatArg,
        /// Treat warnings as errors.
        #[arg(long)]
        strict: bool,
    },
    /// Convert between CSV, XML and JSON, reporting what is lost.
    Convert {
        input: PathBuf,
        /// Target encoding.
        #[arg(long, value_enum)]
        format: FormatArg,
        #[arg(long, value_enum, default_value = "auto")]
        input_format: FormatArg,
        /// Refuse the conversion if anything would be lost.
        #[arg(long)]
        strict: bool,
        /// Remove vertices that lie on a straight line in space and time.
        #[arg(long)]
        simplify: bool,
        /// Output file; standard output when absent.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Evaluate one feature at an instant or over an interval.
    Query {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        format: FormatArg,
        #[arg(long)]
        feature: String,
        /// ISO-8601 instant, or an offset from the collection start in its time unit.
        #[arg(long)]
        at: Option<String>,
        /// position, velocity, speed, acceleration, distance, time,
        /// subtrajectory, or the name of a temporal property.
        #[arg(long)]
        what: String,
        /// Second feature for `distance`; without it, `distance` is the path length travelled.
        #[arg(long)]
        other: Option<String>,
        /// Target position for `time`, as space- or comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        position: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        tolerance: f64,
        #[arg(long)]
        from: Option<String>,
        #[arg(long)]
        to: Option<String>,
        /// Encoding for `subtrajectory` output.
        #[arg(long, value_enum, default_value = "json")]
        output_format: FormatArg,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print a per-feature summary.
    Info {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        format: FormatArg,
    },
    /// Print each track as a WKT LINESTRING.
    ExportWkt {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        format: FormatArg,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

/// A command failure: message for standard error and exit status.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

fn data_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn usage_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type CmdResult = Result<u8, Failure>;

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| usage_error(format!("<stdin>: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| usage_error(format!("{}: {e}", path.display())))
}

fn load(path: &Path, format: FormatArg) -> Result<(Parsed, Format), Failure> {
    let doc = read_input(path)?;
    let hint = (path != Path::new("-")).then_some(path);
    let format = format
        .resolve()
        .or_else(|| Format::detect(hint, &doc))
        .ok_or_else(|| usage_error(format!("{}: cannot tell the format; use --format", path.display())))?;
    let parsed = format
        .parse(&doc)
        .map_err(|e| usage_error(format!("{}: {} {e}", path.display(), e.code())))?;
    Ok((parsed, format))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) if path != Path::new("-") => {
            std::fs::write(path, text).map_err(|e| usage_error(format!("{}: {e}", path.display())))
        }
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|()| out.flush())
                .map_err(|e| usage_error(format!("<stdout>: {e}")))
        }
    }
}

fn print_diagnostics(diagnostics: &[Diagnostic]) {
    let mut err = std::io::stderr().lock();
    for d in diagnostics {
        let _ = writeln!(err, "{d}");
    }
}

/// Seven significant digits, without trailing zeros.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.6e}").parse().expect("formatted float");
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    rounded.to_string()
}

fn format_coords(coords: &[f64]) -> String {
    coords.iter().map(|c| format_number(*c)).collect::<Vec<_>>().join(" ")
}

fn format_result<T>(r: SampleResult<T>, f: impl FnOnce(T) -> String) -> String {
    match r {
        SampleResult::Value(v) => f(v),
        SampleResult::Gap => "GAP".into(),
        SampleResult::OutOfRange => "OUT_OF_RANGE".into(),
        SampleResult::Undefined => "UNDEFINED".into(),
    }
}

fn format_scalar(v: &Value) -> String {
    match v {
        Value::Real(r) => format_number(*r),
        other => other.to_string(),
    }
}

fn cmd_validate(input: &Path, format: FormatArg, strict: bool) -> CmdResult {
    let (parsed, _) = load(input, format)?;
    let mut diagnostics = parsed.diagnostics;
    for d in validate_collection(&parsed.collection) {
        if !diagnostics.contains(&d) {
            diagnostics.push(d);
        }
    }
    print_diagnostics(&diagnostics);
    let failed = diagnostics
        .iter()
        .any(|d| d.is_error() || (strict && d.severity == Severity::Warning));
    Ok(u8::from(failed))
}

fn cmd_convert(
    input: &Path,
    target: FormatArg,
    input_format: FormatArg,
    strict: bool,
    simplify: bool,
    output: Option<&Path>,
) -> CmdResult {
    let target = target
        .resolve()
        .ok_or_else(|| usage_error("--format must name a target: csv, xml or json"))?;
    let (parsed, _) = load(input, input_format)?;
    print_diagnostics(&parsed.diagnostics);
    if strict && parsed.diagnostics.iter().any(|d| d.severity >= Severity::Warning) {
        return Err(data_error("refused: the input has warnings and --strict is set"));
    }
    let mut collection = parsed.collection;
    if simplify {
        collection.features = collection.features.iter().map(simplify_feature).collect();
    }
    let result = transcode(&collection, target, strict);
    print_diagnostics(&result.report.losses);
    match result.document {
        Some(doc) => {
            emit(output, &doc)?;
            Ok(0)
        }
        None => Err(data_error(format!("refused: conversion to {target} loses data"))),
    }
}

/// Parses `--at` style times: ISO-8601, or an offset from the collection
/// start in the declared time unit (seconds when undeclared).
fn parse_instant(s: &str, c: &FeatureCollection) -> Result<TimeInstant, Failure> {
    if !is_offset_literal(s) {
        return parse_iso(s).ok_or_else(|| usage_error(format!("bad time {s:?}")));
    }
    let (origin, unit) = match &c.bounds {
        Some(b) => (
            b.period.begin,
            TimeUnit::parse(&b.time_unit).unwrap_or_else(TimeUnit::seconds),
        ),
        None => (
            computed_bounds(c)
                .map_err(|_| usage_error("an offset needs a non-empty collection"))?
                .period
                .begin,
            TimeUnit::seconds(),
        ),
    };
    parse_offset(s, &unit)
        .map(|ms| origin.add_millis(ms))
        .ok_or_else(|| usage_error(format!("bad time offset {s:?}")))
}

fn parse_position(s: &str) -> Result<Position, Failure> {
    let coords: Vec<f64> = s
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|w| !w.is_empty())
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| usage_error(format!("bad position {s:?}")))?;
    Position::from_slice(&coords).map_err(|_| usage_error(format!("position {s:?} needs 2 or 3 coordinates")))
}

fn find<'a>(c: &'a FeatureCollection, id: &str) -> Result<&'a MovingFeature, Failure> {
    c.feature(id)
        .ok_or_else(|| data_error(format!("unknown feature {id:?}")))
}

struct QueryArgs<'a> {
    feature: &'a str,
    at: Option<&'a str>,
    what: &'a str,
    other: Option<&'a str>,
    position: Option<&'a str>,
    tolerance: f64,
    from: Option<&'a str>,
    to: Option<&'a str>,
    output_format: FormatArg,
}

fn core_error(e: mf_core::Error) -> Failure {
    usage_error(e.to_string())
}

fn run_query(c: &FeatureCollection, q: &QueryArgs) -> Result<String, Failure> {
    let f = find(c, q.feature)?;
    let at = || -> Result<TimeInstant, Failure> {
        let s =
            q.at.ok_or_else(|| usage_error(format!("--what {} needs --at", q.what)))?;
        parse_instant(s, c)
    };
    let line = match q.what {
        "position" => format_result(location_at(f, at()?), |p| format_coords(p.as_slice())),
        "velocity" => format_result(velocity_at(f, at()?).map_err(core_error)?, |v| {
            format_coords(v.components.components())
        }),
        "speed" => format_result(speed_at(f, at()?).map_err(core_error)?, format_number),
        "acceleration" => format_result(acceleration_at(f, at()?).map_err(core_error)?, |v| {
            format_coords(v.components())
        }),
        "distance" => match q.other {
            Some(other) => {
                let g = find(c, other)?;
                format_result(distance_between(f, g, at()?).map_err(core_error)?, format_number)
            }
            None => {
                let curve = time_to_distance(f).map_err(core_error)?;
                format_result(curve.distance_at(at()?), format_number)
            }
        },
        "time" => {
            let p = parse_position(q.position.ok_or_else(|| usage_error("--what time needs --position"))?)?;
            let times = time_at_position(f, &p, q.tolerance).map_err(core_error)?;
            times.into_iter().map(format_iso).collect::<Vec<_>>().join(" ")
        }
        "subtrajectory" => {
            let from = parse_instant(q.from.ok_or_else(|| usage_error("subtrajectory needs --from"))?, c)?;
            let to = parse_instant(q.to.ok_or_else(|| usage_error("subtrajectory needs --to"))?, c)?;
            let sub = sub_trajectory(f, from, to).map_err(core_error)?;
            let target = q.output_format.resolve().unwrap_or(Format::Json);
            let result = transcode(&FeatureCollection::new(vec![sub]), target, false);
            print_diagnostics(&result.report.losses);
            return result
                .document
                .ok_or_else(|| data_error(format!("refused: the subtrajectory cannot be written as {target}")));
        }
        name => {
            let p = f
                .property(name)
                .ok_or_else(|| data_error(format!("feature {} has no property {name:?}", f.id)))?;
            format_result(value_at(p, at()?), |v| format_scalar(&v))
        }
    };
    Ok(line + "\n")
}

fn cmd_info(input: &Path, format: FormatArg) -> CmdResult {
    let (parsed, _) = load(input, format)?;
    let c = parsed.collection;
    let mut out = String::from("feature\tsamples\ttracks\tduration_s\tlength\tproperties\n");
    for f in &c.features {
        let duration = f
            .geometry
            .period()
            .map_or("-".to_string(), |p| format_number(p.duration_ms() as f64 / 1000.0));
        let length = match time_to_distance(f) {
            Ok(curve) => format_number(curve.final_distance()),
            Err(_) => "-".to_string(),
        };
        let props: Vec<&str> = f.temporal_properties.iter().map(|p| p.name.as_str()).collect();
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{duration}\t{length}\t{}",
            f.id,
            f.geometry.sample_count(),
            f.geometry.tracks.len(),
            if props.is_empty() {
                "-".to_string()
            } else {
                props.join(",")
            }
        );
    }
    if let Ok(b) = computed_bounds(&c) {
        let _ = writeln!(
            out,
            "bounds\t{}\t{}\t{}\t{}",
            format_coords(b.lower.as_slice()),
            format_coords(b.upper.as_slice()),
            format_iso(b.period.begin),
            format_iso(b.period.end)
        );
    }
    emit(None, &out)?;
    Ok(0)
}

/// `LINESTRING (x y, ...)`, or `LINESTRING Z (...)` for 3D tracks.
pub fn track_wkt(samples: &[(TimeInstant, Position)]) -> String {
    let z = samples.first().is_some_and(|s| s.1.dims() == 3);
    let points: Vec<String> = samples
        .iter()
        .map(|(_, p)| p.as_slice().iter().map(f64::to_string).collect::<Vec<_>>().join(" "))
        .collect();
    format!("LINESTRING{} ({})", if z { " Z" } else { "" }, points.join(", "))
}

fn cmd_export_wkt(input: &Path, format: FormatArg, output: Option<&Path>) -> CmdResult {
    let (parsed, _) = load(input, format)?;
    let mut out = String::new();
    for f in &parsed.collection.features {
        if f.geometry.interpolation != InterpolationMode::Linear {
            return Err(data_error(format!(
                "feature {}: {} geometry has no line string form",
                f.id, f.geometry.interpolation
            )));
        }
        for track in &f.geometry.tracks {
            let _ = writeln!(out, "{}\t{}", f.id, track_wkt(&track.samples));
        }
    }
    emit(output, &out)?;
    Ok(0)
}

fn dispatch(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Validate { input, format, strict } => cmd_validate(&input, format, strict),
        Command::Convert {
            input,
            format,
            input_format,
            strict,
            simplify,
            output,
        } => cmd_convert(&input, format, input_format, strict, simplify, output.as_deref()),
        Command::Query {
            input,
            format,
            feature,
            at,
            what,
            other,
            position,
            tolerance,
            from,
            to,
            output_format,
            output,
        } => {
            let (parsed, _) = load(&input, format)?;
            let q = QueryArgs {
                feature: &feature,
                at: at.as_deref(),
                what: &what,
                other: other.as_deref(),
                position: position.as_deref(),
                tolerance,
                from: from.as_deref(),
                to: to.as_deref(),
                output_format,
            };
            let text = run_query(&parsed.collection, &q)?;
            emit(output.as_deref(), &text)?;
            Ok(0)
        }
        Command::Info { input, format } => cmd_info(&input, format),
        Command::ExportWkt { input, format, output } => cmd_export_wkt(&input, format, output.as_deref()),
    }
}

/// Runs the tool on the given arguments (including the program name).
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("mf: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
