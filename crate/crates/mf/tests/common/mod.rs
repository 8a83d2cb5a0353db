//! Fixtures and checks shared by the integration tests.

#![allow(dead_code)]

use mf::transcode::prepare;
use mf::Format;
use mf_core::{FeatureCollection, TimeInstant};

pub const VEHICLES_CSV: &str = include_str!("../data/vehicles.csv");
pub const VEHICLES_XML: &str = include_str!("../data/vehicles.xml");
pub const VEHICLE_JSON: &str = include_str!("../data/vehicle.json");

pub const T0: i64 = 1_310_680_800_000;

pub fn secs(s: i64) -> TimeInstant {
    TimeInstant::from_millis(T0 + s * 1000)
}

pub fn corpus() -> [(Format, &'static str); 3] {
    [
        (Format::Csv, VEHICLES_CSV),
        (Format::Xml, VEHICLES_XML),
        (Format::Json, VEHICLE_JSON),
    ]
}

pub fn parse(format: Format, doc: &str) -> FeatureCollection {
    format.parse(doc).expect("fixture parses").collection
}

/// Prepares `c` for `format`, writes it and parses it back. The result
/// must be sample-equal to the prepared collection.
pub fn round_trip(c: &FeatureCollection, format: Format) -> Result<FeatureCollection, String> {
    let (prepared, losses) = prepare(c, format);
    if let Some(d) = losses.iter().find(|d| d.is_error()) {
        return Err(format!("{format}: refused: {} {}", d.code, d.message));
    }
    let doc = format.write(&prepared).map_err(|e| format!("{format}: write: {e}"))?;
    let back = format
        .parse(&doc)
        .map_err(|e| format!("{format}: reparse: {e}\n{doc}"))?
        .collection;
    if !back.sample_equal(&prepared) {
        return Err(format!(
            "{format}: not sample-equal after reparse\n{prepared:?}\n{back:?}\n{doc}"
        ));
    }
    Ok(prepared)
}
