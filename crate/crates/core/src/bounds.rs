use alloc::string::String;

use crate::error::Error;
use crate::model::{FeatureCollection, MovingFeature, Position, STBounds};
use crate::time::{Period, TimeInstant};

/// Tight axis-aligned box over every position and tight period over every
/// geometry and property timestamp in the collection.
pub fn computed_bounds(c: &FeatureCollection) -> Result<STBounds, Error> {
    let mut acc: Option<Accumulator> = None;
    for f in &c.features {
        feature_extent(f, &mut acc)?;
    }
    acc.map(Accumulator::finish).ok_or(Error::EmptyCollection)
}

/// [`computed_bounds`] for a single feature.
pub fn feature_bounds(f: &MovingFeature) -> Result<STBounds, Error> {
    let mut acc = None;
    feature_extent(f, &mut acc)?;
    acc.map(Accumulator::finish).ok_or(Error::EmptyCollection)
}

struct Accumulator {
    lower: Position,
    upper: Position,
    period: Option<Period>,
}

impl Accumulator {
    fn finish(self) -> STBounds {
        STBounds {
            lower: self.lower,
            upper: self.upper,
            period: self.period.expect("accumulator starts from a sample"),
            time_unit: String::from("sec"),
        }
    }

    fn add_time(&mut self, t: TimeInstant) {
        let instant = Period::instant(t);
        self.period = Some(self.period.map_or(instant, |p| p.union(&instant)));
    }
}

fn feature_extent(f: &MovingFeature, acc: &mut Option<Accumulator>) -> Result<(), Error> {
    for &(t, p) in f.geometry.samples() {
        match acc {
            None => {
                *acc = Some(Accumulator {
                    lower: p,
                    upper: p,
                    period: Some(Period::instant(t)),
                })
            }
            Some(a) => {
                if a.lower.dims() != p.dims() {
                    return Err(Error::DimensionalityMismatch {
                        expected: a.lower.dims(),
                        found: p.dims(),
                    });
                }
                for (i, &c) in p.as_slice().iter().enumerate() {
                    if c < a.lower.as_slice()[i] {
                        a.lower.set(i, c);
                    }
                    if c > a.upper.as_slice()[i] {
                        a.upper.set(i, c);
                    }
                }
                a.add_time(t);
            }
        }
    }
    if let Some(a) = acc {
        for t in f.temporal_properties.iter().flat_map(|p| p.times()) {
            a.add_time(t);
        }
    }
    Ok(())
}
