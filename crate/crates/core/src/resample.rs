//! Union timelines for segment-based encodings.
//!
//! Segment encodings carry one attribute value per segment, so every
//! attribute change needs a segment boundary. The union timeline of a
//! feature is the merged, deduplicated set of geometry and property sample
//! times, restricted to the extent of each track.

use alloc::vec::Vec;

use crate::interpolate::{position_at, value_or_held, SampleResult};
use crate::model::{Position, TemporalGeometry, TemporalProperty, Value};
use crate::time::TimeInstant;

/// Sorted, deduplicated union of geometry and property sample times.
/// Property times that fall in a gap or outside the geometry are dropped.
pub fn resample_times(g: &TemporalGeometry, props: &[TemporalProperty]) -> Vec<TimeInstant> {
    track_timelines(g, props).into_iter().flatten().collect()
}

/// [`resample_times`] split per track.
pub fn track_timelines(g: &TemporalGeometry, props: &[TemporalProperty]) -> Vec<Vec<TimeInstant>> {
    g.tracks
        .iter()
        .map(|track| {
            let Some(period) = track.period() else {
                return Vec::new();
            };
            let mut times: Vec<TimeInstant> = track
                .times()
                .chain(props.iter().flat_map(|p| p.times()).filter(|t| period.contains(*t)))
                .collect();
            times.sort_unstable();
            times.dedup();
            times
        })
        .collect()
}

/// Geometry positions at each time. `None` if some time is not evaluable.
pub fn positions_on(g: &TemporalGeometry, times: &[TimeInstant]) -> Option<Vec<(TimeInstant, Position)>> {
    times
        .iter()
        .map(|&t| position_at(g, t).value().map(|p| (t, p)))
        .collect()
}

/// Property values at each time; discrete series hold their last sample.
/// Times where the property has no value map to the evaluation result.
pub fn values_on(p: &TemporalProperty, times: &[TimeInstant]) -> Vec<SampleResult<Value>> {
    times.iter().map(|&t| value_or_held(p, t)).collect()
}
