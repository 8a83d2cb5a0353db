//! Removal of redundant samples that carry no information.

use alloc::vec::Vec;

use crate::interpolate::fraction;
use crate::model::{InterpolationMode, MovingFeature, Position, TemporalProperty, Track};
use crate::time::TimeInstant;

/// Drops interior vertices of linear tracks that lie exactly on the
/// space-time line between their kept neighbours, and interior stepwise
/// property samples that repeat the previous value. Evaluation at any
/// instant is unchanged.
pub fn simplify_feature(f: &MovingFeature) -> MovingFeature {
    let mut out = f.clone();
    if f.geometry.interpolation == InterpolationMode::Linear {
        for track in &mut out.geometry.tracks {
            *track = simplify_track(track);
        }
    }
    for p in &mut out.temporal_properties {
        if p.interpolation == InterpolationMode::Stepwise {
            drop_repeats(p);
        }
    }
    out
}

fn on_line(from: &(TimeInstant, Position), to: &(TimeInstant, Position), v: &(TimeInstant, Position)) -> bool {
    from.1.lerp(&to.1, fraction(from.0, to.0, v.0)) == v.1
}

fn simplify_track(track: &Track) -> Track {
    let s = &track.samples;
    if s.len() < 3 {
        return track.clone();
    }
    let mut kept = alloc::vec![s[0]];
    let mut pending: Vec<(TimeInstant, Position)> = Vec::new();
    for i in 1..s.len() - 1 {
        let anchor = kept[kept.len() - 1];
        let next = s[i + 1];
        let removable = on_line(&anchor, &next, &s[i]) && pending.iter().all(|v| on_line(&anchor, &next, v));
        if removable {
            pending.push(s[i]);
        } else {
            kept.push(s[i]);
            pending.clear();
        }
    }
    kept.push(s[s.len() - 1]);
    Track::new(kept)
}

fn drop_repeats(p: &mut TemporalProperty) {
    let n = p.samples.len();
    if n < 3 {
        return;
    }
    let mut out = Vec::with_capacity(n);
    for (i, sample) in p.samples.iter().enumerate() {
        let repeat = i > 0 && i + 1 < n && out.last().is_some_and(|prev: &(TimeInstant, _)| prev.1 == sample.1);
        if !repeat {
            out.push(sample.clone());
        }
    }
    p.samples = out;
}
