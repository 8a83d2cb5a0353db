//! Evaluation of temporal geometries and properties at arbitrary instants.
//!
//! Stepwise values hold on `[t_i, t_{i+1})`: a change takes effect at its
//! own timestamp. A sample at a track boundary belongs to its track, so
//! evaluating exactly at a track end returns that sample rather than a gap.

use crate::model::{InterpolationMode, Position, TemporalGeometry, TemporalProperty, Track, Value};
use crate::time::TimeInstant;

#[derive(Debug, Clone, PartialEq)]
pub enum SampleResult<T> {
    Value(T),
    /// Between two tracks.
    Gap,
    /// Before the first or after the last sample.
    OutOfRange,
    /// Off-sample query on a discrete series.
    Undefined,
}

impl<T> SampleResult<T> {
    pub fn value(self) -> Option<T> {
        match self {
            SampleResult::Value(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_ref(&self) -> SampleResult<&T> {
        match self {
            SampleResult::Value(v) => SampleResult::Value(v),
            SampleResult::Gap => SampleResult::Gap,
            SampleResult::OutOfRange => SampleResult::OutOfRange,
            SampleResult::Undefined => SampleResult::Undefined,
        }
    }

    pub fn is_value(&self) -> bool {
        matches!(self, SampleResult::Value(_))
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> SampleResult<U> {
        match self {
            SampleResult::Value(v) => SampleResult::Value(f(v)),
            SampleResult::Gap => SampleResult::Gap,
            SampleResult::OutOfRange => SampleResult::OutOfRange,
            SampleResult::Undefined => SampleResult::Undefined,
        }
    }
}

/// Where an instant falls in a strictly increasing timeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Bracket {
    Before,
    After,
    At(usize),
    /// Strictly between sample `i` and `i + 1`.
    Between(usize),
}

pub(crate) fn bracket<T>(samples: &[(TimeInstant, T)], t: TimeInstant) -> Bracket {
    let (Some(first), Some(last)) = (samples.first(), samples.last()) else {
        return Bracket::Before;
    };
    if t < first.0 {
        return Bracket::Before;
    }
    if t > last.0 {
        return Bracket::After;
    }
    // first index with sample time > t; at least 1 because first.0 <= t
    let i = samples.partition_point(|s| s.0 <= t) - 1;
    if samples[i].0 == t {
        Bracket::At(i)
    } else {
        Bracket::Between(i)
    }
}

/// Fraction of the way from `t0` to `t1` at `t`, from exact integer offsets.
pub(crate) fn fraction(t0: TimeInstant, t1: TimeInstant, t: TimeInstant) -> f64 {
    (t.millis() - t0.millis()) as f64 / (t1.millis() - t0.millis()) as f64
}

/// Why no track covers an instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Miss {
    Gap,
    OutOfRange,
}

impl Miss {
    pub(crate) fn result<T>(self) -> SampleResult<T> {
        match self {
            Miss::Gap => SampleResult::Gap,
            Miss::OutOfRange => SampleResult::OutOfRange,
        }
    }
}

/// Index of the track whose `[start, end]` contains `t`, or why none does.
pub(crate) fn locate_track(tracks: &[Track], t: TimeInstant) -> Result<usize, Miss> {
    let nonempty = |tr: &&Track| !tr.is_empty();
    let first = tracks.iter().find(nonempty).and_then(Track::start);
    let last = tracks.iter().rev().find(nonempty).and_then(Track::end);
    match (first, last) {
        (Some(b), Some(e)) if b <= t && t <= e => {}
        _ => return Err(Miss::OutOfRange),
    }
    let k = tracks.partition_point(|tr| tr.start().is_none_or(|s| s <= t));
    let mut k = k.saturating_sub(1);
    while k > 0 && tracks[k].is_empty() {
        k -= 1;
    }
    match tracks[k].period() {
        Some(p) if p.contains(t) => Ok(k),
        _ => Err(Miss::Gap),
    }
}

pub fn position_at(g: &TemporalGeometry, t: TimeInstant) -> SampleResult<Position> {
    let k = match locate_track(&g.tracks, t) {
        Ok(k) => k,
        Err(miss) => return miss.result(),
    };
    let samples = &g.tracks[k].samples;
    match bracket(samples, t) {
        Bracket::At(i) => SampleResult::Value(samples[i].1),
        Bracket::Between(i) => {
            let (t0, p0) = samples[i];
            let (t1, p1) = samples[i + 1];
            match g.interpolation {
                InterpolationMode::Linear => SampleResult::Value(p0.lerp(&p1, fraction(t0, t1, t))),
                InterpolationMode::Stepwise => SampleResult::Value(p0),
                InterpolationMode::Discrete => SampleResult::Undefined,
            }
        }
        Bracket::Before | Bracket::After => SampleResult::OutOfRange,
    }
}

pub fn value_at(p: &TemporalProperty, t: TimeInstant) -> SampleResult<Value> {
    let samples = &p.samples;
    match bracket(samples, t) {
        Bracket::At(i) => SampleResult::Value(samples[i].1.clone()),
        Bracket::Between(i) => match p.interpolation {
            InterpolationMode::Discrete => SampleResult::Undefined,
            InterpolationMode::Stepwise => SampleResult::Value(samples[i].1.clone()),
            InterpolationMode::Linear => {
                let (t0, ref v0) = samples[i];
                let (t1, ref v1) = samples[i + 1];
                SampleResult::Value(interpolate_value(v0, v1, fraction(t0, t1, t)))
            }
        },
        Bracket::Before | Bracket::After => SampleResult::OutOfRange,
    }
}

/// Linear blend of two scalars. Integers blend as reals and round half
/// away from zero; non-numeric values hold the earlier value.
fn interpolate_value(v0: &Value, v1: &Value, fraction: f64) -> Value {
    match (v0, v1) {
        (Value::Integer(a), Value::Integer(b)) => {
            let (a, b) = (*a as f64, *b as f64);
            Value::Integer(libm::round(a + fraction * (b - a)) as i64)
        }
        _ => match (v0.as_f64(), v1.as_f64()) {
            (Some(a), Some(b)) => Value::Real(a + fraction * (b - a)),
            _ => v0.clone(),
        },
    }
}

/// Like [`value_at`], but an off-sample discrete query falls back to the
/// latest sample at or before `t`.
pub fn value_or_held(p: &TemporalProperty, t: TimeInstant) -> SampleResult<Value> {
    match value_at(p, t) {
        SampleResult::Undefined => match bracket(&p.samples, t) {
            Bracket::Between(i) => SampleResult::Value(p.samples[i].1.clone()),
            _ => SampleResult::Undefined,
        },
        r => r,
    }
}
