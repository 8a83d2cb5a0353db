//! Access operations over single features: location, velocity,
//! acceleration, clipping, inverse lookup, travelled distance and
//! feature-to-feature or feature-to-box relations.
//!
//! All quantities are Euclidean in CRS units; speeds are per second.
//! Velocity at a vertex is the right derivative (the following segment),
//! except at the last sample of a track where it is the left derivative.
//! Acceleration of a piecewise-linear path is zero everywhere it is
//! evaluable, vertices included.

use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;
use crate::interpolate::{bracket, fraction, locate_track, position_at, value_at, Bracket, SampleResult};
use crate::model::{InterpolationMode, MovingFeature, Position, STBounds, TemporalGeometry, TemporalProperty, Track};
use crate::time::{Period, TimeInstant};

/// A displacement-like quantity with the same arity as a position.
#[derive(Clone, Copy, PartialEq)]
pub struct Vector {
    coords: [f64; 3],
    dims: u8,
}

impl Vector {
    pub fn zero(dims: usize) -> Self {
        Vector {
            coords: [0.0; 3],
            dims: dims as u8,
        }
    }

    /// `(to - from) * scale`.
    fn scaled_difference(from: &Position, to: &Position, scale: f64) -> Self {
        let mut v = Vector::zero(from.dims());
        for (i, (a, b)) in from.as_slice().iter().zip(to.as_slice()).enumerate() {
            v.coords[i] = (b - a) * scale;
        }
        v
    }

    pub fn components(&self) -> &[f64] {
        &self.coords[..self.dims as usize]
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.components().iter().map(|c| c * c).sum())
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.components()).finish()
    }
}

/// Velocity in CRS units per second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityVector {
    pub components: Vector,
    /// Euclidean norm of `components`.
    pub speed: f64,
}

pub fn location_at(f: &MovingFeature, t: TimeInstant) -> SampleResult<Position> {
    position_at(&f.geometry, t)
}

fn require_linear(g: &TemporalGeometry) -> Result<(), Error> {
    match g.interpolation {
        InterpolationMode::Linear => Ok(()),
        other => Err(Error::UnsupportedInterpolation(other)),
    }
}

pub fn velocity_at(f: &MovingFeature, t: TimeInstant) -> Result<SampleResult<VelocityVector>, Error> {
    let g = &f.geometry;
    require_linear(g)?;
    let k = match locate_track(&g.tracks, t) {
        Ok(k) => k,
        Err(miss) => return Ok(miss.result()),
    };
    let samples = &g.tracks[k].samples;
    if samples.len() < 2 {
        return Ok(SampleResult::Undefined);
    }
    let i = match bracket(samples, t) {
        Bracket::At(i) if i + 1 == samples.len() => i - 1,
        Bracket::At(i) | Bracket::Between(i) => i,
        Bracket::Before | Bracket::After => return Ok(SampleResult::OutOfRange),
    };
    let (t0, p0) = samples[i];
    let (t1, p1) = samples[i + 1];
    let components = Vector::scaled_difference(&p0, &p1, 1.0 / t1.seconds_since(t0));
    Ok(SampleResult::Value(VelocityVector {
        components,
        speed: components.norm(),
    }))
}

pub fn speed_at(f: &MovingFeature, t: TimeInstant) -> Result<SampleResult<f64>, Error> {
    Ok(velocity_at(f, t)?.map(|v| v.speed))
}

pub fn acceleration_at(f: &MovingFeature, t: TimeInstant) -> Result<SampleResult<Vector>, Error> {
    require_linear(&f.geometry)?;
    Ok(position_at(&f.geometry, t).map(|p| Vector::zero(p.dims())))
}

/// Position on one track, assuming `t` lies within it.
fn track_position(track: &Track, mode: InterpolationMode, t: TimeInstant) -> Option<Position> {
    let samples = &track.samples;
    match bracket(samples, t) {
        Bracket::At(i) => Some(samples[i].1),
        Bracket::Between(i) => match mode {
            InterpolationMode::Linear => {
                let (t0, p0) = samples[i];
                let (t1, p1) = samples[i + 1];
                Some(p0.lerp(&p1, fraction(t0, t1, t)))
            }
            InterpolationMode::Stepwise => Some(samples[i].1),
            InterpolationMode::Discrete => None,
        },
        Bracket::Before | Bracket::After => None,
    }
}

fn clip_track(track: &Track, mode: InterpolationMode, window: &Period) -> Option<Track> {
    let span = track.period()?.intersection(window)?;
    if mode == InterpolationMode::Linear && span.begin == span.end {
        return None;
    }
    let mut samples = Vec::new();
    if mode != InterpolationMode::Discrete {
        samples.push((span.begin, track_position(track, mode, span.begin)?));
    }
    samples.extend(
        track
            .samples
            .iter()
            .filter(|(t, _)| {
                if mode == InterpolationMode::Discrete {
                    span.contains(*t)
                } else {
                    span.begin < *t && *t < span.end
                }
            })
            .copied(),
    );
    if mode != InterpolationMode::Discrete && span.end > span.begin {
        samples.push((span.end, track_position(track, mode, span.end)?));
    }
    (!samples.is_empty()).then(|| Track::new(samples))
}

fn clip_property(p: &TemporalProperty, window: &Period) -> TemporalProperty {
    let mut samples = Vec::new();
    let span = p.period().and_then(|pp| pp.intersection(window));
    if let Some(span) = span {
        let carry_begin = p.interpolation != InterpolationMode::Discrete;
        let carry_end = p.interpolation == InterpolationMode::Linear && span.end > span.begin;
        if carry_begin {
            if let Some(v) = value_at(p, span.begin).value() {
                samples.push((span.begin, v));
            }
        }
        samples.extend(
            p.samples
                .iter()
                .filter(|(t, _)| {
                    let after_begin = if carry_begin { *t > span.begin } else { *t >= span.begin };
                    let before_end = if carry_end { *t < span.end } else { *t <= span.end };
                    after_begin && before_end
                })
                .cloned(),
        );
        if carry_end {
            if let Some(v) = value_at(p, span.end).value() {
                samples.push((span.end, v));
            }
        }
    }
    TemporalProperty {
        name: p.name.clone(),
        value_type: p.value_type,
        samples,
        interpolation: p.interpolation,
    }
}

/// The part of `f` within `[t1, t2]`, with interpolated samples inserted at
/// the window edges. Tracks outside the window are dropped; stepwise
/// properties carry their value at `t1` onto `t1`.
pub fn sub_trajectory(f: &MovingFeature, t1: TimeInstant, t2: TimeInstant) -> Result<MovingFeature, Error> {
    if t1 >= t2 {
        return Err(Error::InvalidWindow);
    }
    let window = Period { begin: t1, end: t2 };
    let mode = f.geometry.interpolation;
    let tracks: Vec<Track> = f
        .geometry
        .tracks
        .iter()
        .filter_map(|tr| clip_track(tr, mode, &window))
        .collect();
    if tracks.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    Ok(MovingFeature {
        id: f.id.clone(),
        geometry: TemporalGeometry::new(tracks, mode),
        temporal_properties: f
            .temporal_properties
            .iter()
            .map(|p| clip_property(p, &window))
            .collect(),
        static_properties: f.static_properties.clone(),
        crs: f.crs.clone(),
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Parameter range `[lo, hi] ⊆ [0, 1]` on segment `p0 → p1` within
/// distance `tol` of `target`.
fn segment_hits(p0: &Position, p1: &Position, target: &Position, tol: f64) -> Option<(f64, f64)> {
    let n = p0.dims().min(target.dims());
    let d: Vec<f64> = (0..n).map(|i| p1.as_slice()[i] - p0.as_slice()[i]).collect();
    let w: Vec<f64> = (0..n).map(|i| p0.as_slice()[i] - target.as_slice()[i]).collect();
    let a = dot(&d, &d);
    let b = 2.0 * dot(&d, &w);
    let c = dot(&w, &w) - tol * tol;
    if a == 0.0 {
        return (c <= 0.0).then_some((0.0, 1.0));
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let r = libm::sqrt(disc);
    let lo = ((-b - r) / (2.0 * a)).max(0.0);
    let hi = ((-b + r) / (2.0 * a)).min(1.0);
    (lo <= hi).then_some((lo, hi))
}

/// Instants at which `f` is within `tol` of `p`: one per contiguous
/// solution interval (its midpoint, snapped to a millisecond that still
/// satisfies the tolerance), sorted ascending.
pub fn time_at_position(f: &MovingFeature, p: &Position, tol: f64) -> Result<Vec<TimeInstant>, Error> {
    let g = &f.geometry;
    require_linear(g)?;
    let tol = tol.max(0.0);
    let mut out = Vec::new();
    for track in &g.tracks {
        // solution intervals in epoch milliseconds
        let mut spans: Vec<(f64, f64)> = Vec::new();
        for pair in track.samples.windows(2) {
            let ((t0, p0), (t1, p1)) = (pair[0], pair[1]);
            if let Some((lo, hi)) = segment_hits(&p0, &p1, p, tol) {
                let base = t0.millis() as f64;
                let len = (t1.millis() - t0.millis()) as f64;
                spans.push((base + lo * len, base + hi * len));
            }
        }
        for &(t, q) in &track.samples {
            if q.distance(p) <= tol {
                let ms = t.millis() as f64;
                spans.push((ms, ms));
            }
        }
        spans.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (lo, hi) in spans {
            match merged.last_mut() {
                Some(last) if lo <= last.1 + 1.0 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        for (lo, hi) in merged {
            if let Some(t) = representative(g, p, tol, lo, hi) {
                out.push(t);
            }
        }
    }
    out.dedup();
    Ok(out)
}

fn representative(g: &TemporalGeometry, p: &Position, tol: f64, lo: f64, hi: f64) -> Option<TimeInstant> {
    let mid = 0.5 * (lo + hi);
    let mut candidates = [
        libm::round(mid),
        libm::floor(mid),
        libm::ceil(mid),
        libm::ceil(lo),
        libm::floor(hi),
    ];
    candidates.sort_by(|a, b| (a - mid).abs().total_cmp(&(b - mid).abs()));
    candidates.into_iter().find_map(|ms| {
        let t = TimeInstant::from_millis(ms as i64);
        let q = position_at(g, t).value()?;
        (q.distance(p) <= tol + 1e-12).then_some(t)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakpoint {
    pub time: TimeInstant,
    /// Cumulative Euclidean path length, CRS units.
    pub distance: f64,
    /// True on the first breakpoint of every track after the first.
    pub after_gap: bool,
}

/// Piecewise-linear map from time to travelled distance, one curve per
/// track. Distance is carried unchanged across gaps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeToDistanceCurve {
    pub breakpoints: Vec<Breakpoint>,
}

impl TimeToDistanceCurve {
    pub fn final_distance(&self) -> f64 {
        self.breakpoints.last().map_or(0.0, |b| b.distance)
    }

    /// Breakpoints split at gaps.
    pub fn curves(&self) -> Vec<&[Breakpoint]> {
        let mut out = Vec::new();
        let mut start = 0;
        for (i, b) in self.breakpoints.iter().enumerate() {
            if b.after_gap && i > start {
                out.push(&self.breakpoints[start..i]);
                start = i;
            }
        }
        if start < self.breakpoints.len() {
            out.push(&self.breakpoints[start..]);
        }
        out
    }

    pub fn distance_at(&self, t: TimeInstant) -> SampleResult<f64> {
        for curve in self.curves() {
            let (first, last) = (curve[0], curve[curve.len() - 1]);
            if t < first.time {
                return if first.after_gap {
                    SampleResult::Gap
                } else {
                    SampleResult::OutOfRange
                };
            }
            if t > last.time {
                continue;
            }
            let i = curve.partition_point(|b| b.time <= t) - 1;
            if curve[i].time == t || i + 1 == curve.len() {
                return SampleResult::Value(curve[i].distance);
            }
            let (b0, b1) = (curve[i], curve[i + 1]);
            let f = fraction(b0.time, b1.time, t);
            return SampleResult::Value(b0.distance + f * (b1.distance - b0.distance));
        }
        SampleResult::OutOfRange
    }
}

pub fn time_to_distance(f: &MovingFeature) -> Result<TimeToDistanceCurve, Error> {
    require_linear(&f.geometry)?;
    let mut breakpoints = Vec::with_capacity(f.geometry.sample_count());
    let mut total = 0.0;
    for (k, track) in f.geometry.tracks.iter().enumerate() {
        let mut prev: Option<Position> = None;
        for &(time, p) in &track.samples {
            if let Some(q) = prev {
                total += q.distance(&p);
            }
            breakpoints.push(Breakpoint {
                time,
                distance: total,
                after_gap: k > 0 && prev.is_none(),
            });
            prev = Some(p);
        }
    }
    Ok(TimeToDistanceCurve { breakpoints })
}

/// Euclidean distance between the two features' locations at `t`.
/// A non-value on either side propagates, OutOfRange taking precedence
/// over Gap over Undefined.
pub fn distance_between(f1: &MovingFeature, f2: &MovingFeature, t: TimeInstant) -> Result<SampleResult<f64>, Error> {
    if let (Some(a), Some(b)) = (f1.geometry.dims(), f2.geometry.dims()) {
        if a != b {
            return Err(Error::DimensionalityMismatch { expected: a, found: b });
        }
    }
    let r1 = location_at(f1, t);
    let r2 = location_at(f2, t);
    Ok(match (r1, r2) {
        (SampleResult::Value(a), SampleResult::Value(b)) => SampleResult::Value(a.distance(&b)),
        (SampleResult::OutOfRange, _) | (_, SampleResult::OutOfRange) => SampleResult::OutOfRange,
        (SampleResult::Gap, _) | (_, SampleResult::Gap) => SampleResult::Gap,
        _ => SampleResult::Undefined,
    })
}

/// Parameter range of segment `p0 → p1` (restricted to `[lo, hi]`) whose
/// points lie inside the box, by per-axis slab clipping.
fn clip_segment_to_box(p0: &Position, p1: &Position, b: &STBounds, mut lo: f64, mut hi: f64) -> bool {
    let n = p0.dims().min(b.lower.dims());
    for i in 0..n {
        let start = p0.as_slice()[i];
        let delta = p1.as_slice()[i] - start;
        let (min, max) = (b.lower.as_slice()[i], b.upper.as_slice()[i]);
        if delta == 0.0 {
            if start < min || start > max {
                return false;
            }
            continue;
        }
        let mut a = (min - start) / delta;
        let mut c = (max - start) / delta;
        if a > c {
            core::mem::swap(&mut a, &mut c);
        }
        lo = lo.max(a);
        hi = hi.min(c);
        if lo > hi {
            return false;
        }
    }
    true
}

/// Whether `f` is inside the spatial box at some evaluable instant of the
/// box's period. Exact per-segment clipping, no sampling.
pub fn intersects_box(f: &MovingFeature, b: &STBounds) -> bool {
    let mode = f.geometry.interpolation;
    f.geometry.tracks.iter().any(|track| {
        let s = &track.samples;
        if s.len() == 1 || mode == InterpolationMode::Discrete {
            return s.iter().any(|(t, p)| b.period.contains(*t) && b.contains_position(p));
        }
        s.windows(2).enumerate().any(|(i, pair)| {
            let ((t0, p0), (t1, p1)) = (pair[0], pair[1]);
            match mode {
                InterpolationMode::Linear => {
                    let Some(span) = Period::new(t0, t1).ok().and_then(|p| p.intersection(&b.period)) else {
                        return false;
                    };
                    let lo = fraction(t0, t1, span.begin);
                    let hi = fraction(t0, t1, span.end);
                    clip_segment_to_box(&p0, &p1, b, lo, hi)
                }
                _ => {
                    let last = i + 2 == s.len();
                    let holds = t0 <= b.period.end && b.period.begin < t1;
                    (holds && b.contains_position(&p0)) || (last && b.period.contains(t1) && b.contains_position(&p1))
                }
            }
        })
    })
}
