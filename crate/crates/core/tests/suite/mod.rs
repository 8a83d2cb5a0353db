//! Random feature generators and the property checks run over them.
//! Shared by this crate's property tests and the `mf` acceptance run.

#![allow(dead_code)]

use mf_core::access::{distance_between, location_at, speed_at, sub_trajectory, time_to_distance};
use mf_core::interpolate::{position_at, value_at};
use mf_core::simplify::simplify_feature;
use mf_core::validate::validate_feature;
use mf_core::{
    FeatureCollection, InterpolationMode, MovingFeature, Position, SampleResult, TemporalGeometry, TemporalProperty,
    TimeInstant, Track, Value, ValueType,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub const BASE_MS: i64 = 1_300_000_000_000;
const LABELS: [&str; 4] = ["eco", "sport", "normal", "tow"];

/// Raw draws for one feature; turned into a feature by [`build`].
#[derive(Debug, Clone)]
pub struct Draw {
    pub dims: usize,
    pub sizes: Vec<usize>,
    pub steps: Vec<i64>,
    pub coords: Vec<f64>,
    pub ints: Vec<i64>,
    pub reals: Vec<f64>,
    pub keep: Vec<bool>,
    pub shifts: Vec<f64>,
}

fn draw(dims: usize, max_tracks: usize, max_samples: usize) -> impl Strategy<Value = Draw> {
    prop::collection::vec(2usize..=max_samples, 1..=max_tracks).prop_flat_map(move |sizes| {
        let total: usize = sizes.iter().sum();
        (
            Just(sizes),
            prop::collection::vec(1i64..=120_000, total),
            prop::collection::vec(-1000.0f64..1000.0, total * dims),
            prop::collection::vec(-50i64..50, total),
            prop::collection::vec(-1e6f64..1e6, total),
            prop::collection::vec(any::<bool>(), total),
            prop::collection::vec(0.0f64..1.0, total),
        )
            .prop_map(move |(sizes, steps, coords, ints, reals, keep, shifts)| Draw {
                dims,
                sizes,
                steps,
                coords,
                ints,
                reals,
                keep,
                shifts,
            })
    })
}

/// Builds a valid feature: linear geometry with the given track sizes, a
/// stepwise integer `gear`, a linear real `level` and a stepwise text
/// `mode`. Property samples sit at or after the first vertex of each
/// track and never leave a track, so they need not cover its ends.
pub fn build(id: &str, d: &Draw) -> MovingFeature {
    let mut t = BASE_MS;
    let mut k = 0;
    let mut tracks = Vec::new();
    let mut gear = Vec::new();
    let mut level = Vec::new();
    let mut mode = Vec::new();
    for &n in &d.sizes {
        let mut samples = Vec::with_capacity(n);
        let start = k;
        for _ in 0..n {
            t += d.steps[k];
            let p = Position::from_slice(&d.coords[k * d.dims..(k + 1) * d.dims]).expect("2 or 3");
            samples.push((TimeInstant::from_millis(t), p));
            k += 1;
        }
        for i in 0..n {
            let j = start + i;
            if i > 0 && !d.keep[j] {
                continue;
            }
            let at = if i + 1 < n {
                let span = (samples[i + 1].0.millis() - samples[i].0.millis()) as f64;
                samples[i].0.add_millis((d.shifts[j] * span) as i64)
            } else {
                samples[i].0
            };
            gear.push((at, Value::Integer(d.ints[j])));
            level.push((at, Value::Real(d.reals[j])));
            mode.push((
                at,
                Value::Text(LABELS[d.ints[j].unsigned_abs() as usize % LABELS.len()].to_string()),
            ));
        }
        tracks.push(Track::new(samples));
        t += 1;
    }
    MovingFeature::new(id, TemporalGeometry::new(tracks, InterpolationMode::Linear))
        .with_property(TemporalProperty::new(
            "gear",
            ValueType::Integer,
            gear,
            InterpolationMode::Stepwise,
        ))
        .with_property(TemporalProperty::new(
            "level",
            ValueType::Real,
            level,
            InterpolationMode::Linear,
        ))
        .with_property(TemporalProperty::new(
            "mode",
            ValueType::Text,
            mode,
            InterpolationMode::Stepwise,
        ))
}

pub fn arb_feature(max_tracks: usize) -> impl Strategy<Value = MovingFeature> {
    (2usize..=3)
        .prop_flat_map(move |dims| draw(dims, max_tracks, 8))
        .prop_map(|d| build("F", &d))
}

/// Extends every property to both ends of every track by repeating its
/// nearest value there. Segment encodings need a value on every segment.
pub fn cover_tracks(mut f: MovingFeature) -> MovingFeature {
    let periods: Vec<_> = f.geometry.tracks.iter().filter_map(Track::period).collect();
    for p in &mut f.temporal_properties {
        let mut samples = Vec::with_capacity(p.samples.len() + 2 * periods.len());
        for per in &periods {
            let inside: Vec<_> = p.samples.iter().filter(|s| per.contains(s.0)).cloned().collect();
            let (Some(first), Some(last)) = (inside.first().cloned(), inside.last().cloned()) else {
                continue;
            };
            if first.0 > per.begin {
                samples.push((per.begin, first.1));
            }
            samples.extend(inside);
            if last.0 < per.end {
                samples.push((per.end, last.1));
            }
        }
        p.samples = samples;
    }
    f
}

pub fn arb_covered_feature(max_tracks: usize) -> impl Strategy<Value = MovingFeature> {
    arb_feature(max_tracks).prop_map(cover_tracks)
}

/// Three features of equal dimension that share one start instant.
pub fn arb_triple() -> impl Strategy<Value = [MovingFeature; 3]> {
    (2usize..=3)
        .prop_flat_map(|dims| (draw(dims, 2, 6), draw(dims, 2, 6), draw(dims, 2, 6)))
        .prop_map(|(a, b, c)| [build("A", &a), build("B", &b), build("C", &c)])
}

/// A feature and an instant within (or slightly around) its period.
pub fn arb_feature_at(max_tracks: usize) -> impl Strategy<Value = (MovingFeature, TimeInstant)> {
    (arb_feature(max_tracks), -0.05f64..1.05).prop_map(|(f, u)| {
        let p = f.geometry.period().expect("non-empty");
        let t = p.begin.millis() + (u * p.duration_ms() as f64) as i64;
        (f, TimeInstant::from_millis(t))
    })
}

pub fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-9 * scale.max(1.0)
}

fn very_close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-12 * scale.max(1.0)
}

fn no_errors(f: &MovingFeature, after: &str) -> Result<(), TestCaseError> {
    let errors: Vec<_> = validate_feature(f).into_iter().filter(|d| d.is_error()).collect();
    prop_assert!(errors.is_empty(), "invalid after {}: {:?}", after, errors);
    Ok(())
}

/// Between two vertices a linear position is the affine blend of them,
/// and so is a linear real property between its samples.
pub fn interpolation_affinity(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&arb_feature_at(3), |(f, t)| {
            for track in &f.geometry.tracks {
                for w in track.samples.windows(2) {
                    let ((t0, p0), (t1, p1)) = (w[0], w[1]);
                    if t0 < t && t < t1 {
                        let lambda = (t.millis() - t0.millis()) as f64 / (t1.millis() - t0.millis()) as f64;
                        let got = position_at(&f.geometry, t).value().expect("inside a track");
                        for i in 0..p0.dims() {
                            let (a, b) = (p0.as_slice()[i], p1.as_slice()[i]);
                            prop_assert!(very_close(
                                got.as_slice()[i],
                                a + lambda * (b - a),
                                a.abs().max(b.abs())
                            ));
                            prop_assert!(got.as_slice()[i] >= a.min(b) && got.as_slice()[i] <= a.max(b));
                        }
                    }
                }
            }
            let level = f.property("level").unwrap();
            for w in level.samples.windows(2) {
                let ((t0, Value::Real(a)), (t1, Value::Real(b))) = (&w[0], &w[1]) else {
                    unreachable!()
                };
                if *t0 < t && t < *t1 {
                    let lambda = (t.millis() - t0.millis()) as f64 / (t1.millis() - t0.millis()) as f64;
                    let Some(Value::Real(got)) = value_at(level, t).value() else {
                        return Err(TestCaseError::fail("linear value missing"));
                    };
                    prop_assert!(very_close(got, a + lambda * (b - a), a.abs().max(b.abs())));
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Evaluation at a sample instant returns that sample exactly.
pub fn vertex_exactness(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&arb_feature(3), |f| {
            for &(t, p) in f.geometry.samples() {
                prop_assert_eq!(location_at(&f, t), SampleResult::Value(p));
            }
            for p in &f.temporal_properties {
                for (t, v) in &p.samples {
                    prop_assert_eq!(value_at(p, *t), SampleResult::Value(v.clone()));
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// A stepwise value takes effect at its own timestamp and holds until,
/// but not at, the next one.
pub fn stepwise_right_continuity(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(arb_feature(2), 0.0f64..1.0), |(f, u)| {
            let mut g = f.geometry.clone();
            g.interpolation = InterpolationMode::Stepwise;
            for track in &g.tracks {
                for w in track.samples.windows(2) {
                    let ((t0, p0), (t1, _)) = (w[0], w[1]);
                    let inside = t0.add_millis(((t1.millis() - t0.millis()) as f64 * u) as i64);
                    prop_assert_eq!(position_at(&g, t0), SampleResult::Value(p0));
                    prop_assert_eq!(position_at(&g, inside), SampleResult::Value(p0));
                    prop_assert_eq!(position_at(&g, t1.add_millis(-1)), SampleResult::Value(p0));
                }
            }
            let gear = f.property("gear").unwrap();
            for w in gear.samples.windows(2) {
                let ((t0, v0), (t1, v1)) = (&w[0], &w[1]);
                prop_assert_eq!(value_at(gear, t1.add_millis(-1)), SampleResult::Value(v0.clone()));
                prop_assert_eq!(value_at(gear, *t1), SampleResult::Value(v1.clone()));
                let mid = t0.add_millis(((t1.millis() - t0.millis()) as f64 * u) as i64);
                prop_assert_eq!(value_at(gear, mid), SampleResult::Value(v0.clone()));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Travelled distance never decreases, reaches the summed segment
/// lengths, and is matched by integrating the speed.
pub fn distance_monotonicity(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(
            &(arb_feature(3), prop::collection::vec(0.0f64..1.0, 1..20)),
            |(f, mut us)| {
                let curve = time_to_distance(&f).unwrap();
                let period = f.geometry.period().unwrap();
                us.sort_by(f64::total_cmp);
                let mut last = 0.0;
                for u in us {
                    let t = period.begin.add_millis((u * period.duration_ms() as f64) as i64);
                    match curve.distance_at(t) {
                        SampleResult::Value(d) => {
                            prop_assert!(d >= last, "distance fell from {} to {}", last, d);
                            last = d;
                        }
                        SampleResult::Gap => {}
                        other => return Err(TestCaseError::fail(format!("{other:?} inside the period"))),
                    }
                }
                let total: f64 = f
                    .geometry
                    .tracks
                    .iter()
                    .flat_map(|tr| tr.samples.windows(2).map(|w| w[0].1.distance(&w[1].1)))
                    .sum();
                prop_assert!(close(curve.final_distance(), total, total));
                prop_assert!(last <= curve.final_distance());
                let mut integral = 0.0;
                for track in &f.geometry.tracks {
                    for w in track.samples.windows(2) {
                        let speed = speed_at(&f, w[0].0).unwrap().value().unwrap();
                        integral += speed * w[1].0.seconds_since(w[0].0);
                    }
                }
                prop_assert!(close(integral, total, total));
                Ok(())
            },
        )
        .map_err(|e| e.to_string())
}

/// A subtrajectory agrees with the original at its window edges and
/// everywhere inside, and is itself valid.
pub fn sub_trajectory_endpoints(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(arb_feature(3), -0.1f64..1.1, -0.1f64..1.1), |(f, a, b)| {
            let period = f.geometry.period().unwrap();
            let at = |u: f64| period.begin.add_millis((u * period.duration_ms() as f64) as i64);
            let (t1, t2) = (at(a.min(b)), at(a.max(b)));
            let Ok(sub) = sub_trajectory(&f, t1, t2) else {
                return Ok(());
            };
            no_errors(&sub, "sub_trajectory")?;
            let sp = sub.geometry.period().unwrap();
            prop_assert!(sp.begin >= t1 && sp.end <= t2);
            prop_assert_eq!(location_at(&sub, sp.begin), location_at(&f, sp.begin));
            prop_assert_eq!(location_at(&sub, sp.end), location_at(&f, sp.end));
            let mid = TimeInstant::from_millis((sp.begin.millis() + sp.end.millis()) / 2);
            if let (SampleResult::Value(p), SampleResult::Value(q)) = (location_at(&sub, mid), location_at(&f, mid)) {
                for (x, y) in p.as_slice().iter().zip(q.as_slice()) {
                    prop_assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0), "{:?} vs {:?}", p, q);
                }
            }
            for p in &sub.temporal_properties {
                let orig = f.property(&p.name).unwrap();
                for (t, v) in &p.samples {
                    prop_assert_eq!(value_at(orig, *t), SampleResult::Value(v.clone()));
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Distance between features is symmetric and obeys the triangle
/// inequality.
pub fn distance_metric(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(arb_triple(), 0.0f64..1.0), |([a, b, c], u)| {
            let end = [&a, &b, &c]
                .iter()
                .map(|f| f.geometry.period().unwrap().end.millis())
                .min()
                .unwrap();
            let begin = [&a, &b, &c]
                .iter()
                .map(|f| f.geometry.period().unwrap().begin.millis())
                .max()
                .unwrap();
            let t = TimeInstant::from_millis(begin + ((end - begin).max(0) as f64 * u) as i64);
            let ab = distance_between(&a, &b, t).unwrap();
            prop_assert_eq!(ab.clone(), distance_between(&b, &a, t).unwrap());
            let bc = distance_between(&b, &c, t).unwrap();
            let ac = distance_between(&a, &c, t).unwrap();
            if let (SampleResult::Value(ab), SampleResult::Value(bc), SampleResult::Value(ac)) = (ab, bc, ac) {
                prop_assert!(ab >= 0.0);
                prop_assert!(ac <= ab + bc + 1e-9 * (ab + bc).max(1.0));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Every operation that builds a feature yields a valid one.
pub fn validate_after_operations(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(arb_feature(3), 0.0f64..1.0, 0.0f64..1.0), |(f, a, b)| {
            no_errors(&f, "generation")?;
            let simplified = simplify_feature(&f);
            no_errors(&simplified, "simplify")?;
            for &(t, p) in f.geometry.samples() {
                prop_assert_eq!(location_at(&simplified, t), SampleResult::Value(p));
            }
            let period = f.geometry.period().unwrap();
            let at = |u: f64| period.begin.add_millis((u * period.duration_ms() as f64) as i64);
            if let Ok(sub) = sub_trajectory(&f, at(a.min(b)), at(a.max(b))) {
                no_errors(&sub, "sub_trajectory")?;
                no_errors(&simplify_feature(&sub), "sub_trajectory then simplify")?;
            }
            let c = FeatureCollection::new(vec![f]);
            prop_assert!(mf_core::validate::validate_collection(&c).iter().all(|d| !d.is_error()));
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub type Check = fn(u32) -> Result<(), String>;

pub const PROPERTIES: [(&str, Check); 7] = [
    ("interpolation affinity", interpolation_affinity),
    ("sample-exactness at vertices", vertex_exactness),
    ("stepwise right-continuity", stepwise_right_continuity),
    ("time_to_distance monotonicity", distance_monotonicity),
    ("sub_trajectory endpoint agreement", sub_trajectory_endpoints),
    ("distance_between symmetry and triangle inequality", distance_metric),
    ("validate after every operation", validate_after_operations),
];
