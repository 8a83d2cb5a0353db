mod suite;

const CASES: u32 = 10_000;

#[test]
fn interpolation_affinity() {
    suite::interpolation_affinity(CASES).unwrap();
}

#[test]
fn vertex_exactness() {
    suite::vertex_exactness(CASES).unwrap();
}

#[test]
fn stepwise_right_continuity() {
    suite::stepwise_right_continuity(CASES).unwrap();
}

#[test]
fn distance_monotonicity() {
    suite::distance_monotonicity(CASES).unwrap();
}

#[test]
fn sub_trajectory_endpoints() {
    suite::sub_trajectory_endpoints(CASES).unwrap();
}

#[test]
fn distance_metric() {
    suite::distance_metric(CASES).unwrap();
}

#[test]
fn validate_after_operations() {
    suite::validate_after_operations(CASES).unwrap();
}
