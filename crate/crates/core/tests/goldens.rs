//! Frozen values from the brute-force oracle, checked against the analytic
//! bounds.

use safe_accel::oracle::{brute_force_range, brute_force_upper, Bound};
use safe_accel::{
    acc_jerk_window, next_decision_step, pos_limit_max_acc, safe_acceleration_range, vel_limit_max_acc,
    AccelerationRange, DecisionGrid, Error, JointState, KinematicLimits,
};

fn small() -> KinematicLimits {
    KinematicLimits::new((-1.0, 1.0), (-1.0, 1.0), (-2.0, 2.0), (-10.0, 10.0)).unwrap()
}

fn grid(f: f64) -> DecisionGrid {
    DecisionGrid::new(f).unwrap()
}

fn close(x: f64, golden: f64, l: &KinematicLimits) -> bool {
    (x - golden).abs() <= 1e-6 * l.acc_span()
}

// (f_N, p, v, a, golden)
const POS_SMALL: [(f64, f64, f64, f64, f64); 4] = [
    (10.0, 0.0, 0.0, 0.0, 1.0),
    (10.0, 0.9, 0.2, 0.0, 0.933_333_33),
    (10.0, 0.6, 0.6, 1.0, 1.245_833_33),
    (4.0, 0.3, 0.7, -0.5, 1.583_333_33),
];

const POS_STANDARD: [(f64, f64, f64, f64, f64); 5] = [
    (10.0, 2.5, 1.5, 0.0, 2.5),
    (10.0, 2.6, 1.0, -3.0, 7.0),
    (20.0, 2.5, 1.9, 0.0, 6.4),
    (240.0, 2.7, 1.7, 0.0, 1.666_666_7),
    (240.0, 2.75, 1.2, -6.0, -4.333_333_3),
];

const VEL_STANDARD: [(f64, f64, f64, f64, f64); 4] = [
    // window cap: a + j_max T = 10.5 clipped to a_max
    (10.0, 0.0, 0.8, 0.5, 10.0),
    (10.0, 0.0, 1.5, 0.5, 3.75),
    (20.0, 0.0, 1.8, 2.0, 1.0),
    (240.0, 0.0, 1.85, 5.0, 4.833_333_3),
];

#[test]
fn position_bound_goldens() {
    for (l, table) in [(small(), &POS_SMALL[..]), (KinematicLimits::standard(), &POS_STANDARD[..])] {
        for &(f, p, v, a, golden) in table {
            let s = JointState::new(p, v, a);
            let analytic = pos_limit_max_acc(&s, &l, &grid(f)).unwrap();
            let oracle = brute_force_upper(&s, &l, &grid(f), Bound::Position).unwrap();
            assert!(close(analytic, golden, &l), "{f} Hz {s:?}: {analytic} vs {golden}");
            assert!(close(oracle, golden, &l), "oracle drifted at {f} Hz {s:?}: {oracle}");
        }
    }
}

#[test]
fn velocity_bound_goldens() {
    let cases =
        VEL_STANDARD.iter().map(|c| (KinematicLimits::standard(), *c)).chain([(small(), (4.0, 0.0, 0.5, 1.0, 1.5))]);
    for (l, (f, p, v, a, golden)) in cases {
        let s = JointState::new(p, v, a);
        let analytic = vel_limit_max_acc(&s, &l, &grid(f)).unwrap();
        let oracle = brute_force_upper(&s, &l, &grid(f), Bound::Velocity).unwrap();
        assert!(close(analytic, golden, &l), "{f} Hz {s:?}: {analytic} vs {golden}");
        assert!(close(oracle, golden, &l), "oracle drifted at {f} Hz {s:?}: {oracle}");
    }
}

#[test]
fn too_fast_near_the_limit_is_infeasible() {
    let l = small();
    let s = JointState::new(0.9, 0.5, 0.0);
    assert_eq!(pos_limit_max_acc(&s, &l, &grid(10.0)), Err(Error::InfeasibleState));
    assert_eq!(brute_force_upper(&s, &l, &grid(10.0), Bound::Position), Err(Error::InfeasibleState));
    assert_eq!(safe_acceleration_range(&s, &l, &grid(10.0)), Err(Error::InfeasibleState));
}

#[test]
fn decision_steps() {
    let g = grid(10.0);
    assert_eq!(next_decision_step(0.0, &g), 0.0);
    assert!((next_decision_step(0.25, &g) - 0.3).abs() < 1e-15);
    // within rounding of a grid point counts as on it
    assert!((next_decision_step(0.3 + 1e-15, &g) - 0.3).abs() < 1e-15);
    assert!((next_decision_step(0.30001, &g) - 0.4).abs() < 1e-15);
}

#[test]
fn window_at_rest() {
    let l = KinematicLimits::standard();
    let w = acc_jerk_window(&JointState::rest(0.0), &l, 0.1).unwrap();
    assert_eq!(w, AccelerationRange::new(-10.0, 10.0));
    let w = acc_jerk_window(&JointState::rest(0.0), &l, 1.0 / 240.0).unwrap();
    assert!((w.hi - 400.0 / 240.0).abs() < 1e-12 && (w.lo + 400.0 / 240.0).abs() < 1e-12);
}

#[test]
fn rest_mid_range() {
    let r = safe_acceleration_range(&JointState::rest(0.0), &small(), &grid(10.0)).unwrap();
    assert_eq!((r.lo, r.hi), (-1.0, 1.0));
    let l = KinematicLimits::standard();
    let r = safe_acceleration_range(&JointState::rest(0.0), &l, &grid(10.0)).unwrap();
    assert_eq!((r.lo, r.hi), (-10.0, 10.0));
    assert_eq!(brute_force_range(&JointState::rest(0.0), &l, &grid(10.0)).unwrap(), r);
}

#[test]
fn rest_on_the_limits() {
    let l = KinematicLimits::standard();
    let top = safe_acceleration_range(&JointState::rest(l.p_max), &l, &grid(10.0)).unwrap();
    assert_eq!(top.hi, 0.0);
    assert!(close(top.lo, -10.0, &l));
    let bottom = safe_acceleration_range(&JointState::rest(l.p_min), &l, &grid(10.0)).unwrap();
    assert_eq!(bottom.lo, 0.0);
    assert!(close(bottom.hi, 10.0, &l));
    let o = brute_force_range(&JointState::rest(l.p_max), &l, &grid(10.0)).unwrap();
    assert!(close(o.hi, 0.0, &l) && close(o.lo, -10.0, &l));
}
