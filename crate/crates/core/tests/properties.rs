use proptest::prelude::*;

use safe_accel::oracle::{feasible, horizon_for};
use safe_accel::{
    integrate_interval, map_action, mirror, pos_limit_max_acc, safe_acceleration_range, sample_interval,
    translate_range, vel_limit_max_acc, AccelerationRange, DecisionGrid, JointState, KinematicLimits, Target,
};

fn small() -> KinematicLimits {
    KinematicLimits::new((-1.0, 1.0), (-1.0, 1.0), (-2.0, 2.0), (-10.0, 10.0)).unwrap()
}

fn limits() -> impl Strategy<Value = KinematicLimits> {
    prop_oneof![Just(KinematicLimits::standard()), Just(small())]
}

fn freq() -> impl Strategy<Value = f64> {
    prop_oneof![Just(4.0), Just(10.0), Just(20.0), Just(240.0)]
}

/// A state reached from rest by following the safe range.
fn reached(l: &KinematicLimits, g: &DecisionGrid, p0: f64, actions: &[f64]) -> JointState {
    let mut s = JointState::rest(l.p_min + p0 * l.pos_span());
    for &m in actions {
        let r = safe_acceleration_range(&s, l, g).unwrap();
        s = integrate_interval(&s, map_action(r, m).unwrap().acceleration, g.period());
    }
    s
}

fn scenario() -> impl Strategy<Value = (KinematicLimits, DecisionGrid, JointState)> {
    (limits(), freq(), 0.0..=1.0f64, prop::collection::vec(prop_oneof![Just(1.0), Just(-1.0), -1.0..=1.0f64], 0..120))
        .prop_map(|(l, f, p0, actions)| {
            let g = DecisionGrid::new(f).unwrap();
            let s = reached(&l, &g, p0, &actions);
            (l, g, s)
        })
}

// classical RK4 on (p, v, a) under constant jerk
fn rk4(s: &JointState, jerk: f64, t: f64, n: usize) -> JointState {
    let h = t / n as f64;
    let f = |x: [f64; 3]| [x[1], x[2], jerk];
    let mut x = [s.p, s.v, s.a];
    for _ in 0..n {
        let k1 = f(x);
        let k2 = f([x[0] + 0.5 * h * k1[0], x[1] + 0.5 * h * k1[1], x[2] + 0.5 * h * k1[2]]);
        let k3 = f([x[0] + 0.5 * h * k2[0], x[1] + 0.5 * h * k2[1], x[2] + 0.5 * h * k2[2]]);
        let k4 = f([x[0] + h * k3[0], x[1] + h * k3[1], x[2] + h * k3[2]]);
        for i in 0..3 {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    JointState::new(x[0], x[1], x[2])
}

proptest! {
    #[test]
    fn action_map_is_monotone_and_onto(lo in -10.0..10.0f64, w in 0.0..10.0f64, m1 in -1.0..=1.0f64, m2 in -1.0..=1.0f64) {
        let r = AccelerationRange::new(lo, lo + w);
        let (x1, x2) = (map_action(r, m1).unwrap().acceleration, map_action(r, m2).unwrap().acceleration);
        prop_assert!(r.contains(x1) && r.contains(x2));
        if m1 <= m2 {
            prop_assert!(x1 <= x2);
        }
        prop_assert_eq!(map_action(r, -1.0).unwrap().acceleration, r.lo);
        prop_assert_eq!(map_action(r, 1.0).unwrap().acceleration, r.hi);
    }

    #[test]
    fn mirror_is_an_involution(p in -2.0..2.0f64, v in -2.0..2.0f64, a in -9.0..9.0f64) {
        let s = JointState::new(p, v, a);
        let l = KinematicLimits::standard();
        let (ms, ml) = mirror(&s, &l);
        prop_assert_eq!(mirror(&ms, &ml), (s, l));
    }

    #[test]
    fn samples_match_a_numerical_integrator(
        p in -2.0..2.0f64, v in -2.0..2.0f64, a in -10.0..10.0f64, a1 in -10.0..10.0f64, f in freq()
    ) {
        let s = JointState::new(p, v, a);
        let t = 1.0 / f;
        let samples = sample_interval(&s, a1, t, 8);
        let jerk = (a1 - a) / t;
        for x in &samples {
            let r = rk4(&s, jerk, x.t, 64);
            let scale = 1.0 + r.p.abs().max(r.v.abs()).max(r.a.abs());
            prop_assert!((x.p - r.p).abs() <= 1e-9 * scale);
            prop_assert!((x.v - r.v).abs() <= 1e-9 * scale);
            prop_assert!((x.a - r.a).abs() <= 1e-9 * scale);
        }
        prop_assert_eq!(samples.last().map(|x| (x.p, x.v, x.a)), {
            let e = integrate_interval(&s, a1, t);
            Some((e.p, e.v, e.a))
        });
    }

    #[test]
    fn range_is_mirror_symmetric((l, g, s) in scenario()) {
        let r = safe_acceleration_range(&s, &l, &g).unwrap();
        let (ms, ml) = mirror(&s, &l);
        let m = safe_acceleration_range(&ms, &ml, &g).unwrap();
        let tol = 1e-9 * l.acc_span();
        prop_assert!((r.lo + m.hi).abs() <= tol && (r.hi + m.lo).abs() <= tol, "{:?} vs {:?}", r, m);
    }

    #[test]
    fn translation_commutes_with_the_action_map((l, g, s) in scenario(), m in -1.0..=1.0f64) {
        let r = safe_acceleration_range(&s, &l, &g).unwrap();
        let a = map_action(r, m).unwrap().acceleration;
        let next = integrate_interval(&s, a, g.period());
        let (vlo, vhi) = translate_range(&s, r, g.period(), Target::Velocity);
        let (plo, phi) = translate_range(&s, r, g.period(), Target::Position);
        let vm = vlo + 0.5 * (1.0 + m) * (vhi - vlo);
        let pm = plo + 0.5 * (1.0 + m) * (phi - plo);
        prop_assert!((vm - next.v).abs() <= 1e-12 * (1.0 + next.v.abs()));
        prop_assert!((pm - next.p).abs() <= 1e-12 * (1.0 + next.p.abs()));
    }

    #[test]
    fn range_sits_under_each_bound((l, g, s) in scenario()) {
        let r = safe_acceleration_range(&s, &l, &g).unwrap();
        let tol = 1e-9 * l.acc_span();
        prop_assert!(r.hi <= pos_limit_max_acc(&s, &l, &g).unwrap() + tol);
        prop_assert!(r.hi <= vel_limit_max_acc(&s, &l, &g).unwrap() + tol);
        prop_assert!(r.lo <= r.hi);
    }

    #[test]
    fn upper_end_is_the_oracle_boundary((l, g, s) in scenario()) {
        let r = safe_acceleration_range(&s, &l, &g).unwrap();
        let h = horizon_for(&l, g.period());
        prop_assert!(feasible(&s, r.hi, &l, &g, h));
        prop_assert!(feasible(&s, r.lo, &l, &g, h));
        let step = 2e-6 * l.acc_span();
        prop_assert!(!feasible(&s, r.hi + step, &l, &g, h));
        prop_assert!(!feasible(&s, r.lo - step, &l, &g, h));
    }
}
