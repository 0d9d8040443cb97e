#![no_main]

// Raw bytes decoded as a state and a frequency. The range must
// either be an error or an ordered interval inside the jerk window.

use libfuzzer_sys::fuzz_target;
use safe_accel::{acc_jerk_window, safe_acceleration_range, DecisionGrid, JointState, KinematicLimits};

fn f64_at(data: &[u8], i: usize) -> Option<f64> {
    let b = data.get(8 * i..8 * i + 8)?;
    Some(f64::from_le_bytes(b.try_into().ok()?))
}

fuzz_target!(|data: &[u8]| {
    let Some(x) = (0..4).map(|i| f64_at(data, i)).collect::<Option<Vec<_>>>() else { return };
    let s = JointState::new(x[0], x[1], x[2]);
    let l = KinematicLimits::standard();
    let Ok(g) = DecisionGrid::new(x[3].abs().clamp(1.0, 1000.0)) else { return };
    if let Ok(r) = safe_acceleration_range(&s, &l, &g) {
        assert!(r.lo <= r.hi);
        let w = acc_jerk_window(&s, &l, g.period()).unwrap();
        assert!(r.lo >= w.lo - 1e-9 && r.hi <= w.hi + 1e-9);
    }
});
