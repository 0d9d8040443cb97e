//! The full safe interval for the next setpoint.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{integrate_interval, mirror, AccelerationRange, DecisionGrid, JointState, KinematicLimits};
use crate::profiles::{acc_jerk_window, pos_limit_bound, vel_limit_bound};

// tolerated inversion of the range before a state counts as infeasible
const COLLAPSE_TOL: f64 = 1e-9;

// states at a limit may sit a few ulps outside it after integration
fn nearly_admissible(s: &JointState, l: &KinematicLimits) -> bool {
    let tol = COLLAPSE_TOL;
    let within = |x: f64, lo: f64, hi: f64, scale: f64| x >= lo - tol * scale && x <= hi + tol * scale;
    within(s.p, l.p_min, l.p_max, l.pos_scale())
        && within(s.v, l.v_min, l.v_max, l.vel_scale())
        && within(s.a, l.a_min, l.a_max, l.acc_scale())
}

fn upper(s: &JointState, l: &KinematicLimits, grid: &DecisionGrid) -> Result<f64> {
    let w = acc_jerk_window(s, l, grid.period())?;
    Ok(pos_limit_bound(s, l, grid)?.min(vel_limit_bound(s, l, grid)?).min(w.hi))
}

/// Interval of next setpoints from which all limits can be kept forever.
///
/// The guarantee holds for states reached through this range from an
/// admissible rest state. Other states may be infeasible, which is reported
/// as [`Error::InfeasibleState`].
pub fn safe_acceleration_range(s: &JointState, l: &KinematicLimits, grid: &DecisionGrid) -> Result<AccelerationRange> {
    l.validate()?;
    if !s.is_finite() {
        return Err(Error::NonFinite("state"));
    }
    if !nearly_admissible(s, l) {
        return Err(Error::InadmissibleState);
    }
    let hi = upper(s, l, grid)?;
    let (ms, ml) = mirror(s, l);
    let lo = -upper(&ms, &ml, grid)?;
    let span = l.acc_span();
    if hi - lo < 1e-12 * span {
        if lo - hi > COLLAPSE_TOL * span {
            return Err(Error::InfeasibleState);
        }
        let mid = 0.5 * (lo + hi);
        return Ok(AccelerationRange::new(mid, mid));
    }
    Ok(AccelerationRange::new(lo, hi))
}

/// Quantity a range of setpoints is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Velocity,
    Position,
}

/// Velocity or position interval reached at the next step by the setpoints in `r`.
///
/// Both are affine and increasing in the setpoint, so mapping an action in
/// either space selects the same motion.
pub fn translate_range(s: &JointState, r: AccelerationRange, period: f64, target: Target) -> (f64, f64) {
    let lo = integrate_interval(s, r.lo, period);
    let hi = integrate_interval(s, r.hi, period);
    match target {
        Target::Velocity => (lo.v, hi.v),
        Target::Position => (lo.p, hi.p),
    }
}
