//! Per-constraint upper bounds on the next acceleration setpoint.
//!
//! Each bound is the largest setpoint after which a braking program exists
//! that respects that one constraint. Position and velocity bounds come from
//! [`position`] and [`velocity`]; the acceleration and jerk limits give the
//! plain one-step window of [`acc_jerk_window`]. Lower bounds are obtained
//! from the mirrored state, see [`crate::mirror`].

mod braking;
mod position;
mod velocity;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{AccelerationRange, DecisionGrid, JointState, KinematicLimits};

pub use position::{pos_limit_bound, pos_limit_profile};
pub use velocity::vel_limit_bound;

/// Smallest grid time `k * T` not earlier than `t`, treating times within
/// `1e-12 * T` of a grid point as on it.
pub fn next_decision_step(t: f64, grid: &DecisionGrid) -> f64 {
    grid_index(t, grid.period()) as f64 * grid.period()
}

pub(crate) fn grid_index(t: f64, period: f64) -> usize {
    ((t - 1e-12 * period) / period).ceil().max(0.0) as usize
}

/// Setpoints reachable in one interval without breaking the acceleration or
/// jerk limits.
pub fn acc_jerk_window(s: &JointState, l: &KinematicLimits, period: f64) -> Result<AccelerationRange> {
    let lo = (s.a + l.j_min * period).max(l.a_min);
    let hi = (s.a + l.j_max * period).min(l.a_max);
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::InadmissibleState);
    }
    Ok(AccelerationRange::new(lo, hi))
}

/// Largest safe next setpoint with respect to the position limit, capped by
/// the acceleration/jerk window.
pub fn pos_limit_max_acc(s: &JointState, l: &KinematicLimits, grid: &DecisionGrid) -> Result<f64> {
    let w = acc_jerk_window(s, l, grid.period())?;
    Ok(pos_limit_bound(s, l, grid)?.min(w.hi))
}

/// Largest safe next setpoint with respect to the velocity limit, capped by
/// the acceleration/jerk window.
pub fn vel_limit_max_acc(s: &JointState, l: &KinematicLimits, grid: &DecisionGrid) -> Result<f64> {
    let w = acc_jerk_window(s, l, grid.period())?;
    Ok(vel_limit_bound(s, l, grid)?.min(w.hi))
}

/// One constant-jerk piece of a braking profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub duration: f64,
    pub jerk: f64,
}

/// Acceleration profile as constant-jerk segments starting from `a0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrakingProfile {
    pub a0: f64,
    pub segments: Vec<Segment>,
}

impl BrakingProfile {
    /// Builds the profile of linearly interpolated setpoints, merging
    /// neighbouring intervals with the same jerk.
    pub fn from_setpoints(a0: f64, setpoints: &[f64], period: f64) -> Self {
        let mut segments: Vec<Segment> = Vec::new();
        let mut prev = a0;
        for &a in setpoints {
            let jerk = (a - prev) / period;
            match segments.last_mut() {
                Some(last) if last.jerk == jerk => last.duration += period,
                _ => segments.push(Segment { duration: period, jerk }),
            }
            prev = a;
        }
        Self { a0, segments }
    }

    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Acceleration at the end of the profile.
    pub fn final_acceleration(&self) -> f64 {
        self.segments.iter().fold(self.a0, |a, s| a + s.jerk * s.duration)
    }
}
