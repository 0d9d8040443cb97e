//! Domain types, the action mapping and exact integration of linearly
//! interpolated acceleration setpoints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-joint bounds on position, velocity, acceleration and jerk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinematicLimits {
    pub p_min: f64,
    pub p_max: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub j_min: f64,
    pub j_max: f64,
}

impl KinematicLimits {
    /// Builds and validates a set of limits from `(min, max)` pairs.
    pub fn new(p: (f64, f64), v: (f64, f64), a: (f64, f64), j: (f64, f64)) -> Result<Self> {
        let limits =
            Self { p_min: p.0, p_max: p.1, v_min: v.0, v_max: v.1, a_min: a.0, a_max: a.1, j_min: j.0, j_max: j.1 };
        limits.validate()?;
        Ok(limits)
    }

    /// Representative limits for a single robot joint: p in [-2.9, 2.9] rad,
    /// v in [-1.9, 1.9] rad/s, a in [-10, 10] rad/s^2, j in [-400, 400] rad/s^3.
    pub fn standard() -> Self {
        Self {
            p_min: -2.9,
            p_max: 2.9,
            v_min: -1.9,
            v_max: 1.9,
            a_min: -10.0,
            a_max: 10.0,
            j_min: -400.0,
            j_max: 400.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.p_min, self.p_max, self.v_min, self.v_max, self.a_min, self.a_max, self.j_min, self.j_max];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidLimits("limits must be finite".into()));
        }
        if self.p_min >= self.p_max {
            return Err(Error::InvalidLimits("need p_min < p_max".into()));
        }
        for (name, lo, hi) in
            [("v", self.v_min, self.v_max), ("a", self.a_min, self.a_max), ("j", self.j_min, self.j_max)]
        {
            if !(lo < 0.0 && hi > 0.0) {
                return Err(Error::InvalidLimits(format!("need {name}_min < 0 < {name}_max")));
            }
        }
        Ok(())
    }

    /// Width of the acceleration interval, the natural scale for setpoint tolerances.
    pub fn acc_span(&self) -> f64 {
        self.a_max - self.a_min
    }

    pub fn pos_span(&self) -> f64 {
        self.p_max - self.p_min
    }

    pub fn pos_scale(&self) -> f64 {
        self.p_min.abs().max(self.p_max.abs())
    }

    pub fn vel_scale(&self) -> f64 {
        self.v_max.max(-self.v_min)
    }

    pub fn acc_scale(&self) -> f64 {
        self.a_max.max(-self.a_min)
    }

    pub fn jerk_scale(&self) -> f64 {
        self.j_max.max(-self.j_min)
    }
}

/// Position, velocity and acceleration of one joint at a decision step.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct JointState {
    pub p: f64,
    pub v: f64,
    pub a: f64,
}

impl JointState {
    pub fn new(p: f64, v: f64, a: f64) -> Self {
        Self { p, v, a }
    }

    pub fn rest(p: f64) -> Self {
        Self { p, v: 0.0, a: 0.0 }
    }

    pub fn is_finite(&self) -> bool {
        self.p.is_finite() && self.v.is_finite() && self.a.is_finite()
    }

    pub fn is_admissible(&self, limits: &KinematicLimits) -> bool {
        self.is_finite()
            && (limits.p_min..=limits.p_max).contains(&self.p)
            && (limits.v_min..=limits.v_max).contains(&self.v)
            && (limits.a_min..=limits.a_max).contains(&self.a)
    }
}

/// Decision times `t_k = k * period`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionGrid {
    f_n: f64,
    period: f64,
}

impl DecisionGrid {
    pub fn new(f_n: f64) -> Result<Self> {
        if !(f_n.is_finite() && f_n > 0.0) {
            return Err(Error::InvalidGrid(format!("frequency must be positive, got {f_n}")));
        }
        Ok(Self { f_n, period: 1.0 / f_n })
    }

    pub fn from_period(period: f64) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGrid(format!("period must be positive, got {period}")));
        }
        Ok(Self { f_n: 1.0 / period, period })
    }

    pub fn frequency(&self) -> f64 {
        self.f_n
    }

    pub fn period(&self) -> f64 {
        self.period
    }
}

/// Closed interval of acceleration setpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccelerationRange {
    pub lo: f64,
    pub hi: f64,
}

impl AccelerationRange {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, a: f64) -> bool {
        a >= self.lo && a <= self.hi
    }
}

/// Result of [`map_action`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappedAction {
    pub acceleration: f64,
    /// Set when the action was outside [-1, 1] and had to be clamped.
    pub clamped: bool,
}

/// Maps an action `m` in [-1, 1] affinely onto `range`.
///
/// Out-of-range actions are clamped and flagged. NaN is rejected.
pub fn map_action(range: AccelerationRange, m: f64) -> Result<MappedAction> {
    if m.is_nan() {
        return Err(Error::NonFinite("action"));
    }
    let clamped_m = m.clamp(-1.0, 1.0);
    let acceleration = if clamped_m == 1.0 {
        range.hi
    } else if clamped_m == -1.0 {
        range.lo
    } else {
        range.lo + 0.5 * (1.0 + clamped_m) * (range.hi - range.lo)
    };
    Ok(MappedAction { acceleration, clamped: clamped_m != m })
}

/// One dense sample of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub p: f64,
    pub v: f64,
    pub a: f64,
    pub j: f64,
}

#[inline]
fn eval(s: &JointState, jerk: f64, tau: f64) -> (f64, f64) {
    let v = s.v + s.a * tau + jerk * tau * tau / 2.0;
    let p = s.p + s.v * tau + s.a * tau * tau / 2.0 + jerk * tau * tau * tau / 6.0;
    (p, v)
}

/// State reached after one period when the acceleration moves linearly from
/// `s.a` to `a_next`.
#[inline]
pub fn integrate_interval(s: &JointState, a_next: f64, period: f64) -> JointState {
    let jerk = (a_next - s.a) / period;
    let (p, v) = eval(s, jerk, period);
    JointState { p, v, a: a_next }
}

/// `n_sub + 1` evenly spaced samples over one interval.
///
/// The last sample matches [`integrate_interval`] exactly.
pub fn sample_interval(s: &JointState, a_next: f64, period: f64, n_sub: usize) -> Vec<Sample> {
    let mut out = Vec::with_capacity(n_sub + 1);
    push_samples(&mut out, s, a_next, period, n_sub, 0.0, true);
    out
}

/// Appends interval samples to `out`; `include_start` controls the sample at tau = 0.
pub(crate) fn push_samples(
    out: &mut Vec<Sample>,
    s: &JointState,
    a_next: f64,
    period: f64,
    n_sub: usize,
    t0: f64,
    include_start: bool,
) {
    let n_sub = n_sub.max(1);
    let jerk = (a_next - s.a) / period;
    let first = if include_start { 0 } else { 1 };
    for i in first..=n_sub {
        let tau = if i == n_sub { period } else { i as f64 * period / n_sub as f64 };
        let (p, v) = eval(s, jerk, tau);
        let a = if i == n_sub { a_next } else { s.a + jerk * tau };
        out.push(Sample { t: t0 + tau, p, v, a, j: jerk });
    }
}

/// Reflects a state and its limits through the origin so that lower bounds
/// can be computed with the upper-bound machinery.
pub fn mirror(s: &JointState, limits: &KinematicLimits) -> (JointState, KinematicLimits) {
    (
        JointState { p: -s.p, v: -s.v, a: -s.a },
        KinematicLimits {
            p_min: -limits.p_max,
            p_max: -limits.p_min,
            v_min: -limits.v_max,
            v_max: -limits.v_min,
            a_min: -limits.a_max,
            a_max: -limits.a_min,
            j_min: -limits.j_max,
            j_max: -limits.j_min,
        },
    )
}
