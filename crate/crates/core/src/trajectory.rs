//! Setpoint trajectories and limit checking.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{
    integrate_interval, push_samples, AccelerationRange, DecisionGrid, JointState, KinematicLimits, Sample,
};

/// Default sub-samples per interval for limit checks and CSV output.
pub const DEFAULT_N_SUB: usize = 16;
/// Default tolerance on normalized excess.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A joint trajectory driven by linearly interpolated acceleration setpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub grid: DecisionGrid,
    pub n_sub: usize,
    /// `setpoints[0]` is the initial acceleration, `setpoints[k]` the setpoint at `t_k`.
    pub setpoints: Vec<f64>,
    /// State at every decision step, `states.len() == setpoints.len()`.
    pub states: Vec<JointState>,
    /// `n_sub` samples per interval, shared endpoints stored once.
    pub samples: Vec<Sample>,
    /// Safe range used at each decision step (empty when not produced by a rollout).
    pub ranges: Vec<AccelerationRange>,
    /// Policy output at each decision step (empty when not produced by a rollout).
    pub actions: Vec<f64>,
}

impl Trajectory {
    pub fn new(s0: JointState, grid: DecisionGrid, n_sub: usize) -> Self {
        let n_sub = n_sub.max(1);
        let samples = vec![Sample { t: 0.0, p: s0.p, v: s0.v, a: s0.a, j: 0.0 }];
        Self { grid, n_sub, setpoints: vec![s0.a], states: vec![s0], samples, ranges: Vec::new(), actions: Vec::new() }
    }

    /// Builds a trajectory from a start state and the setpoints after it.
    pub fn from_setpoints(s0: JointState, setpoints: &[f64], grid: DecisionGrid, n_sub: usize) -> Self {
        let mut traj = Self::new(s0, grid, n_sub);
        for &a in setpoints {
            traj.push(a);
        }
        traj
    }

    /// Appends one interval ending at setpoint `a_next` and returns the new state.
    pub fn push(&mut self, a_next: f64) -> JointState {
        let s = *self.states.last().expect("trajectory has a start state");
        let t0 = self.grid.period() * (self.states.len() - 1) as f64;
        let first = self.samples.len();
        push_samples(&mut self.samples, &s, a_next, self.grid.period(), self.n_sub, t0, false);
        // the start sample of the first interval has no jerk yet
        if first == 1 {
            self.samples[0].j = self.samples[1].j;
        }
        let next = integrate_interval(&s, a_next, self.grid.period());
        self.setpoints.push(a_next);
        self.states.push(next);
        next
    }

    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn last_state(&self) -> JointState {
        *self.states.last().expect("trajectory has a start state")
    }

    pub fn duration(&self) -> f64 {
        self.steps() as f64 * self.grid.period()
    }
}

/// Violation counts per quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ViolationCounts {
    pub position: usize,
    pub velocity: usize,
    pub acceleration: usize,
    pub jerk: usize,
}

impl ViolationCounts {
    pub fn total(&self) -> usize {
        self.position + self.velocity + self.acceleration + self.jerk
    }
}

/// Worst normalized values of a trajectory. A normalized value of 1 means
/// exactly at a limit; the excess over 1 is measured in units of the larger
/// limit magnitude of that quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub max_norm_position: f64,
    pub max_norm_velocity: f64,
    pub max_norm_acceleration: f64,
    pub max_norm_jerk: f64,
    pub first_violation: Option<f64>,
    pub counts: ViolationCounts,
}

impl ViolationReport {
    pub fn is_clean(&self) -> bool {
        self.counts.total() == 0
    }
}

#[inline]
fn norm(x: f64, lo: f64, hi: f64, scale: f64) -> f64 {
    1.0 + ((x - hi).max(lo - x)) / scale
}

struct Checker<'a> {
    limits: &'a KinematicLimits,
    tol: f64,
    report: ViolationReport,
}

impl Checker<'_> {
    fn point(&mut self, t: f64, p: f64, v: f64, a: f64) {
        let l = self.limits;
        let np = norm(p, l.p_min, l.p_max, l.pos_scale());
        let nv = norm(v, l.v_min, l.v_max, l.vel_scale());
        let na = norm(a, l.a_min, l.a_max, l.acc_scale());
        let r = &mut self.report;
        r.max_norm_position = r.max_norm_position.max(np);
        r.max_norm_velocity = r.max_norm_velocity.max(nv);
        r.max_norm_acceleration = r.max_norm_acceleration.max(na);
        let mut hit = false;
        if np - 1.0 > self.tol {
            r.counts.position += 1;
            hit = true;
        }
        if nv - 1.0 > self.tol {
            r.counts.velocity += 1;
            hit = true;
        }
        if na - 1.0 > self.tol {
            r.counts.acceleration += 1;
            hit = true;
        }
        if hit && r.first_violation.is_none() {
            r.first_violation = Some(t);
        }
    }
}

/// Checks every dense sample plus the exact interior extrema of position and
/// velocity against `limits`.
pub fn check_limits(traj: &Trajectory, limits: &KinematicLimits, tol: f64) -> Result<ViolationReport> {
    if traj.samples.is_empty() || traj.states.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let mut c = Checker {
        limits,
        tol,
        report: ViolationReport {
            max_norm_position: f64::NEG_INFINITY,
            max_norm_velocity: f64::NEG_INFINITY,
            max_norm_acceleration: f64::NEG_INFINITY,
            max_norm_jerk: 0.0,
            first_violation: None,
            counts: ViolationCounts::default(),
        },
    };
    for smp in &traj.samples {
        c.point(smp.t, smp.p, smp.v, smp.a);
    }
    let period = traj.grid.period();
    for (k, pair) in traj.states.windows(2).enumerate() {
        let s = pair[0];
        let jerk = (pair[1].a - s.a) / period;
        let t0 = k as f64 * period;
        for tau in interior_extrema(&s, jerk, period).into_iter().flatten() {
            let v = s.v + s.a * tau + jerk * tau * tau / 2.0;
            let p = s.p + s.v * tau + s.a * tau * tau / 2.0 + jerk * tau * tau * tau / 6.0;
            c.point(t0 + tau, p, v, s.a + jerk * tau);
        }
        let nj = norm(jerk, limits.j_min, limits.j_max, limits.jerk_scale());
        let r = &mut c.report;
        r.max_norm_jerk = r.max_norm_jerk.max(nj);
        if nj - 1.0 > tol {
            r.counts.jerk += 1;
            r.first_violation.get_or_insert(t0);
        }
    }
    Ok(c.report)
}

/// Times in (0, period) where velocity (a = 0) or position (v = 0) is stationary.
fn interior_extrema(s: &JointState, jerk: f64, period: f64) -> [Option<f64>; 3] {
    let inside = |t: f64| (t > 0.0 && t < period).then_some(t);
    let mut out = [None; 3];
    if jerk != 0.0 {
        out[0] = inside(-s.a / jerk);
    }
    // v(t) = s.v + s.a t + jerk t^2 / 2
    let (qa, qb, qc) = (jerk / 2.0, s.a, s.v);
    if qa == 0.0 {
        if qb != 0.0 {
            out[1] = inside(-qc / qb);
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            out[1] = inside((-qb + sq) / (2.0 * qa));
            out[2] = inside((-qb - sq) / (2.0 * qa));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> KinematicLimits {
        KinematicLimits::new((-1.0, 1.0), (-1.0, 1.0), (-2.0, 2.0), (-10.0, 10.0)).unwrap()
    }

    #[test]
    fn inside_limits_is_clean() {
        let g = DecisionGrid::new(10.0).unwrap();
        let t = Trajectory::from_setpoints(JointState::rest(0.0), &[0.5, 0.0, -0.5, 0.0], g, 16);
        let r = check_limits(&t, &small(), DEFAULT_TOL).unwrap();
        assert!(r.is_clean());
        assert!(r.max_norm_position < 1.0 && r.max_norm_velocity < 1.0);
    }

    #[test]
    fn position_excess_is_reported() {
        let l = small();
        let g = DecisionGrid::new(10.0).unwrap();
        let t = Trajectory::new(JointState::rest(1.25 * l.p_max), g, 16);
        let r = check_limits(&t, &l, DEFAULT_TOL).unwrap();
        assert!((r.max_norm_position - 1.25).abs() < 1e-12);
        assert_eq!(r.counts.position, 1);
        assert_eq!(r.first_violation, Some(0.0));
    }

    #[test]
    fn interior_velocity_peak_is_found() {
        // v peaks mid-interval where a crosses zero; with n_sub = 1 only the ends are sampled
        let l = small();
        let g = DecisionGrid::new(1.0).unwrap();
        let s0 = JointState::new(0.0, 0.9, 1.0);
        let t = Trajectory::from_setpoints(s0, &[-1.0], g, 1);
        let r = check_limits(&t, &l, DEFAULT_TOL).unwrap();
        // peak at t = 0.5: v = 0.9 + 0.5 - 0.25 = 1.15
        assert!((r.max_norm_velocity - 1.15).abs() < 1e-12);
        assert_eq!(r.counts.velocity, 1);
    }

    #[test]
    fn jerk_excess_is_counted() {
        let g = DecisionGrid::new(10.0).unwrap();
        let t = Trajectory::from_setpoints(JointState::rest(0.0), &[1.5], g, 4);
        let r = check_limits(&t, &small(), DEFAULT_TOL).unwrap();
        assert_eq!(r.counts.jerk, 1);
        assert!((r.max_norm_jerk - 1.5).abs() < 1e-12);
    }

    #[test]
    fn empty_trajectory_is_an_error() {
        let mut t = Trajectory::new(JointState::rest(0.0), DecisionGrid::new(10.0).unwrap(), 4);
        t.samples.clear();
        assert_eq!(check_limits(&t, &small(), DEFAULT_TOL), Err(Error::EmptyTrajectory));
    }

    #[test]
    fn sample_layout() {
        let g = DecisionGrid::new(10.0).unwrap();
        let t = Trajectory::from_setpoints(JointState::rest(0.0), &[1.0, 1.0, 0.0], g, 4);
        assert_eq!(t.samples.len(), 13);
        assert_eq!(t.steps(), 3);
        let s = t.samples[8];
        assert_eq!((s.p, s.v, s.a), (t.states[2].p, t.states[2].v, t.states[2].a));
        assert!((t.samples[12].t - 0.3).abs() < 1e-15);
    }
}
