//! Continuous-time braking bound that ignores the decision grid.
//!
//! The bound assumes the acceleration can follow the braking program
//! continuously after the first interval: ramp with `j_min` to `a_min` and
//! hold until the peak for the position limit, ramp with `j_min` to zero for
//! the velocity limit. Only the first interval is treated as a ramp over `T`.
//! At fine grids this converges to the discrete solution; at coarse grids
//! the joint cannot follow the assumed program and the limits are not kept.
//!
//! [`time_optimal_setpoint`] models a continuous online trajectory generator
//! instead: it plans the fastest continuous motion to rest at `p_max` and
//! hands over the acceleration it would have after one period. This is what
//! [`compare_rollout`] runs against the safe range.

use std::io::Write;

use crate::error::{Error, Result};
use crate::kinematics::{integrate_interval, mirror, DecisionGrid, JointState, KinematicLimits};
use crate::profiles::acc_jerk_window;
use crate::tasks::{rollout, rows, steps_for, Policy};
use crate::trajectory::{check_limits, Trajectory, ViolationReport, DEFAULT_N_SUB, DEFAULT_TOL};

const BISECT_STEPS: usize = 200;

/// Peak position of the continuous program after `a1`.
fn continuous_peak(s: &JointState, l: &KinematicLimits, t: f64, a1: f64) -> f64 {
    let first = first_interval_peak(s, a1, t);
    let s1 = integrate_interval(s, a1, t);
    if s1.v <= 0.0 {
        return first;
    }
    let j = l.j_min;
    let tau_a = ((l.a_min - s1.a) / j).max(0.0);
    let v = |tau: f64| s1.v + s1.a * tau + 0.5 * j * tau * tau;
    let p = |tau: f64| s1.p + s1.v * tau + 0.5 * s1.a * tau * tau + j * tau * tau * tau / 6.0;
    // first zero of v on the ramp
    let disc = s1.a * s1.a - 2.0 * j * s1.v;
    let tau0 = (-s1.a - disc.sqrt()) / j;
    if tau0 <= tau_a {
        return first.max(p(tau0));
    }
    let (pa, va) = (p(tau_a), v(tau_a));
    first.max(pa + va * va / (-2.0 * l.a_min))
}

fn first_interval_peak(s: &JointState, a1: f64, t: f64) -> f64 {
    let j = (a1 - s.a) / t;
    let mut peak = s.p.max(integrate_interval(s, a1, t).p);
    let disc = s.a * s.a - 2.0 * j * s.v;
    if j != 0.0 && disc >= 0.0 {
        for tau in [(-s.a + disc.sqrt()) / j, (-s.a - disc.sqrt()) / j] {
            if tau > 0.0 && tau < t {
                peak = peak.max(s.p + s.v * tau + 0.5 * s.a * tau * tau + j * tau * tau * tau / 6.0);
            }
        }
    } else if j == 0.0 && s.a != 0.0 {
        let tau = -s.v / s.a;
        if tau > 0.0 && tau < t {
            peak = peak.max(s.p + s.v * tau + 0.5 * s.a * tau * tau);
        }
    }
    peak
}

/// Peak velocity when the acceleration is ramped to zero with `j_min` after `a1`.
fn continuous_peak_velocity(s: &JointState, l: &KinematicLimits, t: f64, a1: f64) -> f64 {
    if a1 > 0.0 {
        return s.v + 0.5 * t * (s.a + a1) + a1 * a1 / (-2.0 * l.j_min);
    }
    if s.a > 0.0 {
        return s.v + s.a * s.a * t / (2.0 * (s.a - a1));
    }
    s.v
}

fn upper(s: &JointState, l: &KinematicLimits, t: f64) -> Result<f64> {
    let w = acc_jerk_window(s, l, t)?;
    let largest = |ok: &dyn Fn(f64) -> bool| {
        if ok(w.hi) {
            return w.hi;
        }
        if !ok(w.lo) {
            return w.lo;
        }
        let (mut good, mut bad) = (w.lo, w.hi);
        for _ in 0..BISECT_STEPS {
            let mid = 0.5 * (good + bad);
            if mid <= good || mid >= bad {
                break;
            }
            if ok(mid) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        good
    };
    let pos = largest(&|a1| continuous_peak(s, l, t, a1) <= l.p_max);
    let vel = largest(&|a1| continuous_peak_velocity(s, l, t, a1) <= l.v_max);
    Ok(pos.min(vel))
}

/// Largest next setpoint under the continuous-time braking conditions,
/// capped by the acceleration/jerk window over one period.
pub fn continuous_max_acc(s: &JointState, l: &KinematicLimits, grid: &DecisionGrid) -> Result<f64> {
    upper(s, l, grid.period())
}

/// Smallest next setpoint under the same conditions, from the mirrored state.
pub fn continuous_min_acc(s: &JointState, l: &KinematicLimits, grid: &DecisionGrid) -> Result<f64> {
    let (ms, ml) = mirror(s, l);
    Ok(-upper(&ms, &ml, grid.period())?)
}

/// Micro steps per period when simulating the continuous trajectory.
pub const MICRO_STEPS: usize = 400;

// Continuous jerk-limited motion over `d` seconds.
fn advance(s: &JointState, j: f64, d: f64) -> JointState {
    JointState {
        p: s.p + s.v * d + 0.5 * s.a * d * d + j * d * d * d / 6.0,
        v: s.v + s.a * d + 0.5 * j * d * d,
        a: s.a + j * d,
    }
}

/// Where the joint comes to rest under the fastest continuous stop: `j_min`
/// toward `a_min`, hold, then `j_max` back to zero acceleration at `v = 0`.
/// Returns the highest position reached.
fn continuous_stop(s: &JointState, l: &KinematicLimits) -> f64 {
    let (jn, jp) = (l.j_min, l.j_max);
    // velocity left after releasing straight from `a` with j_max (a <= 0)
    let release_dv = |a: f64| -a * a / (2.0 * jp);
    let mut x = *s;
    let mut peak = x.p;
    if x.a > 0.0 {
        // must come down first; v keeps rising meanwhile
        let d = -x.a / jn;
        x = advance(&x, jn, d);
        peak = peak.max(x.p);
    }
    if x.v + release_dv(x.a) <= 0.0 {
        // releasing at once is already enough: v reaches zero on the way up
        let disc = x.a * x.a - 2.0 * jp * x.v;
        let tau = (-x.a - disc.max(0.0).sqrt()) / jp;
        let tau = if tau >= 0.0 { tau } else { (-x.a + disc.max(0.0).sqrt()) / jp };
        return peak.max(advance(&x, jp, tau.max(0.0)).p);
    }
    // lowest acceleration a_lo reached before releasing:
    // v + (a_lo^2 - a^2)/(2 jn) - a_lo^2/(2 jp) = 0
    let k = 1.0 / (2.0 * jn) - 1.0 / (2.0 * jp);
    let a_lo_sq = (x.a * x.a / (2.0 * jn) - x.v) / k;
    let a_lo = -a_lo_sq.max(0.0).sqrt();
    if a_lo >= l.a_min {
        x = advance(&x, jn, (a_lo - x.a) / jn);
    } else {
        x = advance(&x, jn, (l.a_min - x.a) / jn);
        let hold = (x.v + release_dv(l.a_min)) / -l.a_min;
        x = advance(&x, 0.0, hold.max(0.0));
    }
    let d = -x.a / jp;
    peak.max(advance(&x, jp, d).p)
}

/// Continuous-time motion from `s` toward rest at `p_max` as fast as the
/// limits allow, sampled after one period. Mirrors what a continuous online
/// trajectory generator hands to a discrete controller.
pub fn time_optimal_setpoint(s: &JointState, l: &KinematicLimits, grid: &DecisionGrid) -> f64 {
    let dt = grid.period() / MICRO_STEPS as f64;
    let tol = 1e-9 * l.pos_span();
    let mut x = *s;
    for _ in 0..MICRO_STEPS {
        if l.p_max - x.p <= tol && x.v.abs() <= 1e-9 * l.vel_scale() {
            // target reached within the period: the generator holds it
            return 0.0;
        }
        let ok = |j: f64| {
            let y = advance(&x, j, dt);
            let vel = y.a <= 0.0 || y.v + y.a * y.a / (-2.0 * l.j_min) <= l.v_max;
            y.a <= l.a_max && vel && continuous_stop(&y, l) <= l.p_max
        };
        let j = if ok(l.j_max) {
            l.j_max
        } else if !ok(l.j_min) {
            l.j_min
        } else {
            let (mut good, mut bad) = (l.j_min, l.j_max);
            for _ in 0..60 {
                let mid = 0.5 * (good + bad);
                if ok(mid) {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
            good
        };
        x = advance(&x, j, dt);
        x.a = x.a.clamp(l.a_min, l.a_max);
    }
    x.a
}

/// One always-max rollout of either method.
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub trajectory: Trajectory,
    pub report: ViolationReport,
    pub terminal: JointState,
}

/// Both methods at one decision frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub f_n: f64,
    pub baseline: Run,
    pub ours: Run,
}

fn finish(trajectory: Trajectory, l: &KinematicLimits) -> Result<Run> {
    let report = check_limits(&trajectory, l, DEFAULT_TOL)?;
    Ok(Run { terminal: trajectory.last_state(), report, trajectory })
}

/// Always-max rollouts of the sampled continuous generator and of the safe
/// range, for each frequency in `freqs`.
pub fn compare_rollout(s0: JointState, l: &KinematicLimits, freqs: &[f64], duration: f64) -> Result<Vec<Comparison>> {
    if freqs.is_empty() {
        return Err(Error::InvalidArgument("no frequencies".into()));
    }
    freqs
        .iter()
        .map(|&f| {
            let grid = DecisionGrid::new(f)?;
            let steps = steps_for(duration, &grid)?;
            let mut base = Trajectory::new(s0, grid, DEFAULT_N_SUB);
            let mut s = s0;
            for _ in 0..steps {
                base.actions.push(1.0);
                s = base.push(time_optimal_setpoint(&s, l, &grid));
            }
            let ours = rollout(Policy::Constant { m: 1.0 }, s0, l, &grid, duration)?;
            Ok(Comparison { f_n: f, baseline: finish(base, l)?, ours: finish(ours, l)? })
        })
        .collect()
}

/// Paired CSV of all comparisons: `f_n` and `method` followed by the rollout columns.
pub fn write_compare_csv<W: Write>(cmp: &[Comparison], out: W) -> Result<()> {
    let err = |e: csv::Error| Error::Output(e.to_string());
    let mut w = csv::WriterBuilder::new().has_headers(false).terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["f_n", "method", "t", "p", "v", "a", "j", "range_lo", "range_hi", "action"]).map_err(err)?;
    for c in cmp {
        for (method, run) in [("baseline", &c.baseline), ("ours", &c.ours)] {
            for row in rows(&run.trajectory) {
                w.serialize((c.f_n, method, row)).map_err(err)?;
            }
        }
    }
    w.flush().map_err(|e| Error::Output(e.to_string()))
}

/// Limits and start state for which the sampled generator overshoots
/// `p_max` at 10 Hz and stops short of it at 4 Hz, while both methods agree
/// at 300 Hz.
pub fn comparison_setup() -> (KinematicLimits, JointState) {
    let l = KinematicLimits::new((-1.0, 1.0), (-1.0, 1.0), (-2.0, 2.0), (-10.0, 10.0)).expect("valid limits");
    (l, JointState::rest(-0.9))
}
