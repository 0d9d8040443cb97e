//! Brute-force feasibility oracle.
//!
//! Decides whether a candidate setpoint keeps the joint safe by simulating
//! explicit braking continuations step by step, with dense sampling. The
//! safe range is then found by bisection. Slow, independent of the analytic
//! solver in [`crate::profiles`], and only meant for verification.
//!
//! A continuation toward an upper position limit brakes as hard as it can
//! while it can still bring the acceleration back to zero with the joint
//! moving upward; once braking harder would make that impossible it picks
//! the setpoint that lands exactly and releases as fast as the jerk allows.
//! The joint then rests at its peak. A continuation toward an upper velocity
//! limit ramps the acceleration down to zero as fast as possible. Lower
//! limits use the mirrored state.

use crate::error::{Error, Result};
use crate::kinematics::{integrate_interval, mirror, AccelerationRange, DecisionGrid, JointState, KinematicLimits};

/// Default number of braking steps simulated before giving up.
pub const DEFAULT_HORIZON: usize = 400;

/// Horizon long enough for any braking program under `l`: at least
/// [`DEFAULT_HORIZON`], more when weak deceleration at a fine grid needs it.
pub fn horizon_for(l: &KinematicLimits, period: f64) -> usize {
    let a_weak = l.a_max.min(-l.a_min);
    let j_weak = l.j_max.min(-l.j_min);
    let time = (l.v_max - l.v_min) / a_weak + 2.0 * (l.a_max - l.a_min) / j_weak;
    DEFAULT_HORIZON.max((time / period).ceil() as usize + 8)
}
/// Dense samples per interval inside the oracle.
pub const ORACLE_N_SUB: usize = 32;
/// Bisection tolerance, relative to `a_max - a_min`.
pub const BISECT_TOL: f64 = 1e-8;
/// Seeds scanned when looking for a first feasible setpoint.
pub const SEEDS: usize = 64;

// Allowed excess during dense checks, relative to the limit magnitude. Much
// tighter than the reporting tolerance so that the oracle is the stricter party.
const CHECK_TOL: f64 = 1e-12;

#[derive(Clone, Copy)]
struct Quantities {
    p: bool,
    v: bool,
    a: bool,
    // only the upper limits; the mirrored program covers the lower ones
    upper_only: bool,
}

const ALL: Quantities = Quantities { p: true, v: true, a: true, upper_only: false };
const POSITION: Quantities = Quantities { p: true, v: false, a: false, upper_only: true };
const VELOCITY: Quantities = Quantities { p: false, v: true, a: false, upper_only: true };

/// Dense check of one interval. Besides the evenly spaced samples it also
/// evaluates the points where velocity or position are stationary.
fn interval_ok(s: &JointState, a_next: f64, period: f64, l: &KinematicLimits, q: Quantities) -> bool {
    let jerk = (a_next - s.a) / period;
    let at = |tau: f64| {
        let v = s.v + s.a * tau + 0.5 * jerk * tau * tau;
        let p = s.p + s.v * tau + 0.5 * s.a * tau * tau + jerk * tau * tau * tau / 6.0;
        (p, v, s.a + jerk * tau)
    };
    let ptol = CHECK_TOL * l.pos_scale();
    let vtol = CHECK_TOL * l.vel_scale();
    let atol = CHECK_TOL * l.acc_scale();
    let two = !q.upper_only;
    let ok = |(p, v, a): (f64, f64, f64)| {
        (!q.p || (p <= l.p_max + ptol && (!two || p >= l.p_min - ptol)))
            && (!q.v || (v <= l.v_max + vtol && (!two || v >= l.v_min - vtol)))
            && (!q.a || (a <= l.a_max + atol && a >= l.a_min - atol))
    };
    for i in 0..=ORACLE_N_SUB {
        if !ok(at(period * i as f64 / ORACLE_N_SUB as f64)) {
            return false;
        }
    }
    let mut taus = [f64::NAN; 3];
    if jerk != 0.0 {
        taus[0] = -s.a / jerk;
        let disc = s.a * s.a - 2.0 * jerk * s.v;
        if disc >= 0.0 {
            taus[1] = (-s.a + disc.sqrt()) / jerk;
            taus[2] = (-s.a - disc.sqrt()) / jerk;
        }
    } else if s.a != 0.0 {
        taus[1] = -s.v / s.a;
    }
    taus.iter().filter(|t| **t > 0.0 && **t < period).all(|&t| ok(at(t)))
}

/// Velocity once the acceleration has been driven back to zero as fast as
/// the jerk limits allow.
fn velocity_at_zero_acc(mut v: f64, mut a: f64, period: f64, l: &KinematicLimits) -> f64 {
    let up = l.j_max * period;
    let down = l.j_min * period;
    while a != 0.0 {
        let next = if a < 0.0 { (a + up).min(0.0) } else { (a + down).max(0.0) };
        v += 0.5 * period * (a + next);
        a = next;
    }
    v
}

/// Outcome of simulating the braking continuation toward the upper position limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpperStop {
    /// The joint comes to rest moving upward; `peak` is the resting position.
    Lands { peak: f64, steps: usize },
    /// The joint turns around before the acceleration can return to zero.
    Reverses { peak: f64 },
    /// Not settled within the horizon.
    Horizon,
}

struct Walker<'a> {
    s: JointState,
    l: &'a KinematicLimits,
    period: f64,
    peak: f64,
    ok: bool,
    steps: usize,
}

impl Walker<'_> {
    fn step(&mut self, a_next: f64) {
        if self.ok && !interval_ok(&self.s, a_next, self.period, self.l, POSITION) {
            self.ok = false;
        }
        self.s = integrate_interval(&self.s, a_next, self.period);
        self.peak = self.peak.max(self.s.p);
        self.steps += 1;
    }
}

/// Simulates the upper-position braking continuation from `s1`.
///
/// Returns the outcome and whether every dense sample stayed at or below `p_max`.
pub fn upper_stop(s1: &JointState, l: &KinematicLimits, period: f64, horizon: usize) -> (UpperStop, bool) {
    let mut w = Walker { s: *s1, l, period, peak: s1.p, ok: true, steps: 0 };
    let up = l.j_max * period;
    let down = l.j_min * period;

    if velocity_at_zero_acc(s1.v, s1.a, period, l) < 0.0 {
        // turning around: follow the steepest descent until it moves down for good
        while !(w.s.v <= 0.0 && w.s.a <= 0.0) {
            if w.steps >= horizon {
                return (UpperStop::Horizon, false);
            }
            w.step((w.s.a + down).max(l.a_min));
        }
        return (UpperStop::Reverses { peak: w.peak }, w.ok);
    }

    loop {
        if w.s.a <= 0.0 && w.s.v <= 0.0 {
            return (UpperStop::Lands { peak: w.peak, steps: w.steps }, w.ok);
        }
        if w.steps >= horizon {
            return (UpperStop::Horizon, false);
        }
        let (a, v) = (w.s.a, w.s.v);
        let steep = (a + down).max(l.a_min);
        let v_steep = v + 0.5 * period * (a + steep);
        if steep > 0.0 || velocity_at_zero_acc(v_steep, steep, period, l) >= 0.0 {
            w.step(steep);
            continue;
        }
        // the junction: the strongest setpoint from which an exact landing remains possible
        let landing = |c: f64| velocity_at_zero_acc(v + 0.5 * period * (a + c), c, period, l);
        let (mut lo, mut hi) = (steep, (a + up).min(0.0));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if landing(mid) >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        w.step(hi);
        while w.s.a < 0.0 {
            if w.steps >= horizon {
                return (UpperStop::Horizon, false);
            }
            w.step((w.s.a + up).min(0.0));
        }
        return (UpperStop::Lands { peak: w.peak, steps: w.steps }, w.ok);
    }
}

/// True when the fastest ramp of the acceleration down to zero keeps `v <= v_max`.
fn upper_velocity_ok(s1: &JointState, l: &KinematicLimits, period: f64) -> bool {
    let down = l.j_min * period;
    let mut s = *s1;
    while s.a > 0.0 {
        let next = (s.a + down).max(0.0);
        if !interval_ok(&s, next, period, l, VELOCITY) {
            return false;
        }
        s = integrate_interval(&s, next, period);
    }
    true
}

fn upper_ok(s1: &JointState, l: &KinematicLimits, period: f64, horizon: usize) -> bool {
    upper_velocity_ok(s1, l, period) && upper_stop(s1, l, period, horizon).1
}

/// Whether applying `a1` at the next step leaves a braking continuation that
/// keeps the joint within all limits.
pub fn feasible(s: &JointState, a1: f64, l: &KinematicLimits, grid: &DecisionGrid, horizon: usize) -> bool {
    let period = grid.period();
    if !a1.is_finite() || !s.is_finite() {
        return false;
    }
    let slack = 1e-12 * l.acc_span();
    let lo = (s.a + l.j_min * period).max(l.a_min);
    let hi = (s.a + l.j_max * period).min(l.a_max);
    if a1 < lo - slack || a1 > hi + slack {
        return false;
    }
    if !interval_ok(s, a1, period, l, ALL) {
        return false;
    }
    let s1 = integrate_interval(s, a1, period);
    if !upper_ok(&s1, l, period, horizon) {
        return false;
    }
    let (ms1, ml) = mirror(&s1, l);
    upper_ok(&ms1, &ml, period, horizon)
}

/// Safe acceleration range by seed scan and bisection on both sides.
pub fn brute_force_range(s: &JointState, l: &KinematicLimits, grid: &DecisionGrid) -> Result<AccelerationRange> {
    brute_force_range_with(s, l, grid, horizon_for(l, grid.period()))
}

pub fn brute_force_range_with(
    s: &JointState,
    l: &KinematicLimits,
    grid: &DecisionGrid,
    horizon: usize,
) -> Result<AccelerationRange> {
    let period = grid.period();
    let lo = (s.a + l.j_min * period).max(l.a_min);
    let hi = (s.a + l.j_max * period).min(l.a_max);
    if lo > hi {
        return Err(Error::InadmissibleState);
    }
    let ok = |a: f64| feasible(s, a, l, grid, horizon);
    let seed = (0..SEEDS)
        .map(|i| lo + (hi - lo) * i as f64 / (SEEDS - 1) as f64)
        .find(|&a| ok(a))
        .ok_or(Error::InfeasibleState)?;
    let tol = BISECT_TOL * l.acc_span();
    let top = if ok(hi) { hi } else { bisect(seed, hi, tol, &ok) };
    let bottom = if ok(lo) { lo } else { bisect(seed, lo, tol, &ok) };
    Ok(AccelerationRange::new(bottom, top))
}

/// Which upper limit a per-constraint search honours.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Position,
    Velocity,
}

/// Largest setpoint inside the acceleration/jerk window that satisfies one
/// upper constraint alone, by bisection.
pub fn brute_force_upper(s: &JointState, l: &KinematicLimits, grid: &DecisionGrid, bound: Bound) -> Result<f64> {
    let period = grid.period();
    let lo = (s.a + l.j_min * period).max(l.a_min);
    let hi = (s.a + l.j_max * period).min(l.a_max);
    if lo > hi {
        return Err(Error::InadmissibleState);
    }
    let ok = |a1: f64| {
        let q = match bound {
            Bound::Position => POSITION,
            Bound::Velocity => VELOCITY,
        };
        if !interval_ok(s, a1, period, l, q) {
            return false;
        }
        let s1 = integrate_interval(s, a1, period);
        match bound {
            Bound::Position => upper_stop(&s1, l, period, horizon_for(l, period)).1,
            Bound::Velocity => upper_velocity_ok(&s1, l, period),
        }
    };
    if ok(hi) {
        return Ok(hi);
    }
    if !ok(lo) {
        return Err(Error::InfeasibleState);
    }
    Ok(bisect(lo, hi, BISECT_TOL * l.acc_span(), &ok))
}

/// Moves from a feasible `good` toward an infeasible `bad` and returns the last feasible point.
fn bisect(mut good: f64, mut bad: f64, tol: f64, ok: &dyn Fn(f64) -> bool) -> f64 {
    while (bad - good).abs() > tol {
        let mid = 0.5 * (good + bad);
        if ok(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

/// Lowest resting position over braking programs built from a coarse grid of
/// setpoints: `candidates` evenly spaced values per step for up to `depth`
/// steps, each completed by an exact two-step landing. Programs lower the
/// acceleration first and then raise it, never above zero once raising.
///
/// Used to validate the greedy continuation of [`upper_stop`] on small cases.
pub fn exhaustive_min_stop(
    s1: &JointState,
    l: &KinematicLimits,
    period: f64,
    depth: usize,
    candidates: usize,
) -> Option<f64> {
    let mut best = f64::INFINITY;
    search(*s1, false, s1.p, l, period, depth, candidates.max(2), &mut best);
    best.is_finite().then_some(best)
}

#[allow(clippy::too_many_arguments)]
fn search(
    s: JointState,
    rising: bool,
    peak: f64,
    l: &KinematicLimits,
    period: f64,
    depth: usize,
    n: usize,
    best: &mut f64,
) {
    let lo = (s.a + l.j_min * period).max(l.a_min);
    let hi = (s.a + l.j_max * period).min(l.a_max);
    // descend freely, or start raising as long as the acceleration stays nonpositive
    let allowed = |x: f64| x >= lo && x <= hi && if rising { x >= s.a && x <= 0.0 } else { x <= s.a || x <= 0.0 };

    // x then 0 with v = 0 at the end
    let x = -s.v / period - 0.5 * s.a;
    if allowed(x) && x <= -l.j_min * period && x >= -l.j_max * period {
        let s2 = integrate_interval(&s, x, period);
        let top = peak.max(interval_peak(&s, x, period)).max(interval_peak(&s2, 0.0, period));
        if top < *best {
            *best = top;
        }
    }
    if depth == 0 {
        return;
    }
    for i in 0..n {
        let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        if !allowed(x) {
            continue;
        }
        let now_rising = rising || x > s.a;
        let next = integrate_interval(&s, x, period);
        if next.v < 0.0 && next.a <= 0.0 {
            continue;
        }
        let top = peak.max(interval_peak(&s, x, period));
        if top >= *best {
            continue;
        }
        search(next, now_rising, top, l, period, depth - 1, n, best);
    }
}

fn interval_peak(s: &JointState, a_next: f64, period: f64) -> f64 {
    let jerk = (a_next - s.a) / period;
    let p_at = |t: f64| s.p + s.v * t + 0.5 * s.a * t * t + jerk * t * t * t / 6.0;
    let mut top = s.p.max(p_at(period));
    let (qa, qb, qc) = (0.5 * jerk, s.a, s.v);
    let mut roots = [f64::NAN; 2];
    if qa != 0.0 {
        let d = qb * qb - 4.0 * qa * qc;
        if d >= 0.0 {
            roots = [(-qb + d.sqrt()) / (2.0 * qa), (-qb - d.sqrt()) / (2.0 * qa)];
        }
    } else if qb != 0.0 {
        roots[0] = -qc / qb;
    }
    for t in roots {
        if t > 0.0 && t < period {
            top = top.max(p_at(t));
        }
    }
    top
}
