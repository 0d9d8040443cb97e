//! Largest next setpoint that keeps `v <= v_max` while the acceleration is
//! ramped back down to zero.

use super::braking::Ctx;
use super::{acc_jerk_window, grid_index};
use crate::error::{Error, Result};
use crate::kinematics::{DecisionGrid, JointState, KinematicLimits};

/// Upper bound from the velocity limit alone, or `+inf` when it cannot bind.
pub fn vel_limit_bound(s: &JointState, l: &KinematicLimits, grid: &DecisionGrid) -> Result<f64> {
    let t = grid.period();
    let ctx = Ctx::new(l, t);
    let w = acc_jerk_window(s, l, t)?;
    let peak = |a1: f64| peak_velocity(s, &ctx, a1);

    if peak(w.hi) <= l.v_max {
        return Ok(f64::INFINITY);
    }
    if peak(w.lo) > l.v_max + 1e-10 * l.vel_scale() {
        return Err(Error::InfeasibleState);
    }
    // a state sitting on v_max may be an ulp above it
    if peak(0.0) > l.v_max + 1e-12 * l.vel_scale() {
        // only reachable with a0 > 0: the peak lies inside the first interval
        let room = l.v_max - s.v;
        if room <= 0.0 {
            return Ok(w.lo);
        }
        return Ok((s.a - s.a * s.a * t / (2.0 * room)).max(w.lo));
    }

    // continuous estimate: ramp to a1, then j_min down to zero
    let j = -l.j_min;
    let a0c = s.v + 0.5 * t * s.a;
    let (qa, qb, qc) = (1.0 / (2.0 * j), 0.5 * t, a0c - l.v_max);
    let a1c = (-qb + (qb * qb - 4.0 * qa * qc).max(0.0).sqrt()) / (2.0 * qa);
    let mut k = grid_index(t + a1c / j, t).saturating_sub(1).max(1);

    let dd = -ctx.down;
    let eps = 1e-9 * l.acc_span();
    let solve = |k: usize| {
        let kf = k as f64;
        ((l.v_max - s.v) / t - 0.5 * s.a + dd * kf * (kf - 1.0) / 2.0) / kf
    };
    let fits = |k: usize, a1: f64| {
        let kf = k as f64;
        a1 - (kf - 1.0) * dd >= -eps && a1 - kf * dd <= eps
    };
    for _ in 0..8 {
        let a1 = solve(k);
        if fits(k, a1) {
            return Ok(a1.clamp(w.lo, w.hi));
        }
        k = ((a1 / dd).ceil() as usize).max(1);
    }
    let k_max = (l.a_max / dd).ceil() as usize + 1;
    Ok((1..=k_max).map(|k| (k, solve(k))).find(|&(k, a1)| fits(k, a1)).map_or(w.lo, |(_, a1)| a1.clamp(w.lo, w.hi)))
}

/// Highest velocity reached when `a1` is followed by the fastest return of
/// the acceleration to zero.
fn peak_velocity(s: &JointState, ctx: &Ctx, a1: f64) -> f64 {
    let t = ctx.t;
    if a1 > 0.0 {
        return s.v + 0.5 * t * (s.a + a1) + ctx.zero_return(a1);
    }
    if s.a > 0.0 {
        // a crosses zero inside the first interval
        return s.v + s.a * s.a * t / (2.0 * (s.a - a1));
    }
    s.v
}
