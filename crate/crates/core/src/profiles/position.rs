//! Largest next setpoint that still lets the joint stop at or below `p_max`.
//!
//! Continuous estimates narrow the program shape down step by step: (A) ramp
//! with `j_min` to `a_min` and hold until the peak, (B) reach `a_min` exactly
//! at a decision step, (C) fix the terminal step and add a final `j_max` ramp
//! back toward zero. Each estimate rounds one switching time up to the grid.
//! (D) then solves the fully discretised program exactly. That last system is
//! linear in the free setpoint and the junction setpoint once the step counts
//! are known, so the answer is exact whenever the counts are consistent. If
//! they are not, the counts found at the candidate are used instead.

use super::braking::{full_steps, Ctx, Shape, Stop};
use super::{acc_jerk_window, grid_index, BrakingProfile};
use crate::error::{Error, Result};
use crate::kinematics::{integrate_interval, AccelerationRange, DecisionGrid, JointState, KinematicLimits};
use crate::roots::{cubic, quadratic, Poly};

const MAX_REFINE: usize = 64;

enum Guess {
    Shape(Shape),
    Accel(f64),
}

/// Upper bound from the position limit alone, or `+inf` when it cannot bind.
pub fn pos_limit_bound(s: &JointState, l: &KinematicLimits, grid: &DecisionGrid) -> Result<f64> {
    Ok(solve_position(s, l, grid)?.map_or(f64::INFINITY, |sol| sol.a1))
}

/// Braking program that realises the position bound, when the bound binds.
pub fn pos_limit_profile(s: &JointState, l: &KinematicLimits, grid: &DecisionGrid) -> Result<Option<BrakingProfile>> {
    Ok(solve_position(s, l, grid)?.and_then(|sol| sol.profile))
}

struct Solution {
    a1: f64,
    profile: Option<BrakingProfile>,
}

fn solve_position(s: &JointState, l: &KinematicLimits, grid: &DecisionGrid) -> Result<Option<Solution>> {
    let t = grid.period();
    let ctx = Ctx::new(l, t);
    let w = acc_jerk_window(s, l, t)?;
    let stop_at = |a1: f64| ctx.stop(&integrate_interval(s, a1, t));

    match stop_at(w.hi)? {
        Stop::Reverses => return Ok(None),
        Stop::Lands { peak, .. } if peak <= l.p_max => return Ok(None),
        Stop::Lands { .. } => {}
    }
    if let Stop::Lands { peak, .. } = stop_at(w.lo)? {
        if peak > l.p_max + 1e-10 * l.pos_scale() {
            return Err(Error::InfeasibleState);
        }
        if peak >= l.p_max {
            return Ok(Some(Solution { a1: w.lo, profile: None }));
        }
    }
    let guess = cascade(s, &ctx, w);
    refine(s, &ctx, w, guess).map(Some)
}

fn refine(s: &JointState, ctx: &Ctx, w: AccelerationRange, guess: Option<Guess>) -> Result<Solution> {
    let l = ctx.l;
    let t = ctx.t;
    let eps = 1e-9 * l.acc_span();
    let (mut lo, mut hi) = (w.lo, w.hi);
    let mut shape = None;
    let mut probe = match guess {
        Some(Guess::Shape(sh)) => {
            shape = Some(sh);
            None
        }
        Some(Guess::Accel(a)) => Some(a),
        None => Some(0.5 * (lo + hi)),
    };
    for _ in 0..MAX_REFINE {
        if let Some(a) = probe {
            let a = if a > lo && a < hi { a } else { 0.5 * (lo + hi) };
            match ctx.stop(&integrate_interval(s, a, t))? {
                Stop::Reverses => {
                    lo = a;
                    shape = None;
                }
                Stop::Lands { shape: sh, peak, .. } => {
                    if peak > l.p_max {
                        hi = a;
                    } else {
                        lo = a;
                    }
                    shape = Some(sh);
                }
            }
        }
        probe = Some(0.5 * (lo + hi));
        if let Some(sh) = shape {
            let (a1, c) = ctx.solve(s, sh, l.p_max);
            if ctx.consistent(sh, a1, c) && a1 >= lo - eps && a1 <= hi + eps {
                let a1 = a1.clamp(w.lo, w.hi);
                let mut setpoints = ctx.setpoints(sh, a1, c);
                setpoints[0] = a1;
                return Ok(Solution { a1, profile: Some(BrakingProfile::from_setpoints(s.a, &setpoints, t)) });
            }
            if a1.is_finite() {
                probe = Some(a1);
            }
        }
    }
    // never reached in practice; `lo` is always a safe choice
    Ok(Solution { a1: lo, profile: None })
}

/// Steps (A) to (C); returns a shape guess for the exact solve, or at least
/// an acceleration near the answer.
fn cascade(s: &JointState, ctx: &Ctx, w: AccelerationRange) -> Option<Guess> {
    let l = ctx.l;
    let t = ctx.t;
    let (a1_a, t_amin) = stage_a(s, ctx, w)?;
    let Some(t_amin) = t_amin else {
        return Some(Guess::Accel(a1_a));
    };
    let n_a = grid_index(t_amin, t);
    if n_a < 2 {
        return Some(Guess::Accel(a1_a));
    }
    let b = stage_b(s, ctx, n_a);
    let Some((a1_b, n)) = b.solve(l) else {
        return Some(Guess::Accel(a1_a));
    };
    let Some((a1_c, t_switch)) = b.stage_c(l, n) else {
        return Some(Guess::Accel(a1_b));
    };
    let n_j = grid_index(t_switch, t);
    let m = full_steps(a1_c - l.a_min, -ctx.down) as usize;
    let junction = n_j + 1;
    let h = junction.saturating_sub(2 + m);
    let u = n.saturating_sub(m + h + 3);
    Some(Guess::Shape(Shape { m, h, u }))
}

/// (A): continuous braking with `j_min` to `a_min`, then holding `a_min`
/// until the peak. Returns the largest `a1` and the time `a_min` is reached,
/// or `None` for that time when the peak comes first.
fn stage_a(s: &JointState, ctx: &Ctx, w: AccelerationRange) -> Option<(f64, Option<f64>)> {
    let l = ctx.l;
    let t = ctx.t;
    let j = l.j_min;
    let a_min = l.a_min;
    let slack = 1e-9 * l.acc_span();
    // v1 = a0c + b a1, p1 = p0c + d a1
    let a0c = s.v + 0.5 * t * s.a;
    let p0c = s.p + s.v * t + t * t * s.a / 3.0;
    let (b, d) = (0.5 * t, t * t / 6.0);
    let mut best: Option<(f64, Option<f64>)> = None;
    let mut offer = |a1: f64, t_amin: Option<f64>| {
        if a1.is_finite() && a1 >= w.lo - slack && a1 <= w.hi + slack && best.is_none_or(|(x, _)| a1 > x) {
            best = Some((a1, t_amin));
        }
    };

    // hold reached: tau_a = (a_min - a1) / j
    let v1 = Poly::linear(a0c, b);
    let p1 = Poly::linear(p0c, d);
    let tau = Poly::linear(a_min / j, -1.0 / j);
    let a1 = Poly::linear(0.0, 1.0);
    let tau2 = &tau * &tau;
    let va = Poly(vec![a0c + a_min * a_min / (2.0 * j), b, -1.0 / (2.0 * j)]);
    let pa = &(&(&p1 + &(&v1 * &tau)) + &(&a1 * &tau2).scale(0.5)) + &(&tau2 * &tau).scale(j / 6.0);
    let f = &(&pa - &(&va * &va).scale(1.0 / (2.0 * a_min))) - &Poly::constant(l.p_max);
    for r in f.real_roots() {
        if va.eval(r) >= 0.0 && tau.eval(r) >= 0.0 {
            offer(r, Some(t + tau.eval(r)));
        }
    }

    // peak before a_min, parametrised by the time tau after t1
    let lin = Poly(vec![p0c - l.p_max, a0c, 0.0, j / 6.0]);
    let q = &(&lin * &Poly::linear(b, 1.0)) - &(&Poly(vec![a0c, 0.0, j / 2.0]) * &Poly(vec![d, b, 0.5]));
    for tau in q.real_roots() {
        if tau < 0.0 {
            continue;
        }
        let a1 = -(a0c + 0.5 * j * tau * tau) / (b + tau);
        let ap = a1 + j * tau;
        if ap >= a_min - slack && ap <= slack {
            offer(a1, None);
        }
    }
    best
}

/// Linear forms of the state at the step where `a_min` is reached in (B).
struct StageB {
    t: f64,
    n_a: usize,
    // v = alpha + beta a1, p = gamma + delta a1
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
}

/// (B): a single linear ramp from `a1` to `a_min`, arriving at step `n_a`.
fn stage_b(s: &JointState, ctx: &Ctx, n_a: usize) -> StageB {
    let t = ctx.t;
    let a_min = ctx.l.a_min;
    let n = n_a as f64;
    // setpoint i is a1 (1 - w_i) + a_min w_i with w_i = (i - 1) / (n_a - 1)
    let (mut sw, mut s1w, mut swn, mut s1wn) = (0.0, 0.0, 0.0, 0.0);
    for i in 1..n_a {
        let wi = (i as f64 - 1.0) / (n - 1.0);
        let k = n - i as f64;
        sw += wi;
        s1w += 1.0 - wi;
        swn += k * wi;
        s1wn += k * (1.0 - wi);
    }
    StageB {
        t,
        n_a,
        alpha: s.v + t * (0.5 * s.a + a_min * sw + 0.5 * a_min),
        beta: t * s1w,
        gamma: s.p + n * t * s.v + t * t * (s.a * (n / 2.0 - 1.0 / 6.0) + a_min * swn + a_min / 6.0),
        delta: t * t * s1wn,
    }
}

impl StageB {
    /// Peak at `p_max` while holding `a_min`; returns `a1` and the rounded step of the peak.
    fn solve(&self, l: &KinematicLimits) -> Option<(f64, usize)> {
        let a_min = l.a_min;
        let (al, be, ga, de) = (self.alpha, self.beta, self.gamma, self.delta);
        // ga + de a1 - (al + be a1)^2 / (2 a_min) = p_max
        let k = 1.0 / (2.0 * a_min);
        let roots = quadratic(-k * be * be, de - 2.0 * k * al * be, ga - k * al * al - l.p_max);
        let a1 = roots.into_iter().filter(|&a1| al + be * a1 >= 0.0 && a1 >= a_min).fold(f64::NEG_INFINITY, f64::max);
        if !a1.is_finite() {
            return None;
        }
        let v = al + be * a1;
        let t_peak = self.n_a as f64 * self.t + v / -a_min;
        Some((a1, grid_index(t_peak, self.t)))
    }

    /// (C): terminal step fixed at `n`, final ramp with `j_max` of duration `r`.
    /// Returns `a1` and the continuous start time of that ramp.
    fn stage_c(&self, l: &KinematicLimits, n: usize) -> Option<(f64, f64)> {
        if n <= self.n_a {
            return None;
        }
        let a_min = l.a_min;
        let jp = l.j_max;
        let dt = (n - self.n_a) as f64 * self.t;
        let (al, be, ga, de) = (self.alpha, self.beta, self.gamma, self.delta);
        let k0 = ga + al * dt + a_min * dt * dt / 2.0 - l.p_max;
        let k1 = de + be * dt;
        // v: al + be a1 + a_min dt + jp r^2 / 2 = 0
        // p: k0 + k1 a1 + jp r^3 / 6 = 0
        let roots = cubic(jp / 6.0, -k1 * jp / (2.0 * be), 0.0, k0 - k1 * (al + a_min * dt) / be);
        let a1_of = |r: f64| -(al + a_min * dt + jp * r * r / 2.0) / be;
        roots
            .into_iter()
            .filter(|&r| r >= 0.0 && r <= dt && a1_of(r) >= a_min)
            .map(|r| (a1_of(r), n as f64 * self.t - r))
            .fold(None, |acc: Option<(f64, f64)>, x| match acc {
                Some(y) if y.0 >= x.0 => Some(y),
                _ => Some(x),
            })
    }
}
