//! Discrete braking programs toward an upper position limit.
//!
//! After the free setpoint `a1` a program lowers the acceleration as fast as
//! the jerk allows (`m` steps), holds `a_min` (`h` steps), takes one junction
//! setpoint `c`, raises the acceleration back with full `j_max` steps (`u`
//! steps) and lands on `a = 0` with `v = 0` at a decision step. The junction
//! is the strongest setpoint from which that exact landing is still possible.

use crate::error::{Error, Result};
use crate::kinematics::{integrate_interval, JointState, KinematicLimits};

/// Step counts of a braking program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Shape {
    pub m: usize,
    pub h: usize,
    pub u: usize,
}

impl Shape {
    /// Index of the landing setpoint, counting `a1` as index 1.
    pub fn landing(&self) -> usize {
        self.m + self.h + self.u + 3
    }
}

pub(crate) enum Stop {
    /// Comes to rest moving upward at `peak`.
    Lands { shape: Shape, peak: f64 },
    /// Turns around before the acceleration can return to zero.
    Reverses,
}

// generous cap on program length; braking from admissible states ends long before
const MAX_STEPS: usize = 1_000_000;

pub(crate) struct Ctx<'a> {
    pub l: &'a KinematicLimits,
    pub t: f64,
    pub up: f64,
    pub down: f64,
}

/// Number of full jerk steps of size `step` that stay strictly short of covering `x`.
#[inline]
pub(crate) fn full_steps(x: f64, step: f64) -> f64 {
    ((x / step).ceil() - 1.0).max(0.0)
}

impl<'a> Ctx<'a> {
    pub fn new(l: &'a KinematicLimits, t: f64) -> Self {
        Self { l, t, up: l.j_max * t, down: l.j_min * t }
    }

    /// Velocity change while the acceleration is driven to zero as fast as possible.
    #[inline]
    pub fn zero_return(&self, a: f64) -> f64 {
        if a < 0.0 {
            let k = full_steps(-a, self.up);
            self.t * (0.5 * a + k * a + 0.5 * self.up * k * (k + 1.0))
        } else if a > 0.0 {
            let k = full_steps(a, -self.down);
            self.t * (0.5 * a + k * a + 0.5 * self.down * k * (k + 1.0))
        } else {
            0.0
        }
    }

    /// Junction setpoint in `[steep, min(0, s.a + up)]` that lands exactly.
    fn junction(&self, s: &JointState, steep: f64) -> f64 {
        let top = (s.a + self.up).min(0.0);
        let rhs = s.v / self.t + 0.5 * s.a;
        let k_lo = full_steps(-top, self.up) as usize;
        let k_hi = full_steps(-steep, self.up) as usize;
        let slack = 1e-12 * self.l.acc_span();
        for k in k_lo..=k_hi {
            let kf = k as f64;
            let c = -(rhs + 0.5 * self.up * kf * (kf + 1.0)) / (kf + 1.0);
            if c >= -(kf + 1.0) * self.up - slack && c <= -kf * self.up + slack {
                return c.clamp(steep, top);
            }
        }
        top
    }

    /// Follows the braking program from the state after `a1`.
    pub fn stop(&self, s1: &JointState) -> Result<Stop> {
        if s1.v + self.zero_return(s1.a) < 0.0 {
            return Ok(Stop::Reverses);
        }
        let a_min = self.l.a_min;
        let (mut m, mut h) = (0, 0);
        let mut s = *s1;
        for _ in 0..MAX_STEPS {
            let raw = s.a + self.down;
            let steep = raw.max(a_min);
            let v_steep = s.v + 0.5 * self.t * (s.a + steep);
            if steep > 0.0 || v_steep + self.zero_return(steep) >= 0.0 {
                if raw > a_min && h == 0 {
                    m += 1;
                } else {
                    h += 1;
                }
                s = integrate_interval(&s, steep, self.t);
                continue;
            }
            let c = self.junction(&s, steep);
            let u = if c < 0.0 { full_steps(-c, self.up) as usize } else { 0 };
            s = integrate_interval(&s, c, self.t);
            for i in 1..=u {
                s = integrate_interval(&s, c + i as f64 * self.up, self.t);
            }
            s = integrate_interval(&s, 0.0, self.t);
            return Ok(Stop::Lands { shape: Shape { m, h, u }, peak: s.p });
        }
        Err(Error::InfeasibleState)
    }

    /// Solves for `(a1, c)` so that the program with step counts `shape`
    /// starting from `s` lands with `v = 0` at position `p_target`.
    pub fn solve(&self, s: &JointState, shape: Shape, p_target: f64) -> (f64, f64) {
        let t = self.t;
        let (m, h, u) = (shape.m as f64, shape.h as f64, shape.u as f64);
        let n = shape.landing() as f64;
        let a_min = self.l.a_min;

        // sum of setpoints a_1..a_{N-1}: fixed by v_N = 0
        let s_target = -s.v / t - 0.5 * s.a;
        let s0 = self.down * m * (m + 1.0) / 2.0 + h * a_min + self.up * u * (u + 1.0) / 2.0;
        // sum of (N - i) a_i: fixed by p_N = p_target
        let w_target = (p_target - s.p - n * t * s.v) / (t * t) - s.a * (n / 2.0 - 1.0 / 6.0);
        let w0 = self.down * ((n - 1.0) * m * (m + 1.0) / 2.0 - m * (m + 1.0) * (2.0 * m + 1.0) / 6.0)
            + a_min * (h * (n - m - 1.0) - h * (h + 1.0) / 2.0)
            + self.up * u * (u + 1.0) * (u + 2.0) / 6.0;
        let (a11, a12) = (m + 1.0, u + 1.0);
        let (a21, a22) = ((m + 1.0) * (n - 1.0) - m * (m + 1.0) / 2.0, (u + 1.0) * (u + 2.0) / 2.0);
        let (b1, b2) = (s_target - s0, w_target - w0);
        let det = a11 * a22 - a12 * a21;
        ((b1 * a22 - a12 * b2) / det, (a11 * b2 - a21 * b1) / det)
    }

    /// Whether `(a1, c)` realises a program with step counts `shape`.
    pub fn consistent(&self, shape: Shape, a1: f64, c: f64) -> bool {
        let eps = 1e-9 * self.l.acc_span();
        let a_min = self.l.a_min;
        let (m, u) = (shape.m as f64, shape.u as f64);
        if shape.m > 0 && a1 + m * self.down < a_min - eps {
            return false;
        }
        if shape.h > 0 && a1 + (m + 1.0) * self.down > a_min + eps {
            return false;
        }
        let prev = if shape.h > 0 { a_min } else { a1 + m * self.down };
        let steep = (prev + self.down).max(a_min);
        if c < steep - eps || c > (prev + self.up).min(0.0) + eps {
            return false;
        }
        c + u * self.up <= eps && c + (u + 1.0) * self.up >= -eps
    }

    /// Setpoints of a program after `a1`, ending with the landing setpoint 0.
    pub fn setpoints(&self, shape: Shape, a1: f64, c: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(shape.landing());
        out.push(a1);
        for i in 1..=shape.m {
            out.push(a1 + i as f64 * self.down);
        }
        out.extend(std::iter::repeat_n(self.l.a_min, shape.h));
        out.push(c);
        for i in 1..=shape.u {
            out.push(c + i as f64 * self.up);
        }
        out.push(0.0);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> KinematicLimits {
        KinematicLimits::new((-1.0, 1.0), (-1.0, 1.0), (-2.0, 2.0), (-10.0, 10.0)).unwrap()
    }

    #[test]
    fn zero_return_matches_stepping() {
        let l = small();
        let ctx = Ctx::new(&l, 0.1);
        for a in [-2.0, -1.5, -1.0, -0.3, 0.0, 0.4, 1.0, 1.7, 2.0] {
            let (mut v, mut x) = (0.0, a);
            while x != 0.0 {
                let next: f64 = if x < 0.0 { (x + ctx.up).min(0.0) } else { (x + ctx.down).max(0.0) };
                v += 0.5 * ctx.t * (x + next);
                x = next;
            }
            assert!((v - ctx.zero_return(a)).abs() < 1e-15, "a = {a}");
        }
    }

    #[test]
    fn solved_program_lands_on_target() {
        let l = small();
        let ctx = Ctx::new(&l, 0.1);
        let s = JointState::new(0.2, 0.7, 0.5);
        let s1 = integrate_interval(&s, 1.0, 0.1);
        let Stop::Lands { shape, peak } = ctx.stop(&s1).unwrap() else { panic!() };
        let (a1, c2) = ctx.solve(&s, shape, peak);
        assert!((a1 - 1.0).abs() < 1e-9);
        assert!(ctx.consistent(shape, a1, c2));
        let mut x = s;
        for a in ctx.setpoints(shape, a1, c2) {
            x = integrate_interval(&x, a, 0.1);
        }
        assert!((x.p - peak).abs() < 1e-12 && x.v.abs() < 1e-12 && x.a == 0.0);
    }
}
