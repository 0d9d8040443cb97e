//! Policies, rollouts and metrics for evaluating the safe range.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{map_action, DecisionGrid, JointState, KinematicLimits};
use crate::saferange::safe_acceleration_range;
use crate::trajectory::{check_limits, Trajectory, DEFAULT_N_SUB, DEFAULT_TOL};

/// Tolerance for detecting rest at a position limit, relative to the limit scales.
pub const REST_TOL: f64 = 1e-6;

/// Maps the joint state to an action in [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Policy {
    Constant { m: f64 },
    Random { seed: u64 },
    BangBang,
}

/// Heading of the bang-bang policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Up,
    Down,
}

/// Drives toward one position limit until resting there, then turns around.
pub fn bang_bang_policy(s: &JointState, l: &KinematicLimits, dir: &mut Direction) -> f64 {
    let at_rest =
        |target: f64| (s.p - target).abs() <= REST_TOL * l.pos_span() && s.v.abs() <= REST_TOL * l.vel_scale();
    match *dir {
        Direction::Up if at_rest(l.p_max) => *dir = Direction::Down,
        Direction::Down if at_rest(l.p_min) => *dir = Direction::Up,
        _ => {}
    }
    match dir {
        Direction::Up => 1.0,
        Direction::Down => -1.0,
    }
}

enum Runner {
    Constant(f64),
    Random(Box<ChaCha8Rng>),
    BangBang(Direction),
}

impl Runner {
    fn new(policy: Policy) -> Self {
        match policy {
            Policy::Constant { m } => Runner::Constant(m.clamp(-1.0, 1.0)),
            Policy::Random { seed } => Runner::Random(Box::new(ChaCha8Rng::seed_from_u64(seed))),
            Policy::BangBang => Runner::BangBang(Direction::Up),
        }
    }

    fn act(&mut self, s: &JointState, l: &KinematicLimits) -> f64 {
        match self {
            Runner::Constant(m) => *m,
            Runner::Random(rng) => rng.gen_range(-1.0..=1.0),
            Runner::BangBang(dir) => bang_bang_policy(s, l, dir),
        }
    }
}

/// Number of decision steps in `duration`, which must be a multiple of the period.
pub fn steps_for(duration: f64, grid: &DecisionGrid) -> Result<usize> {
    let n = (duration / grid.period()).round();
    if duration.is_nan() || duration <= 0.0 || n < 1.0 || (n * grid.period() - duration).abs() > 1e-9 * duration {
        return Err(Error::InvalidArgument(format!(
            "duration {duration} is not a positive multiple of the period {}",
            grid.period()
        )));
    }
    Ok(n as usize)
}

/// Rolls out `policy` through the safe range for `duration` seconds.
pub fn rollout(
    policy: Policy,
    s0: JointState,
    l: &KinematicLimits,
    grid: &DecisionGrid,
    duration: f64,
) -> Result<Trajectory> {
    let steps = steps_for(duration, grid)?;
    let mut runner = Runner::new(policy);
    let mut traj = Trajectory::new(s0, *grid, DEFAULT_N_SUB);
    let mut s = s0;
    for _ in 0..steps {
        let range = safe_acceleration_range(&s, l, grid)?;
        let m = runner.act(&s, l);
        let a = map_action(range, m)?.acceleration;
        traj.ranges.push(range);
        traj.actions.push(m);
        s = traj.push(a);
    }
    Ok(traj)
}

/// Summary numbers of one trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub avg_norm_velocity: f64,
    pub max_norm_position: f64,
    pub max_norm_velocity: f64,
    pub violation: bool,
}

pub fn metrics(traj: &Trajectory, l: &KinematicLimits) -> Result<Metrics> {
    let report = check_limits(traj, l, DEFAULT_TOL)?;
    let vs = l.v_max.max(-l.v_min);
    let w = &traj.samples;
    let avg = if w.len() < 2 {
        w[0].v.abs() / vs
    } else {
        let area: f64 = w.windows(2).map(|p| 0.5 * (p[0].v.abs() + p[1].v.abs()) * (p[1].t - p[0].t)).sum();
        area / (w[w.len() - 1].t - w[0].t) / vs
    };
    Ok(Metrics {
        avg_norm_velocity: avg,
        max_norm_position: report.max_norm_position,
        max_norm_velocity: report.max_norm_velocity,
        violation: !report.is_clean(),
    })
}

/// One CSV line: a dense sample with the range and action of its decision step.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub t: f64,
    pub p: f64,
    pub v: f64,
    pub a: f64,
    pub j: f64,
    pub range_lo: Option<f64>,
    pub range_hi: Option<f64>,
    pub action: Option<f64>,
}

/// Dense rows of a trajectory. Samples on a decision step carry the range
/// and action chosen there.
pub fn rows(traj: &Trajectory) -> Vec<Row> {
    let n_sub = traj.n_sub;
    traj.samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let k = i / n_sub;
            let on_step = i % n_sub == 0;
            let range = if on_step { traj.ranges.get(k) } else { None };
            Row {
                t: s.t,
                p: s.p,
                v: s.v,
                a: s.a,
                j: s.j,
                range_lo: range.map(|r| r.lo),
                range_hi: range.map(|r| r.hi),
                action: if on_step { traj.actions.get(k).copied() } else { None },
            }
        })
        .collect()
}

pub fn write_csv<W: Write>(traj: &Trajectory, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    for row in rows(traj) {
        w.serialize(row).map_err(|e| Error::Output(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Output(e.to_string()))?;
    Ok(())
}

/// Outcome of a batch of random rollouts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzSummary {
    pub seed: u64,
    #[serde(rename = "f_N")]
    pub f_n: f64,
    pub episodes: usize,
    /// Episodes with any limit violation or an empty safe range.
    pub violations: usize,
    pub violation_rate: f64,
    /// Episodes where the safe range could not be computed.
    pub infeasible: usize,
    pub max_norm_position: f64,
    pub max_norm_velocity: f64,
    pub avg_norm_velocity: f64,
}

fn episode(l: &KinematicLimits, grid: &DecisionGrid, duration: f64, seed: u64) -> Option<Metrics> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p0 = rng.gen_range(l.p_min..=l.p_max);
    let policy = Policy::Random { seed: rng.gen() };
    rollout(policy, JointState::rest(p0), l, grid, duration).and_then(|traj| metrics(&traj, l)).ok()
}

/// Seeded random rollouts from random rest positions, run in parallel.
///
/// Episode `i` is seeded with `seed + i`, so the result does not depend on
/// the number of threads. `threads` caps the worker pool.
pub fn fuzz(
    l: &KinematicLimits,
    grid: &DecisionGrid,
    episodes: usize,
    duration: f64,
    seed: u64,
    threads: Option<usize>,
) -> Result<FuzzSummary> {
    if episodes == 0 {
        return Err(Error::InvalidArgument("episodes must be positive".into()));
    }
    steps_for(duration, grid)?;
    let run = || -> Vec<Option<Metrics>> {
        (0..episodes as u64).into_par_iter().map(|i| episode(l, grid, duration, seed.wrapping_add(i))).collect()
    };
    let results = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(run),
        None => run(),
    };
    let mut summary = FuzzSummary {
        seed,
        f_n: grid.frequency(),
        episodes,
        violations: 0,
        violation_rate: 0.0,
        infeasible: 0,
        max_norm_position: 0.0,
        max_norm_velocity: 0.0,
        avg_norm_velocity: 0.0,
    };
    for e in &results {
        match e {
            Some(m) => {
                summary.violations += m.violation as usize;
                summary.max_norm_position = summary.max_norm_position.max(m.max_norm_position);
                summary.max_norm_velocity = summary.max_norm_velocity.max(m.max_norm_velocity);
                summary.avg_norm_velocity += m.avg_norm_velocity / episodes as f64;
            }
            None => {
                summary.violations += 1;
                summary.infeasible += 1;
            }
        }
    }
    summary.violation_rate = summary.violations as f64 / episodes as f64;
    Ok(summary)
}

/// What limits an interval of a trajectory, as read off its kinematics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// Acceleration rising at `j_max`.
    JerkMax,
    AccMax,
    /// Positive acceleration falling at `j_min`.
    JerkMin,
    VelMax,
    /// Non-positive acceleration while still moving.
    Braking,
    RestAtMax,
    Other,
}

/// Classifies every interval and merges consecutive equal labels.
pub fn phases(traj: &Trajectory, l: &KinematicLimits) -> Vec<Phase> {
    let tol = 1e-9;
    let near = |x: f64, y: f64, scale: f64| (x - y).abs() <= tol * scale;
    let t = traj.grid.period();
    let at_rest =
        |s: &JointState| (s.p - l.p_max).abs() <= REST_TOL * l.pos_span() && s.v.abs() <= REST_TOL * l.vel_scale();
    let mut out: Vec<Phase> = Vec::new();
    for k in 0..traj.steps() {
        let (s, e) = (traj.states[k], traj.states[k + 1]);
        let j = (e.a - s.a) / t;
        let atol = tol * l.acc_scale();
        let phase = if at_rest(&s) && at_rest(&e) {
            Phase::RestAtMax
        } else if near(j, l.j_max, l.jerk_scale()) && e.a > atol {
            Phase::JerkMax
        } else if near(s.a, l.a_max, l.acc_scale()) && near(e.a, l.a_max, l.acc_scale()) {
            Phase::AccMax
        } else if near(j, l.j_min, l.jerk_scale()) && e.a >= -atol {
            Phase::JerkMin
        } else if near(s.v, l.v_max, l.vel_scale()) && near(e.v, l.v_max, l.vel_scale()) {
            Phase::VelMax
        } else if s.a <= atol && e.a <= atol {
            Phase::Braking
        } else {
            Phase::Other
        };
        if out.last() != Some(&phase) {
            out.push(phase);
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
    fn zero_action_from_rest_stays_at_rest() {
        let l = KinematicLimits::standard();
        let g = DecisionGrid::new(10.0).unwrap();
        let traj = rollout(Policy::Constant { m: 0.0 }, JointState::rest(0.3), &l, &g, 2.0).unwrap();
        assert!(traj.states.iter().all(|s| *s == JointState::rest(0.3)));
        assert_eq!(metrics(&traj, &l).unwrap().avg_norm_velocity, 0.0);
    }

    #[test]
    fn bang_bang_flips_at_rest() {
        let l = small();
        let mut dir = Direction::Up;
        assert_eq!(bang_bang_policy(&JointState::rest(0.0), &l, &mut dir), 1.0);
        assert_eq!(bang_bang_policy(&JointState::rest(1.0), &l, &mut dir), -1.0);
        assert_eq!(dir, Direction::Down);
        assert_eq!(bang_bang_policy(&JointState::new(0.0, -0.5, 0.0), &l, &mut dir), -1.0);
    }

    #[test]
    fn duration_must_match_grid() {
        let g = DecisionGrid::new(10.0).unwrap();
        assert_eq!(steps_for(5.0, &g).unwrap(), 50);
        assert!(steps_for(0.05, &g).is_err());
        assert!(steps_for(0.0, &g).is_err());
    }

    #[test]
    fn random_rollout_is_reproducible() {
        let l = small();
        let g = DecisionGrid::new(20.0).unwrap();
        let a = rollout(Policy::Random { seed: 7 }, JointState::rest(0.0), &l, &g, 1.0).unwrap();
        let b = rollout(Policy::Random { seed: 7 }, JointState::rest(0.0), &l, &g, 1.0).unwrap();
        assert_eq!(a, b);
        assert!(a.actions.iter().all(|m| (-1.0..=1.0).contains(m)));
    }

    #[test]
    fn cruise_at_velocity_limit_averages_one() {
        let l = small();
        let g = DecisionGrid::new(10.0).unwrap();
        let traj = Trajectory::from_setpoints(JointState::new(-1.0, 1.0, 0.0), &[0.0; 10], g, 4);
        assert!((metrics(&traj, &l).unwrap().avg_norm_velocity - 1.0).abs() < 1e-15);
    }

    #[test]
    fn csv_layout() {
        let l = small();
        let g = DecisionGrid::new(10.0).unwrap();
        let traj = rollout(Policy::Constant { m: 1.0 }, JointState::rest(0.0), &l, &g, 0.2).unwrap();
        let mut buf = Vec::new();
        write_csv(&traj, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,p,v,a,j,range_lo,range_hi,action"));
        assert_eq!(text.lines().count(), 1 + 2 * DEFAULT_N_SUB + 1);
        assert!(!text.contains('\r'));
    }
}
