//! Safe acceleration ranges for jerk-limited joints.
//!
//! A joint is driven by acceleration setpoints sent at a fixed decision
//! frequency and linearly interpolated in between, so jerk is piecewise
//! constant. At each decision step [`safe_acceleration_range`] returns the
//! interval of next setpoints from which the joint can still be kept within
//! its position, velocity, acceleration and jerk limits forever. Any action in
//! [-1, 1] can then be mapped into that interval with [`map_action`].
//!
//! ```
//! use safe_accel::{safe_acceleration_range, map_action, integrate_interval};
//! use safe_accel::{DecisionGrid, JointState, KinematicLimits};
//!
//! let limits = KinematicLimits::standard();
//! let grid = DecisionGrid::new(10.0)?;
//! let mut s = JointState::rest(0.0);
//! for _ in 0..50 {
//!     let range = safe_acceleration_range(&s, &limits, &grid)?;
//!     let a = map_action(range, 1.0)?.acceleration;
//!     s = integrate_interval(&s, a, grid.period());
//! }
//! assert!(s.p <= limits.p_max);
//! # Ok::<(), safe_accel::Error>(())
//! ```

pub mod baseline;
pub mod config;
pub mod error;
pub mod kinematics;
pub mod oracle;
pub mod profiles;
pub mod roots;
pub mod saferange;
pub mod tasks;
pub mod trajectory;

pub use error::{Error, Result};
pub use kinematics::{
    integrate_interval, map_action, mirror, sample_interval, AccelerationRange, DecisionGrid, JointState,
    KinematicLimits, MappedAction, Sample,
};
pub use profiles::{
    acc_jerk_window, next_decision_step, pos_limit_bound, pos_limit_max_acc, pos_limit_profile, vel_limit_bound,
    vel_limit_max_acc, BrakingProfile, Segment,
};
pub use saferange::{safe_acceleration_range, translate_range, Target};
pub use trajectory::{check_limits, Trajectory, ViolationCounts, ViolationReport};
