//! Text inputs: joint configuration JSON, state triples and frequency lists.
//!
//! ```json
//! { "joints": [ { "limits": { "p": [-2.9, 2.9], "v": [-1.9, 1.9],
//!                             "a": [-10, 10], "j": [-400, 400] },
//!                 "f_N": 10 } ] }
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{DecisionGrid, JointState, KinematicLimits};

/// The standard configuration shipped with the crate.
pub const STANDARD_JSON: &str = include_str!("../configs/standard.json");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLimits {
    p: [f64; 2],
    v: [f64; 2],
    a: [f64; 2],
    j: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJoint {
    limits: RawLimits,
    #[serde(rename = "f_N")]
    f_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    joints: Vec<RawJoint>,
}

/// Limits and decision grid of one joint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointConfig {
    pub limits: KinematicLimits,
    pub grid: DecisionGrid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub joints: Vec<JointConfig>,
}

impl Config {
    pub fn standard() -> Self {
        parse_config(STANDARD_JSON).expect("shipped config is valid")
    }

    pub fn to_json(&self) -> String {
        let raw = RawConfig {
            joints: self
                .joints
                .iter()
                .map(|j| {
                    let l = &j.limits;
                    RawJoint {
                        limits: RawLimits {
                            p: [l.p_min, l.p_max],
                            v: [l.v_min, l.v_max],
                            a: [l.a_min, l.a_max],
                            j: [l.j_min, l.j_max],
                        },
                        f_n: j.grid.frequency(),
                    }
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("plain numbers serialize")
    }
}

pub fn parse_config(text: &str) -> Result<Config> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    if raw.joints.is_empty() {
        return Err(Error::Config("no joints".into()));
    }
    let joints = raw
        .joints
        .iter()
        .map(|j| {
            let r = &j.limits;
            let limits = KinematicLimits::new((r.p[0], r.p[1]), (r.v[0], r.v[1]), (r.a[0], r.a[1]), (r.j[0], r.j[1]))?;
            Ok(JointConfig { limits, grid: DecisionGrid::new(j.f_n)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Config { joints })
}

fn parse_numbers(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|x| {
            let x = x.trim();
            x.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::InvalidArgument(format!("not a finite number: {x:?}")))
        })
        .collect()
}

/// Parses `"p,v,a"`.
pub fn parse_state(text: &str) -> Result<JointState> {
    match parse_numbers(text)?[..] {
        [p, v, a] => Ok(JointState::new(p, v, a)),
        _ => Err(Error::InvalidArgument(format!("expected p,v,a, got {text:?}"))),
    }
}

/// Parses a comma separated list of positive frequencies.
pub fn parse_freqs(text: &str) -> Result<Vec<f64>> {
    let f = parse_numbers(text)?;
    if let Some(bad) = f.iter().find(|x| **x <= 0.0) {
        return Err(Error::InvalidArgument(format!("frequency must be positive: {bad}")));
    }
    Ok(f)
}
