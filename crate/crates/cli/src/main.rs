//! `safe-accel` command-line tool.
//!
//! Exit codes: 0 success, 1 malformed input, 2 infeasible or inadmissible
//! state, 3 limit violation in a generated trajectory.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use safe_accel::baseline::{compare_rollout, comparison_setup, write_compare_csv};
use safe_accel::config::{parse_config, parse_freqs, parse_state, Config, JointConfig};
use safe_accel::tasks::{fuzz, metrics, rollout, write_csv, Policy};
use safe_accel::{safe_acceleration_range, DecisionGrid, Error, JointState};

#[derive(Parser)]
#[command(name = "safe-accel", version, about = "Safe acceleration ranges for jerk-limited joints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Joint {
    /// Joint configuration JSON; the shipped standard config when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Joint index within the config.
    #[arg(long, default_value_t = 0)]
    joint: usize,
    /// Decision frequency in Hz; the config value when omitted.
    #[arg(long)]
    freq: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Max,
    Random,
    Bangbang,
}

#[derive(Subcommand)]
enum Command {
    /// Safe range of the next acceleration setpoint.
    Range {
        #[command(flatten)]
        joint: Joint,
        /// State as p,v,a.
        #[arg(long, allow_hyphen_values = true)]
        state: String,
    },
    /// Roll out a policy through the safe range and write dense CSV.
    Rollout {
        #[command(flatten)]
        joint: Joint,
        #[arg(long, value_enum, default_value = "max")]
        policy: PolicyArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5.0)]
        duration: f64,
        /// Start state as p,v,a.
        #[arg(long, allow_hyphen_values = true, default_value = "0,0,0")]
        start: String,
        /// CSV output; stdout when omitted, with the summary on stderr.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random rollouts from random rest positions; prints a JSON summary.
    Fuzz {
        #[command(flatten)]
        joint: Joint,
        #[arg(long, default_value_t = 1000)]
        episodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5.0)]
        duration: f64,
    },
    /// Always-max rollouts of the continuous baseline and the safe range.
    Compare {
        /// Limits JSON; the built-in comparison setup when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        joint: usize,
        #[arg(long, default_value = "300,10,4")]
        freqs: String,
        /// Start state as p,v,a; defaults to the comparison setup's start.
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
        #[arg(long, default_value_t = 5.0)]
        duration: f64,
        /// Paired CSV output; only the summary is printed when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Wall time per safe range computation on states of a random rollout.
    Bench {
        #[command(flatten)]
        joint: Joint,
        #[arg(long, default_value_t = 10000)]
        iters: usize,
    },
}

/// Error with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InfeasibleState | Error::InadmissibleState => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

fn input(message: String) -> Failure {
    Failure { code: 1, message }
}

fn load_config(path: &Option<PathBuf>) -> Result<Option<Config>, Failure> {
    match path {
        None => Ok(None),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| input(format!("{}: {e}", p.display())))?;
            Ok(Some(parse_config(&text)?))
        }
    }
}

fn pick(config: Config, index: usize) -> Result<JointConfig, Failure> {
    let n = config.joints.len();
    config.joints.into_iter().nth(index).ok_or_else(|| input(format!("joint {index} out of range ({n} joints)")))
}

fn resolve(j: &Joint) -> Result<JointConfig, Failure> {
    let config = load_config(&j.config)?.unwrap_or_else(Config::standard);
    let mut joint = pick(config, j.joint)?;
    if let Some(f) = j.freq {
        joint.grid = DecisionGrid::new(f)?;
    }
    Ok(joint)
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, value).map_err(|e| input(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn threads_from_env() -> Result<Option<usize>, Failure> {
    match std::env::var("SAFE_ACCEL_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n > 0)
            .map(Some)
            .ok_or_else(|| input(format!("SAFE_ACCEL_THREADS must be a positive integer, got {v:?}"))),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Range { joint, state } => {
            let j = resolve(&joint)?;
            let s = parse_state(&state)?;
            let r = safe_acceleration_range(&s, &j.limits, &j.grid)?;
            print_json(&json!({ "lo": r.lo, "hi": r.hi }))
        }
        Command::Rollout { joint, policy, seed, duration, start, out } => {
            let j = resolve(&joint)?;
            let s0 = parse_state(&start)?;
            let policy = match policy {
                PolicyArg::Max => Policy::Constant { m: 1.0 },
                PolicyArg::Random => Policy::Random { seed },
                PolicyArg::Bangbang => Policy::BangBang,
            };
            let traj = rollout(policy, s0, &j.limits, &j.grid, duration)?;
            let m = metrics(&traj, &j.limits)?;
            let summary = json!({
                "policy": policy,
                "seed": seed,
                "f_N": j.grid.frequency(),
                "steps": traj.steps(),
                "metrics": m,
            });
            match out {
                Some(path) => {
                    write_csv(&traj, BufWriter::new(File::create(&path)?))?;
                    print_json(&summary)?;
                }
                None => {
                    write_csv(&traj, io::stdout().lock())?;
                    eprintln!("{summary}");
                }
            }
            if m.violation {
                return Err(Failure { code: 3, message: "limit violation".into() });
            }
            Ok(())
        }
        Command::Fuzz { joint, episodes, seed, duration } => {
            let j = resolve(&joint)?;
            let summary = fuzz(&j.limits, &j.grid, episodes, duration, seed, threads_from_env()?)?;
            print_json(&summary)?;
            if summary.violations > 0 {
                return Err(Failure { code: 3, message: format!("{} episodes violated limits", summary.violations) });
            }
            Ok(())
        }
        Command::Compare { config, joint, freqs, start, duration, out } => {
            let (default_limits, default_start) = comparison_setup();
            let limits = match load_config(&config)? {
                Some(c) => pick(c, joint)?.limits,
                None => default_limits,
            };
            let s0 = start.as_deref().map(parse_state).transpose()?.unwrap_or(default_start);
            let cmp = compare_rollout(s0, &limits, &parse_freqs(&freqs)?, duration)?;
            if let Some(path) = out {
                write_compare_csv(&cmp, BufWriter::new(File::create(&path)?))?;
            }
            let span = limits.pos_span();
            let rows: Vec<_> = cmp
                .iter()
                .map(|c| {
                    let side = |r: &safe_accel::baseline::Run| {
                        json!({
                            "max_norm_position": r.report.max_norm_position,
                            "max_norm_velocity": r.report.max_norm_velocity,
                            "terminal_p": r.terminal.p,
                            "shortfall": (limits.p_max - r.terminal.p) / span,
                        })
                    };
                    json!({ "f_N": c.f_n, "baseline": side(&c.baseline), "ours": side(&c.ours) })
                })
                .collect();
            print_json(&rows)?;
            if cmp.iter().any(|c| !c.ours.report.is_clean()) {
                return Err(Failure { code: 3, message: "limit violation".into() });
            }
            Ok(())
        }
        Command::Bench { joint, iters } => {
            if iters == 0 {
                return Err(input("iters must be positive".into()));
            }
            let j = resolve(&joint)?;
            let states = bench_states(&j)?;
            let mut times = Vec::with_capacity(iters);
            for i in 0..iters {
                let s = states[i % states.len()];
                let t0 = Instant::now();
                let r = safe_acceleration_range(&s, &j.limits, &j.grid)?;
                times.push(t0.elapsed().as_secs_f64() * 1e6);
                std::hint::black_box(r);
            }
            let mean = times.iter().sum::<f64>() / iters as f64;
            times.sort_by(f64::total_cmp);
            let pct = |q: f64| times[((q * (iters - 1) as f64).round() as usize).min(iters - 1)];
            print_json(&json!({
                "iters": iters,
                "f_N": j.grid.frequency(),
                "mean_us": mean,
                "p50_us": pct(0.5),
                "p90_us": pct(0.9),
                "p99_us": pct(0.99),
                "max_us": times[iters - 1],
            }))
        }
    }
}

/// States visited by a seeded random rollout, so every one is reachable.
fn bench_states(j: &JointConfig) -> Result<Vec<JointState>, Failure> {
    let steps = 1000usize;
    let duration = steps as f64 * j.grid.period();
    let traj = rollout(Policy::Random { seed: 1 }, JointState::rest(0.0), &j.limits, &j.grid, duration)?;
    Ok(traj.states[..steps].to_vec())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
