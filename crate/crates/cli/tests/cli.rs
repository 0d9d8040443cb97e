use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_safe-accel")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("safe-accel-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn range_mid_rest() {
    let out = run(&["range", "--freq", "10", "--state", "0,0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!((v["lo"].as_f64(), v["hi"].as_f64()), (Some(-10.0), Some(10.0)));
}

#[test]
fn range_at_the_boundary() {
    let out = run(&["range", "--freq", "10", "--state", "2.9,0,0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["hi"].as_f64(), Some(0.0));
}

#[test]
fn range_rejects_bad_states() {
    let small = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/configs/small.json");
    assert_eq!(run(&["range", "--config", small, "--state", "0.9,0.5,0"]).status.code(), Some(2));
    assert_eq!(run(&["range", "--state", "0,5,0"]).status.code(), Some(2));
    assert_eq!(run(&["range", "--state", "0,0"]).status.code(), Some(1));
    assert_eq!(run(&["range", "--state", "0,-1,x"]).status.code(), Some(1));
    assert_eq!(run(&["range", "--freq", "0", "--state", "0,0,0"]).status.code(), Some(1));
}

#[test]
fn malformed_config_is_an_input_error() {
    let bad = scratch("bad.json");
    std::fs::write(&bad, "{\"joints\": [").unwrap();
    let out = run(&["range", "--config", bad.to_str().unwrap(), "--state", "0,0,0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    let missing = run(&["range", "--config", "/nonexistent/limits.json", "--state", "0,0,0"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn random_rollouts_are_byte_identical() {
    let a = scratch("a.csv");
    let b = scratch("b.csv");
    for path in [&a, &b] {
        let out =
            run(&["rollout", "--policy", "random", "--seed", "4", "--duration", "2", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(json(&out)["metrics"]["violation"].as_bool(), Some(false));
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!x.is_empty());
    assert_eq!(x, y);
}

#[test]
fn rollout_csv_to_stdout() {
    let out = run(&["rollout", "--policy", "bangbang", "--freq", "4", "--duration", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t,p,v,a,j,range_lo,range_hi,action\n"));
    assert!(String::from_utf8(out.stderr).unwrap().contains("avg_norm_velocity"));
    // the duration must be a whole number of periods
    assert_eq!(run(&["rollout", "--freq", "4", "--duration", "0.3"]).status.code(), Some(1));
}

#[test]
fn fuzz_summary() {
    let out = run(&["fuzz", "--freq", "20", "--episodes", "20", "--duration", "1", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["violations"].as_u64(), Some(0));
    assert_eq!(v["f_N"].as_f64(), Some(20.0));
    assert_eq!(run(&["fuzz", "--episodes", "0"]).status.code(), Some(1));
}

#[test]
fn compare_writes_paired_csv() {
    let path = scratch("cmp.csv");
    let out = run(&["compare", "--freqs", "10,4", "--duration", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out).is_array());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("f_n,method,"));
    assert!(text.contains(",baseline,") && text.contains(",ours,"));
}

#[test]
fn bench_reports_timings() {
    let out = run(&["bench", "--iters", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for key in ["mean_us", "p50_us", "p90_us", "p99_us", "max_us"] {
        assert!(v[key].as_f64().is_some_and(|x| x >= 0.0), "{key}");
    }
    assert_eq!(run(&["bench", "--iters", "0"]).status.code(), Some(1));
}
