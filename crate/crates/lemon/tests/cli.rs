use std::path::Path;
use std::process::{Command, Output};

fn lemon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lemon"))
        .args(args)
        .output()
        .expect("run lemon")
}

fn stdout(args: &[&str]) -> String {
    let o = lemon(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).expect("utf-8")
}

fn golden(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

#[test]
fn phase_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let base = ["phase", "--b", "1.51", "--grid", "40", "--iterations", "400", "--seed", "11"];
    for (path, threads) in [(&a, "1"), (&b, "4")] {
        let mut args = base.to_vec();
        args.extend(["--threads", threads, "--out", path.to_str().unwrap()]);
        assert!(lemon(&args).status.success());
    }
    let (a, b) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(a, b);
    assert!(a.starts_with(b"traj_id,step,phi,theta\n"));
    assert!(!a.contains(&b'\r'));
    let other = stdout(&["phase", "--b", "1.51", "--grid", "40", "--iterations", "400", "--seed", "12"]);
    assert_ne!(other.as_bytes(), &a[..]);
}

#[test]
fn phase_with_zero_iterations_emits_initial_conditions() {
    let s = stdout(&["phase", "--b", "1.6", "--grid", "25", "--iterations", "0"]);
    let rows: Vec<&str> = s.lines().skip(1).collect();
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().all(|r| r.split(',').nth(1) == Some("0")));
}

#[test]
fn constants_json_envelope() {
    let s = stdout(&["constants", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["command", "config", "results", "residuals"]);
    assert_eq!(v["command"], "constants");
    let get = |name: &str| {
        v["results"]
            .as_array()
            .unwrap()
            .iter()
            .find(|r| r["name"] == name)
            .unwrap()["value"]
            .as_f64()
            .unwrap()
    };
    assert_eq!(get("b_max"), 1.0 + 0.5f64.sqrt());
    assert!((get("b_crit") - 1.63477).abs() < 5e-5);
    assert!((get("b2") - 1.58885).abs() < 5e-5);
}

#[test]
fn numbers_carry_seventeen_significant_digits() {
    let s = stdout(&["constants"]);
    for line in s.lines().skip(1) {
        let value = line.split(',').nth(1).unwrap();
        let mantissa = value.split('e').next().unwrap().replace(['-', '.'], "");
        assert_eq!(mantissa.len(), 17, "{value}");
    }
}

#[test]
fn splitting_sweep_is_robust_and_deterministic() {
    let args = ["splitting-sweep", "--b-range", "1.505", "1.56", "12"];
    let a = stdout(&args);
    let mut rows = a.lines();
    assert_eq!(rows.next(), Some("b,delta,angle_s,angle_u,status"));
    let ok = rows.filter(|r| r.ends_with(",ok")).count();
    assert!(ok >= 10, "{a}");
    let mut single = args.to_vec();
    single.extend(["--threads", "1"]);
    assert_eq!(a, stdout(&single));
}

#[test]
fn orbit_svg_matches_golden_file() {
    let s = stdout(&["orbit", "--b", "1.55", "--format", "svg"]);
    let path = golden("orbit_b1.55.svg");
    if std::env::var_os("LEMON_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &s).unwrap();
    }
    assert_eq!(s, std::fs::read_to_string(&path).unwrap());
}

#[test]
fn verify_filter_runs_only_the_selected_group() {
    let s = stdout(&["verify", "--filter", "traces"]);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines.len(), 3, "{s}");
    assert!(lines.iter().all(|l| l.starts_with("[PASS]")));
}

#[test]
fn verify_writes_a_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.json");
    let o = lemon(&["verify", "--filter", "constants", "--format", "json", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["command"], "verify");
    assert_eq!(v["residuals"]["failed"], 0);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["no-such-command"][..],
        &["phase", "--b", "2.5"],
        &["phase", "--b-range", "1.5", "1.6", "3"],
        &["phase", "--format", "pdf"],
        &["splitting-sweep", "--b", "1.45"],
        &["constants", "--format", "svg"],
        &["verify", "--filter", "nothing-matches-this"],
        &["orbit", "--threads", "0"],
    ] {
        assert_eq!(lemon(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn help_exits_cleanly() {
    let o = lemon(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let help = String::from_utf8(o.stdout).unwrap();
    for sub in ["phase", "orbit", "periodic", "curves", "manifold", "splitting-sweep", "constants", "verify"] {
        assert!(help.contains(sub), "{sub}");
    }
}

#[test]
fn periodic_finds_the_four_orbit_points_at_low_b() {
    let s = stdout(&["periodic", "--b", "1.52", "--grid", "120"]);
    assert_eq!(s.lines().count(), 5, "{s}");
}
