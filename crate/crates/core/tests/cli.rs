use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sobolev_stab::params::sharp_constant;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sobolev-stab-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sobolev-stab")).args(args).output().expect("binary runs")
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn constants_four_two_passes() {
    let dir = scratch("constants");
    let out = run(&["constants", "--n", "4", "--p", "2", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(&dir.join("constants_constants.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# sobolev-stab constants v1"));
    assert_eq!(lines.next(), Some("quantity,value"));
    let s: f64 = csv
        .lines()
        .find_map(|l| l.strip_prefix("S,"))
        .expect("S row")
        .parse()
        .unwrap();
    let want = sharp_constant(4, 2.0).unwrap();
    assert!((s - want).abs() <= 1e-11 * want, "{s} vs {want}");
    let checks = read(&dir.join("constants_checks.csv"));
    assert!(checks.lines().skip(2).all(|l| l.contains(",PASS,")), "{checks}");
}

#[test]
fn spectrum_four_two_flags_known_eigenvalues() {
    let dir = scratch("spectrum");
    let out = run(&["spectrum", "--n", "4", "--p", "2", "--format", "json", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let json: serde_json::Value = serde_json::from_str(&read(&dir.join("spectrum.json"))).unwrap();
    assert_eq!(json["command"], "spectrum");
    assert_eq!(json["schema"], 1);
    let checks = json["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["criterion"] == 3 && c["pass"] == true));
    assert!(checks.iter().all(|c| c["pass"] == true));
}

#[test]
fn bad_flag_is_a_usage_error() {
    assert_eq!(run(&["constants", "--colour", "red"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["constants", "--n", "3", "--p", "3"]).status.code(), Some(2));
    assert_eq!(run(&["constants", "--mesh", "100"]).status.code(), Some(2));
}

#[test]
fn bad_config_reports_its_line() {
    let dir = scratch("config");
    let path = dir.join("run.conf");
    fs::write(&path, "# sweep\nn = 4\np = 2.5\nquad = lots\n").unwrap();
    let out = run(&["constants", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4") && err.contains("quad"), "{err}");
}

#[test]
fn flags_override_the_config_file() {
    let dir = scratch("override");
    let path = dir.join("run.conf");
    fs::write(&path, "n = 5\np = 3\nformat = json\n").unwrap();
    let out = run(&["constants", "--config", path.to_str().unwrap(), "--p", "2", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&read(&dir.join("constants.json"))).unwrap();
    assert_eq!((json["n"].as_u64(), json["p"].as_f64()), (Some(5), Some(2.0)));
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (scratch("rerun-a"), scratch("rerun-b"));
    for dir in [&a, &b] {
        let out = run(&["poincare", "--n", "3", "--p", "2.5", "--quad", "256", "--plot", "--out", dir.to_str().unwrap()]);
        assert!(out.status.code().is_some_and(|c| c < 2));
    }
    let names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert!(!names.is_empty());
    for name in names {
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name:?}");
    }
}
