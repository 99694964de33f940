use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn muskat(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_muskat"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn out_of_range_cfl_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.cfg"), "n = 64\ncfl = 0.9\n").unwrap();
    let o = muskat(dir.path(), &["run", "--config", "run.cfg"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn unknown_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.cfg"), "n = 64\nfoo = 1\n").unwrap();
    let o = muskat(dir.path(), &["run", "--config", "run.cfg"]);
    assert_eq!(o.status.code(), Some(2));
    let o = muskat(dir.path(), &["run", "--set", "foo=1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn zero_end_time_writes_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = muskat(dir.path(), &["run", "--n", "64", "--t_end", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.starts_with("t,linf,s=0,s=1,s=2,besov_nu=-1,sobolev_l=2,dt\n"));
}

#[test]
fn minimal_run_records_many_rows_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "d = 1\nn = 256\nt_end = 10\ninitial.kind = single-mode\ninitial.amplitude = 0.1\n";
    fs::write(dir.path().join("run.cfg"), cfg).unwrap();
    let a = muskat(dir.path(), &["run", "--config", "run.cfg", "--out", "a"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert!(!stdout(&a).contains("FAIL"));
    let rows = fs::read_to_string(dir.path().join("a/trajectory.csv")).unwrap();
    assert!(rows.lines().count() > 100);
    let b = muskat(dir.path(), &["run", "--config", "run.cfg", "--out", "b"]);
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(rows, fs::read_to_string(dir.path().join("b/trajectory.csv")).unwrap());
}

#[test]
fn flags_override_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.cfg"), "n = 64\nt_end = 1\ns_list = 0, 3\n").unwrap();
    let o = muskat(
        dir.path(),
        &["run", "--config", "run.cfg", "--set", "t_end=0", "--s_list=0.5"],
    );
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.starts_with("t,linf,s=0.5,s=1,s=2,"));
}

#[test]
fn consts_pass_at_claimed_constants() {
    let dir = tempfile::tempdir().unwrap();
    let o = muskat(dir.path(), &["consts", "--dim", "3", "--delta", "0.01"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS admissible"));
    let o = muskat(dir.path(), &["consts", "--dim", "2", "--delta", "0.001"]);
    assert_eq!(o.status.code(), Some(0));
    let o = muskat(dir.path(), &["consts", "--dim", "3", "--delta", "0.99"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("series="));
    let o = muskat(dir.path(), &["consts", "--dim", "3", "--delta", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn linear_and_fit_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = muskat(dir.path(), &["linear", "--dim", "1", "--a", "1", "--s", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let fit = fs::read_to_string(dir.path().join("semigroup_fit.csv")).unwrap();
    assert!(fit.starts_with("s,nu,slope,expected_slope,r2,window_lo,window_hi\n"));

    let o = muskat(dir.path(), &["run", "--n", "64", "--t_end", "3", "--record_every", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let o = muskat(dir.path(), &["fit", "--csv", "trajectory.csv", "--cols", "s=1", "--nu", "-1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("fit.csv").exists());
    let o = muskat(dir.path(), &["fit", "--csv", "trajectory.csv", "--cols", "s=9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("s=9"));
}

#[test]
fn bounds_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let o = muskat(dir.path(), &["bounds", "--n", "64", "--count", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("bounds.csv")).unwrap();
    assert!(csv.starts_with("s,lhs,rhs,holds\n"));
    assert_eq!(csv.lines().count(), 7);
    let o = muskat(dir.path(), &["verify", "decay"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS ")));
    let o = muskat(dir.path(), &["verify", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}
