use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn osc_lab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_osc-lab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn summary(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

const SKEW: &str = r#"
type = "simple_skew"
d = 2
k = 2
a = "1/4 + 2^-20*sqrt(2)"
h_2 = ["0", "0", "1"]
"#;

#[test]
fn discrepancy_of_centered_grid() {
    let t = TempDir::new().unwrap();
    let o = osc_lab(t.path(), &["discrepancy", "--grid", "100", "--out", "d"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(t.path().join("d/report.csv")).unwrap();
    let row = csv.lines().nth(1).unwrap();
    let abs: f64 = row.split(',').nth(10).unwrap().parse().unwrap();
    assert!((abs - 0.005).abs() < 1e-15);
    let s = summary(&t.path().join("d"));
    assert_eq!(s["command"], "discrepancy");
    assert_eq!(s["cells"], 2);
    for key in ["config_echo", "passed", "failed", "skipped", "wall_time_s"] {
        assert!(s.get(key).is_some(), "{key}");
    }
}

#[test]
fn weyl_on_mobius_passes_and_is_reproducible() {
    let t = TempDir::new().unwrap();
    let args = ["weyl", "--seq", "mobius", "--nmax", "100000", "--degree", "2"];
    let a = osc_lab(t.path(), &[&args[..], &["--out", "a", "--threads", "1"]].concat());
    let b = osc_lab(t.path(), &[&args[..], &["--out", "b", "--threads", "3"]].concat());
    assert_eq!(code(&a), 0, "{}", stdout(&a));
    assert_eq!(code(&b), 0);
    let ra = fs::read(t.path().join("a/report.csv")).unwrap();
    assert_eq!(ra, fs::read(t.path().join("b/report.csv")).unwrap());
    // header plus one row per phase sample
    assert_eq!(String::from_utf8(ra).unwrap().lines().count(), 21);
    assert!(stdout(&a).contains("20 passed"));
}

#[test]
fn weyl_fails_with_exit_one() {
    let t = TempDir::new().unwrap();
    let o = osc_lab(t.path(), &["weyl", "--seq", "one", "--nmax", "1000", "--samples", "2"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn expand_reports_degrees_and_exact_match() {
    let t = TempDir::new().unwrap();
    fs::write(
        t.path().join("flow.toml"),
        "type = \"simple_skew\"\nd = 3\nk = 2\na = \"1/3\"\nh_2 = [\"0\", \"0\", \"1\"]\nh_3 = [\"1/2\", \"1\"]\n",
    )
    .unwrap();
    let o = osc_lab(t.path(), &["expand", "--flow", "flow.toml", "--n-check", "50", "--out", "e"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let j: serde_json::Value = serde_json::from_str(&fs::read_to_string(t.path().join("e/expansion.json")).unwrap()).unwrap();
    assert_eq!(j["degrees"], serde_json::json!([1, 3, 2]));
    assert_eq!(j["first_mismatch"], serde_json::Value::Null);

    // irrational parameters cannot be expanded exactly
    fs::write(t.path().join("skew.toml"), SKEW).unwrap();
    let o = osc_lab(t.path(), &["expand", "--flow", "skew.toml"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn general_skew_above_stated_bound_fails() {
    let t = TempDir::new().unwrap();
    fs::write(
        t.path().join("g.toml"),
        r#"
type = "general_skew"
d = 3
k = 2
a = "1/3"
h_2 = [{ c = "1", e = [2] }]
h_3 = [{ c = "1", e = [0, 2] }]
"#,
    )
    .unwrap();
    let o = osc_lab(t.path(), &["expand", "--flow", "g.toml", "--out", "g"]);
    assert_eq!(code(&o), 1);
    let j: serde_json::Value = serde_json::from_str(&fs::read_to_string(t.path().join("g/expansion.json")).unwrap()).unwrap();
    assert_eq!(j["degrees"], serde_json::json!([1, 3, 7]));
    assert_eq!(j["recursive_bounds"], serde_json::json!([1, 3, 7]));
}

#[test]
fn disjointness_from_config_file() {
    let t = TempDir::new().unwrap();
    fs::write(t.path().join("skew.toml"), SKEW).unwrap();
    fs::write(
        t.path().join("run.toml"),
        "[disjoint]\nseq = \"mobius\"\nflow = \"skew.toml\"\nobservable = \"1,1\"\nnmax = 100000\ncheckpoints = [10000, 100000]\nthreshold = \"0.05\"\n",
    )
    .unwrap();
    let o = osc_lab(t.path(), &["disjoint", "--config", "run.toml", "--out", "x"]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(t.path().join("x/report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    let s = summary(&t.path().join("x"));
    assert_eq!(s["config_echo"]["disjoint"]["observable"], "1,1");

    // the negative control: e(nα) against e(−x) along the rotation by α
    fs::write(t.path().join("rot.toml"), "type = \"affine\"\nd = 1\nA = [[1]]\na = [\"sqrt(2)-1\"]\n").unwrap();
    let o = osc_lab(
        t.path(),
        &["disjoint", "--seq", "linear:sqrt(2)-1", "--flow", "rot.toml", "--observable=-1", "--nmax", "10000", "--out", "r"],
    );
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(t.path().join("r/report.csv")).unwrap();
    let re: f64 = csv.lines().nth(1).unwrap().split(',').nth(8).unwrap().parse().unwrap();
    assert!((re - 1.0).abs() < 1e-10);
}

#[test]
fn config_errors_exit_two() {
    let t = TempDir::new().unwrap();
    fs::write(t.path().join("typo.toml"), "[weyl]\nnmaxx = \"10\"\n").unwrap();
    assert_eq!(code(&osc_lab(t.path(), &["weyl", "--config", "typo.toml", "--nmax", "10"])), 2);
    fs::write(t.path().join("float.toml"), "[weyl]\nthreshold = 0.02\n").unwrap();
    assert_eq!(code(&osc_lab(t.path(), &["weyl", "--config", "float.toml", "--nmax", "10"])), 2);
    assert_eq!(code(&osc_lab(t.path(), &["weyl", "--config", "missing.toml", "--nmax", "10"])), 2);
    assert_eq!(code(&osc_lab(t.path(), &["weyl"])), 2);
    assert_eq!(code(&osc_lab(t.path(), &["weyl", "--nmax", "ten"])), 2);
    assert_eq!(code(&osc_lab(t.path(), &["nosuch"])), 2);
    assert_eq!(code(&osc_lab(t.path(), &["--help"])), 0);
    assert!(!t.path().join("osc-lab-out").exists());
}

#[test]
fn dry_run_counts_cells_without_output() {
    let t = TempDir::new().unwrap();
    let o = osc_lab(t.path(), &["arith", "--nmax", "1000000", "--degree", "3", "--kmax", "4", "--dry-run"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("200 cells planned"), "{}", stdout(&o));
    assert!(!t.path().join("osc-lab-out").exists());
}

#[test]
fn precision_ceiling_and_allow_skip() {
    let t = TempDir::new().unwrap();
    let base = ["expbeta", "--beta", "3/2", "--nmax", "500", "--precision-ceiling", "100"];
    let o = osc_lab(t.path(), &base);
    assert_eq!(code(&o), 2);
    let o = osc_lab(t.path(), &[&base[..], &["--allow-skip", "--out", "s"]].concat());
    assert_eq!(code(&o), 0);
    let s = summary(&t.path().join("s"));
    assert_eq!(s["skipped"], 2);
    assert!(fs::read_to_string(t.path().join("s/report.csv")).unwrap().contains(",skipped"));
}

#[test]
fn expbeta_writes_exact_phases() {
    let t = TempDir::new().unwrap();
    let o = osc_lab(t.path(), &["expbeta", "--beta", "3/2", "--nmax", "4", "--out", "b"]);
    assert_eq!(code(&o), 0);
    let seq = osclab::seqgen::load_sequence(t.path().join("b/sequence.txt"), Default::default()).unwrap();
    assert_eq!(seq.phase_q64(2), Some(1u64 << 62));
    assert!(fs::read_to_string(t.path().join("b/sequence.txt")).unwrap().contains("phase:0.0625"));
}

#[test]
fn mobius_sequence_file() {
    let t = TempDir::new().unwrap();
    let o = osc_lab(t.path(), &["mobius", "--nmax", "30", "--out", "m"]);
    assert_eq!(code(&o), 0);
    let seq = osclab::seqgen::load_sequence(t.path().join("m/sequence.txt"), Default::default()).unwrap();
    assert_eq!(seq.len(), 30);
    assert_eq!(seq.at(30).re, -1.0);
}

#[test]
fn chowla_alternating_is_not_chowla() {
    let t = TempDir::new().unwrap();
    let o = osc_lab(t.path(), &["chowla", "--seq", "alternating", "--n", "1000", "--out", "c"]);
    assert_eq!(code(&o), 1);
    let csv = fs::read_to_string(t.path().join("c/report.csv")).unwrap();
    assert!(csv.contains("excluded"));
    let o = osc_lab(t.path(), &["chowla", "--seq", "expbeta:3/2", "--n", "4000", "--threshold", "0.1"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn koksma_small_run() {
    let t = TempDir::new().unwrap();
    let o = osc_lab(
        t.path(),
        &["koksma", "--samples", "10", "--n", "1000", "--chowla", "2,3,2", "--chowla-threshold", "0.12", "--out", "k"],
    );
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(t.path().join("k/report.csv")).unwrap();
    assert!(csv.starts_with("beta,pattern,N,discrepancy,weyl_max,pass"));
    assert_eq!(csv.lines().count(), 11);
    assert!(t.path().join("k/chowla.csv").exists());
    assert!(t.path().join("k/koksma.json").exists());
}

#[test]
fn mma_qds_and_triangularize() {
    let t = TempDir::new().unwrap();
    fs::write(t.path().join("anzai.toml"), "type = \"affine\"\nd = 2\nA = [[1, 0], [1, 1]]\na = [\"sqrt(2)\", \"0\"]\n").unwrap();
    let o = osc_lab(
        t.path(),
        &["mma", "--flow", "anzai.toml", "--x", "0,1/8", "--z", "0,0", "--nmax", "1000", "--epsilon", "0.2", "--out", "m"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(t.path().join("m/report.csv")).unwrap();
    // param is quoted, so count from the end: abs,threshold,verdict
    let v: f64 = csv.lines().nth(1).unwrap().rsplit(',').nth(2).unwrap().parse().unwrap();
    assert!((v - 0.125).abs() < 1e-12);

    let o = osc_lab(t.path(), &["qds", "--d", "3", "--alpha", "3/7", "--z", "1/2,1/3,1/5", "--out", "q"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("2 passed"));
    let o = osc_lab(t.path(), &["qds", "--d", "4", "--alpha", "sqrt(2)-1", "--z", "0,sqrt(3)/7,1/5,0", "--out", "q2"]);
    assert_eq!(code(&o), 0);

    let o = osc_lab(t.path(), &["triangularize", "--matrix", "1,1;0,1", "--out", "t"]);
    assert_eq!(code(&o), 0);
    let j: serde_json::Value = serde_json::from_str(&fs::read_to_string(t.path().join("t/triangularize.json")).unwrap()).unwrap();
    assert_eq!(j["P_inv_A_P"][0][1], "0");
    assert_eq!(code(&osc_lab(t.path(), &["triangularize", "--matrix", "2,0;0,1"])), 2);
}

#[test]
fn accept_runs_selected_criteria() {
    let t = TempDir::new().unwrap();
    let o = osc_lab(t.path(), &["accept", "--only", "7,8,10", "--out", "a"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("criterion")).count(), 3);
    assert!(t.path().join("a/criterion_08.txt").exists());
    let o = osc_lab(t.path(), &["accept", "--only", "13"]);
    assert_eq!(code(&o), 2);
}
