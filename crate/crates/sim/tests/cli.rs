use std::process::{Command, Output};

fn bmp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bmp")).args(args).output().expect("spawn bmp")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn threshold_of_regular_ensemble() {
    let o = bmp(&["threshold", "--regular", "7,112", "--channel", "soft"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "5.020 dB");
}

#[test]
fn usage_and_domain_errors_have_distinct_codes() {
    let o = bmp(&["threshold", "--regular", "7,112", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bmp(&["threshold", "--regular", "1,112"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn exit_curves_for_fixed_sigma() {
    let o = bmp(&["exit", "--dv", "3", "--dc", "6", "--sigma", "0.8", "--points", "11"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("curve,eps_a,eps_e,i_a,i_e"));
    let mut curves: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    curves.dedup();
    assert_eq!(curves, ["check", "var_bsc", "var_bsqc"]);
}

#[test]
fn constructed_graph_passes_check() {
    let dir = tempfile::tempdir().unwrap();
    let dist = dir.path().join("dist.json");
    std::fs::write(&dist, r#"{"dc": 8, "lambda": {"2": 0.1, "3": 0.1, "6": 0.8}}"#).unwrap();
    let code = dir.path().join("code.alist");
    let (d, c) = (dist.to_str().unwrap(), code.to_str().unwrap());
    let o = bmp(&["construct", "--dist", d, "--n", "400", "--seed", "3", "--forbid-weak-cycles", "--out", c]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = bmp(&["check-graph", "--in", c, "--dist", d]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("no weak cycles"));
    assert!(text.contains("degrees match"));
}

#[test]
fn ber_pipeline_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let code = dir.path().join("code.alist");
    let c = code.to_str().unwrap();
    let o = bmp(&["construct", "--regular", "3,6", "--n", "200", "--random", "--seed", "1", "--out", c]);
    assert!(o.status.success());
    let args = ["ber", "--in", c, "--ebn0", "2,4", "--max-frames", "200", "--min-frame-errors", "20", "--seed", "5"];
    let a = bmp(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let mut more = args.to_vec();
    more.extend(["--workers", "3"]);
    let b = bmp(&more);
    assert_eq!(stdout(&a), stdout(&b));
    let text = stdout(&a);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("ebn0_db,frames"));
}

#[test]
fn check_graph_reports_weak_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let code = dir.path().join("code.alist");
    let c = code.to_str().unwrap();
    let o = bmp(&["construct", "--regular", "2,4", "--n", "40", "--random", "--out", c]);
    assert!(o.status.success());
    let o = bmp(&["check-graph", "--in", c]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("weak cycle: "));
}
