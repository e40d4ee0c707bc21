use std::path::Path;
use std::process::{Command, Output};

fn hwconn(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hwconn"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn coeffs_golden_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = hwconn(dir.path(), &["coeffs", "--k", "1", "--max-order", "5", "--diagonal", "zero"]);
    assert!(out.status.success());
    let csv = read(dir.path(), "table.csv");
    assert_eq!(csv.lines().next(), Some("l,C_0,C_1,C_2,C_3,C_4,C_5"));
    assert!(csv.lines().any(|l| l == "3,1/1,0/1,-1/3,0/1"), "{csv}");
    assert!(csv.lines().any(|l| l == "5,1/1,0/1,-1/1,0/1,1/5,0/1"), "{csv}");
    let report: serde_json::Value = serde_json::from_str(&read(dir.path(), "report.json")).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["config"]["args"]["k"], 1);
}

#[test]
fn recursion_suite_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = hwconn(dir.path(), &["verify-recursion", "--k", "2", "--max-order", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn reports_are_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["--seed", "7", "coeffs", "--k", "2", "--max-order", "4", "--diagonal", "random"];
    assert!(hwconn(a.path(), &args).status.success());
    assert!(hwconn(b.path(), &args).status.success());
    for f in ["report.json", "table.csv"] {
        assert_eq!(read(a.path(), f), read(b.path(), f));
    }
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "k = 2\nN = 30\nL = 1\nf = \"x^2 + y^2\"\nsigma = \"0.3+1.2i\"\ns_grid = [16.0, 32.0, 64.0, 128.0]\n").unwrap();
    let out = hwconn(
        dir.path(),
        &["--config", cfg.to_str().unwrap(), "landau", "--experiment", "decay", "--k", "1"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let report: serde_json::Value = serde_json::from_str(&read(dir.path(), "report.json")).unwrap();
    assert_eq!(report["config"]["args"]["k"], 2);
    assert_eq!(report["config"]["args"]["N"], 30);
    let slope: f64 = report["results"]["slope"].as_str().unwrap().parse().unwrap();
    assert!(slope <= -1.85, "{slope}");
    assert!(read(dir.path(), "series.csv").starts_with("s,norm\n"));
}

#[test]
fn invalid_config_is_diagnosed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    let out = hwconn(dir.path(), &["--config", cfg.to_str().unwrap(), "coeffs"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));

    let out = hwconn(dir.path(), &["landau", "--experiment", "commutation", "--sigma", "1-1i"]);
    assert_eq!(out.status.code(), Some(2));
    let out = hwconn(dir.path(), &["coeffs", "--k", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numeric_trivialisation_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = hwconn(dir.path(), &["verify-trivialisation", "--numeric", "--N", "20", "--step", "0.05"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let report: serde_json::Value = serde_json::from_str(&read(dir.path(), "report.json")).unwrap();
    assert!(report["results"]["discrepancy"].is_string());
}
