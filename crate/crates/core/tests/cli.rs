use std::fs;
use std::process::Command;

use merodiff::experiment::ExperimentReport;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_merodiff"))
}

#[test]
fn list_prints_the_catalogue() {
    let out = bin().arg("list").output().unwrap();
    assert!(out.status.success());
    let s = String::from_utf8(out.stdout).unwrap();
    assert_eq!(s.lines().count(), 12);
    assert!(s.lines().any(|l| l.starts_with("thm-onezero")));
}

#[test]
fn run_then_plotdata() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("counts.toml");
    fs::write(&cfg, "experiment = \"thm-lesshalf\"\nseed = 3\n").unwrap();
    let out = bin().arg("run").arg(&cfg).arg("--out").arg(dir.path()).env_remove("MERODIFF_OUT_DIR").output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report_path = dir.path().join("thm-lesshalf.json");
    let report = ExperimentReport::load(&report_path).unwrap();
    assert!(report.passed);
    assert!(dir.path().join("thm-lesshalf-zero-counts.csv").exists());

    let plots = dir.path().join("plots");
    let out = bin().arg("plotdata").arg(&report_path).arg("--out").arg(&plots).output().unwrap();
    assert!(out.status.success());
    let csv = fs::read_to_string(plots.join("thm-lesshalf-zero-counts.csv")).unwrap();
    assert!(csv.starts_with("R,zero_count"));
}

#[test]
fn bad_inputs_fail() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "experiment = \"no-such-thing\"\n").unwrap();
    assert!(!bin().arg("run").arg(&cfg).output().unwrap().status.success());
    fs::write(&cfg, "experiment = \"thm-lesshalf\"\nbogus = 1\n").unwrap();
    assert!(!bin().arg("run").arg(&cfg).output().unwrap().status.success());
    let junk = dir.path().join("junk.json");
    fs::write(&junk, "{}").unwrap();
    assert!(!bin().arg("plotdata").arg(&junk).output().unwrap().status.success());
}
