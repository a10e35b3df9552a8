use std::path::Path;
use std::process::{Command, Output};

fn ramcx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ramcx")).args(args).output().expect("spawn ramcx")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn build(dir: &Path, r: &str) {
    let out = dir.to_str().unwrap();
    let o = ramcx(&["build", "--q", "3", "--d", "2", "--e", "2", "--r", r, "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["complex.rcx", "group.txt", "edges.csv", "meta.txt"] {
        assert!(dir.join(f).exists(), "{f} missing");
    }
}

#[test]
fn generators_match_gaussian_binomials() {
    let o = ramcx(&["generators", "--q", "3", "--d", "3"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("PASS generator-count level=1 measured=13 bound=13"));
    assert!(s.contains("PASS generator-count level=2 measured=13 bound=13"));
    assert!(!s.contains("FAIL"));
}

#[test]
fn even_q_is_refused() {
    let o = ramcx(&["generators", "--q", "4", "--d", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("even"));
}

#[test]
fn large_quotients_need_force() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x");
    let o = ramcx(&["build", "--q", "3", "--d", "3", "--e", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--force"));
    assert!(!out.exists());
}

#[test]
fn non_partite_quotient_builds_with_cover_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    build(dir.path(), "1");
    let meta = std::fs::read_to_string(dir.path().join("meta.txt")).unwrap();
    assert!(meta.contains("order=360") && meta.contains("r=1"));
    assert!(dir.path().join("cover.rcx").exists());
    let o = ramcx(&["analyze", "--in", dir.path().to_str().unwrap(), "--samples", "500"]);
    let s = stdout(&o);
    assert!(o.status.success(), "{s}");
    assert!(s.contains("PASS ramanujan-bound measured=3.236067977"));
    assert!(s.contains("INFO mixing-target cover"));
    assert!(s.contains("PASS chromatic-lower-bound"));
    assert!(s.contains("INFO injectivity-radius 2"));
}

#[test]
fn analysis_is_deterministic_and_selectable() {
    let dir = tempfile::tempdir().unwrap();
    build(dir.path(), "2");
    let input = dir.path().to_str().unwrap();
    let csv = dir.path().join("spec.csv");
    let mut reports = Vec::new();
    for k in 0..2 {
        let rep = dir.path().join(format!("report{k}.txt"));
        let o = ramcx(&[
            "analyze",
            "--in",
            input,
            "--checks",
            "spectra,mixing,diameter",
            "--samples",
            "300",
            "--out",
            rep.to_str().unwrap(),
            "--spectrum-csv",
            csv.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stdout(&o));
        let text = std::fs::read(&rep).unwrap();
        assert_eq!(text, o.stdout);
        reports.push(text);
    }
    assert_eq!(reports[0], reports[1]);
    let s = String::from_utf8(reports.pop().unwrap()).unwrap();
    assert!(s.contains("PASS spectrum-symmetry"));
    assert!(s.contains("PASS diameter-spectral-bound measured=8"));
    assert!(!s.contains("[color]") && !s.contains("[radius]"));
    assert!(std::fs::read_to_string(&csv).unwrap().lines().filter(|l| !l.is_empty()).count() >= 720);
}

#[test]
fn seeds_change_sampled_output_only() {
    let dir = tempfile::tempdir().unwrap();
    build(dir.path(), "2");
    let input = dir.path().to_str().unwrap();
    let a = stdout(&ramcx(&["analyze", "--in", input, "--checks", "mixing", "--samples", "200", "--seed", "1"]));
    let b = stdout(&ramcx(&["analyze", "--in", input, "--checks", "mixing", "--samples", "200", "--seed", "2"]));
    assert_ne!(a, b);
    assert!(!a.contains("FAIL") && !b.contains("FAIL"));
}

#[test]
fn ball_and_bounds_report() {
    let o = ramcx(&["ball", "--q", "3", "--d", "3", "--radius", "2"]);
    let s = stdout(&o);
    assert!(o.status.success(), "{s}");
    assert!(s.contains("PASS facets-at-center measured=52 bound=52"));
    assert!(s.contains("PASS two-step-wall-row"));

    let o = ramcx(&["bounds", "--q", "3,81", "--d", "2"]);
    let s = stdout(&o);
    assert!(o.status.success());
    assert!(s.contains("[q=3]") && s.contains("[q=81]"));
    assert!(s.contains("vacuous=true"));
    assert!(s.contains("INFO chromatic-lower-bound d=2 half=1.500000000"));
}
