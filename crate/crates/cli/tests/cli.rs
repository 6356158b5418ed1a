use std::path::PathBuf;
use std::process::{Command, Output};

fn mobius(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mobius")).args(args).output().expect("run mobius")
}

fn triangle() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/triangle.json").display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn band_analyze_reports_sign_sequence() {
    let dir = tempfile::tempdir().unwrap();
    let o = mobius(&["band", "analyze", &triangle(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("sign sequence: [1, -1, 1, -1]"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("band.json")).unwrap()).unwrap();
    assert_eq!(report["signs"], serde_json::json!([1, -1, 1, -1]));
    assert!(report["t_pattern"].is_object());
    for f in ["band.obj", "core.csv", "ridge.csv", "curves.svg"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn band_reports_are_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = mobius(&["band", "analyze", &triangle(), "--seed", "7", "--out", d.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("band.json")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn non_closing_band_fails_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("open.json");
    std::fs::write(
        &spec,
        r#"{"left_ridge": [0, 1.1547005383792515, 1.8320508075688772],
            "right_ridge": [0.1, 0.5773502691896258, 1.7320508075688772],
            "dihedrals": [1.0, 2.0, 3.0]}"#,
    )
    .unwrap();
    let o = mobius(&["band", "analyze", spec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("does not close"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(mobius(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(mobius(&["lambda1", "--width", "abc"]).status.code(), Some(2));
    assert_eq!(mobius(&["verify", "--only", "nonexistent"]).status.code(), Some(2));
    assert_eq!(mobius(&["band", "analyze", "/nonexistent/spec.json"]).status.code(), Some(2));
}

#[test]
fn precision_cap_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_mobius"))
        .args(["lambda1", "--width", "1e-300"])
        .env("MOBIUS_PRECISION_CAP", "64")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn lambda1_prints_enclosure() {
    let o = mobius(&["lambda1", "--width", "1e-12"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let line = out.lines().find(|l| l.starts_with("λ₁ ∈")).unwrap();
    assert!(line.contains("1.694973"), "{line}");
}

#[test]
fn verify_single_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let o = mobius(&["verify", "--only", "trapezoid", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("trapezoid [verified]"));
    assert!(dir.path().join("trapezoid.json").exists());
}

#[test]
fn approx_reports_decreasing_distortion() {
    let o = mobius(&["approx", "--n", "8,16,32"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("K strictly decreasing: true"));
}

#[test]
fn search_finds_short_half_strip() {
    let o = mobius(&["band", "search", "--restarts", "32"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}
