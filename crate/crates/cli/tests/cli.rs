use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn symwrap(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symwrap"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn report(out: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join(name)).unwrap()).unwrap()
}

#[test]
fn verify_passes_and_echoes_spec() {
    let dir = tempfile::tempdir().unwrap();
    let o = symwrap(&["verify", "--n", "3", "--c", "1.5", "--samples", "2e4", "--symplectic-samples", "1000"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let r = report(dir.path(), "verify.json");
    assert_eq!(r["schema"], "1");
    assert_eq!(r["spec"]["n"], 3);
    assert_eq!(r["spec"]["samples"], 20000);
    assert_eq!(r["spec"]["seed"], 0);
    assert!(r.get("timings").is_none());
    let names: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"trailing_identity"));
    assert!(names.contains(&"psi_containment"));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["verify", "--c", "0.5"][..],
        &["verify", "--n", "1"],
        &["topology", "--hull"],
        &["topology", "--a", "0.5", "--c", "3"],
        &["plot", "--z", "0.3"],
        &["sections", "--format", "xml"],
        &["verify", "--samples", "1.5"],
        &["topology", "--fixture", "torus", "--N", "64"],
    ] {
        assert_eq!(symwrap(args, dir.path()).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn unwritable_output_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, b"x").unwrap();
    let o = symwrap(&["plot", "--c", "2"], &blocker.join("sub"));
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn environment_overrides_flags_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_symwrap"))
        .args(["sections", "--grid", "4x4", "--samples", "1e4", "--cell-samples", "1e4", "--spot-checks", "2"])
        .env("SYMWRAP_C", "1.5")
        .env("SYMWRAP_SEED", "9")
        .env("SYMWRAP_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let r = report(dir.path(), "sections.json");
    assert_eq!(r["spec"]["c"], 1.5);
    assert_eq!(r["spec"]["seed"], 9);
}

#[test]
fn sections_csv_has_round_trip_floats() {
    let dir = tempfile::tempdir().unwrap();
    let o = symwrap(&["sections", "--c", "3.25", "--grid", "5x10", "--samples", "1e4", "--spot-checks", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("sections.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "kind,z1,z2,status,analytic_area,mc_area,mc_stderr,mc_samples");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 50 + 3);
    for row in &rows {
        let area: f64 = row[4].parse().unwrap();
        assert_eq!(area, 1.0 / 3.25);
        let mantissa = row[4].split('e').next().unwrap();
        assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
    }
    let r = report(dir.path(), "sections.json");
    assert_eq!(r["artifacts"], serde_json::json!(["sections.csv"]));
}

#[test]
fn fixture_negative_control_reports_disconnected_complement() {
    let dir = tempfile::tempdir().unwrap();
    let o = symwrap(&["topology", "--fixture", "annulus", "--N", "128,256", "--format", "pgm"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let r = report(dir.path(), "topology.json");
    for check in r["checks"].as_array().unwrap() {
        assert_eq!(check["measured"], 2);
        assert_eq!(check["details"]["complement_connected"], false);
        assert_eq!(check["details"]["hull_equals_set"], false);
    }
    let pgm = fs::read(dir.path().join("fixture-annulus-N128.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n130 130\n255\n"));
}

#[test]
fn topology_connects_and_hull_respects_bound() {
    let dir = tempfile::tempdir().unwrap();
    let o = symwrap(&["topology", "--c", "2", "--grid", "3x3", "--N", "256"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let o = symwrap(&["topology", "--hull", "--a", "0.5", "--grid", "3x3", "--N", "256"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let r = report(dir.path(), "topology.json");
    assert!(r["checks"][0]["name"].as_str().unwrap().starts_with("hull_bound"));
    assert!(r["checks"][0]["measured"]["max_hull_area"].as_f64().unwrap() <= 0.5);
}

#[test]
fn plot_emits_three_figures_and_placeholders() {
    let dir = tempfile::tempdir().unwrap();
    let o = symwrap(&["plot", "--c", "2", "--z", "0.3,0.7"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    for name in ["ribbon.svg", "square.svg", "raster.svg"] {
        let svg = fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(svg.starts_with("<svg") && !svg.contains("empty section"), "{name}");
    }
    let square = fs::read_to_string(dir.path().join("square.svg")).unwrap();
    assert!(square.contains("<line"));
    let empty = tempfile::tempdir().unwrap();
    assert_eq!(symwrap(&["plot", "--c", "2", "--z", "0.5,1"], empty.path()).status.code(), Some(0));
    let ribbon = fs::read_to_string(empty.path().join("ribbon.svg")).unwrap();
    assert!(ribbon.contains("empty section"));
    // c = 1: W is the whole height, the band fills the square
    let full = tempfile::tempdir().unwrap();
    assert_eq!(symwrap(&["plot", "--c", "1", "--z", "0.3,0.7"], full.path()).status.code(), Some(0));
    let r = report(full.path(), "plot.json");
    let w = r["diagnostics"]["section"]["w"]["intervals"].as_array().unwrap();
    let total: f64 = w.iter().map(|i| i["end"].as_f64().unwrap() - i["start"].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn timings_are_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let o = symwrap(&["plot", "--c", "2", "--timings"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(report(dir.path(), "plot.json").get("timings").is_some());
}
