use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_layerpot")).args(args).arg("--out-dir").arg(dir).output().expect("binary runs")
}

fn files_with_prefix(dir: &Path, prefix: &str) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with(prefix))
        .collect();
    names.sort();
    names
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn jump_test_writes_hashed_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["jump-test", "--samples", "256", "--points", "32"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let names = files_with_prefix(dir.path(), "jump-test-");
    assert_eq!(names.len(), 1);
    let text = std::fs::read_to_string(dir.path().join(&names[0])).unwrap();
    let hash = names[0].trim_start_matches("jump-test-").trim_end_matches(".csv");
    assert_eq!(text.lines().next().unwrap(), format!("# config_hash={hash}"));
    assert_eq!(text.lines().nth(1).unwrap(), "xi,plus,minus,jump_residual");
    let rows = csv_rows(&dir.path().join(&names[0]));
    assert_eq!(rows.len(), 32);
    assert!(rows.iter().all(|r| r[3].abs() <= 1e-8));
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["zygmund-check", "--samples", "256", "--eps-count", "3"];
    assert_eq!(run(a.path(), &args).status.code(), Some(0));
    assert_eq!(run(b.path(), &args).status.code(), Some(0));
    let names = files_with_prefix(a.path(), "zygmund-check-");
    assert_eq!(names.len(), 2, "csv and svg");
    for n in &names {
        assert_eq!(std::fs::read(a.path().join(n)).unwrap(), std::fs::read(b.path().join(n)).unwrap());
    }
    assert!(names.iter().any(|n| n.ends_with(".svg")));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "density = const:3\nsamples = 128\npoints = 1000\n").unwrap();
    let out = run(dir.path(), &["jump-test", "--config", cfg.to_str().unwrap(), "--points", "16"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let names = files_with_prefix(dir.path(), "jump-test-");
    let rows = csv_rows(&dir.path().join(&names[0]));
    assert_eq!(rows.len(), 16);
    // constant density: plus is the constant, minus vanishes
    assert!(rows.iter().all(|r| (r[1] - 3.0).abs() < 1e-12 && r[2].abs() < 1e-12));
}

#[test]
fn constant_density_report_is_all_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["zygmund-check", "--density", "const:1", "--side", "both", "--samples", "128", "--eps-count", "3"],
    );
    assert_eq!(out.status.code(), Some(0));
    let names = files_with_prefix(dir.path(), "zygmund-check-");
    let csv = names.iter().find(|n| n.ends_with(".csv")).unwrap();
    for row in csv_rows(&dir.path().join(csv)) {
        assert!(row[1..8].iter().all(|&v| v == 0.0));
    }
}

#[test]
fn out_of_range_rows_are_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["zygmund-check", "--samples", "256", "--eps-start", "1", "--eps-count", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let names = files_with_prefix(dir.path(), "zygmund-check-");
    let text = std::fs::read_to_string(dir.path().join(names.iter().find(|n| n.ends_with(".csv")).unwrap())).unwrap();
    assert_eq!(text.matches("# out_of_range=1").count(), 2);
}

#[test]
fn geometry_square() {
    let dir = tempfile::tempdir().unwrap();
    let square = "polygon:(0,0),(1,0),(1,1),(0,1)";
    let out = run(dir.path(), &["geometry", "--curve", square, "--samples", "256", "--points", "8"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let names = files_with_prefix(dir.path(), "geometry-");
    let rows = csv_rows(&dir.path().join(names.iter().find(|n| n.ends_with(".csv")).unwrap()));
    // samples 0, 64, 128, 192 are vertices; the others are edge midpoints
    for r in rows {
        let expected =
            if (r[0] as usize).is_multiple_of(64) { std::f64::consts::FRAC_PI_2 } else { std::f64::consts::PI };
        assert!((r[4] - expected).abs() < 0.01, "{r:?}");
        assert!(r[6] <= 0.02);
    }
    assert_eq!(files_with_prefix(dir.path(), "ahlfors-").len(), 1);
}

#[test]
fn sharpness_extremal_density() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["sharpness", "--samples", "512", "--eps-count", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(files_with_prefix(dir.path(), "sharpness-").len(), 2);
}

#[test]
fn potential_scan_sides() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["potential-scan", "--samples", "256", "--grid", "11", "--side", "plus"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let names = files_with_prefix(dir.path(), "potential-scan-");
    assert_eq!(names.len(), 1);
    assert!(names[0].starts_with("potential-scan-plus-"));
    for r in csv_rows(&dir.path().join(&names[0])) {
        // Re t density: (Re z - 1)/2 inside
        assert!((r[2] - (r[0] - 1.0) / 2.0).abs() < 1e-3, "{r:?}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad_curve = run(dir.path(), &["geometry", "--curve", "blob"]);
    assert_eq!(bad_curve.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad_curve.stderr).contains("blob"));
    let not_normal = run(dir.path(), &["sharpness", "--density", "thm3:mu=power:2", "--samples", "128"]);
    assert_eq!(not_normal.status.code(), Some(1));
    let wrong_family = run(dir.path(), &["sharpness", "--density", "re", "--samples", "128"]);
    assert_eq!(wrong_family.status.code(), Some(1));
    let bad_factor = run(dir.path(), &["zygmund-check", "--eps-factor", "3"]);
    assert_eq!(bad_factor.status.code(), Some(1));
    // a diameter-4 curve needs more truncation steps than the default schedule allows
    let slow = run(
        dir.path(),
        &["jump-test", "--curve", "ellipse:a=2,b=1", "--density", "holder:t0=2,alpha=0.5", "--samples", "1024"],
    );
    assert_eq!(slow.status.code(), Some(3), "{}", String::from_utf8_lossy(&slow.stderr));
    assert!(String::from_utf8_lossy(&slow.stderr).contains("sample 0"));
}
