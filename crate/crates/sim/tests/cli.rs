use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_broadbeam"))
}

fn run_ok(args: &[&str]) -> String {
    let out = bin().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn energy_table_reports_sixteen() {
    let text = run_ok(&["energy"]);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("case,slots,total_antennas,energy,expected")
    );
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 4);
    for r in rows {
        let f: Vec<&str> = r.split(',').collect();
        let e: f64 = f[3].parse().unwrap();
        assert!((e - 16.0).abs() < 1e-12, "{r}");
    }
}

#[test]
fn reflection_csv_covers_zero_to_ninety() {
    let text = run_ok(&["reflection", "--material", "metal", "--step-deg", "1"]);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("theta_deg"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 91);
    assert!(rows[90].starts_with("9.0000000000000000e1"));
}

#[test]
fn pattern_is_flat() {
    let text = run_ok(&["pattern", "--k", "8", "--samples", "361"]);
    let rows: Vec<_> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 361);
    for r in rows {
        let p: f64 = r.split(',').nth(1).unwrap().parse().unwrap();
        assert!((p - 16.0).abs() < 1e-9, "{r}");
    }
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

#[test]
fn run_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        run_ok(&[
            "run",
            "--preset",
            "case3",
            "--case",
            "3",
            "--case",
            "4",
            "--band",
            "nb",
            "--band",
            "wb",
            "--env",
            "metal",
            "--grid-res",
            "0.5",
            "--out",
            d.path().to_str().unwrap(),
        ]);
    }
    let fa = read_dir_sorted(a.path());
    let fb = read_dir_sorted(b.path());
    assert!(
        fa.iter().any(|(n, _)| n == "coverage_case4_wb_metal.csv"),
        "{:?}",
        fa.iter().map(|f| &f.0).collect::<Vec<_>>()
    );
    assert_eq!(fa, fb);
}

#[test]
fn bad_scenario_exits_nonzero_with_key_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    let text = broadbeam::config::preset_source("case1")
        .unwrap()
        .replace("k = 8", "k = -1");
    fs::write(&path, text).unwrap();
    let out = bin()
        .args(["coverage", "--scenario", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("ap[0].k"), "{err}");
}

#[test]
fn case_out_of_range_is_rejected() {
    let out = bin()
        .args(["run", "--preset", "case1", "--case", "5"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
