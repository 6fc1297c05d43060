//! The `critbound` binary: exit codes, config layering, report files.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use critbound::campaign::{Table, Verdict};

fn critbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_critbound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn verdict(dir: &Path) -> Verdict {
    serde_json::from_str(&fs::read_to_string(dir.join("verdict.json")).unwrap()).unwrap()
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn identities_all_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = critbound(&[
        "identities",
        "--dims",
        "4..10",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = verdict(dir.path());
    assert_eq!(v.failed, 0);
    for name in ["power_shift", "corner_moment"] {
        let dims: Vec<usize> = v
            .checks
            .iter()
            .filter(|c| c.name == name)
            .filter_map(|c| c.dim)
            .collect();
        assert_eq!(dims, (4..=10).collect::<Vec<_>>());
    }
}

#[test]
fn constants_row_for_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = critbound(&["constants", "--dims", "3", "--out", &out_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("constants.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields[0], "3");
    let s: f64 = fields[1].parse().unwrap();
    let c_inf: f64 = fields[3].parse().unwrap();
    assert!(c_inf < s.powf(1.5) / 6.0);
    assert_eq!(*fields.last().unwrap(), "pass");
    assert!(verdict(dir.path())
        .checks
        .iter()
        .any(|c| c.name == "c_inf_below_volume_threshold" && c.passed));
}

#[test]
fn empty_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.ini");
    fs::write(&cfg, "").unwrap();
    let out = critbound(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty"));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("typo.ini");
    fs::write(&cfg, "[campaign]\ncomand = constants\n").unwrap();
    assert_eq!(
        critbound(&["--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(critbound(&["lemmas", "--dims", "2"]).status.code(), Some(2));
    assert_eq!(
        critbound(&["solve", "--r", "7", "--q", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        critbound(&["constants", "--tol", "-1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        critbound(&["constants", "--format", "xml"]).status.code(),
        Some(2)
    );
    assert_eq!(critbound(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.ini");
    let out_dir = dir.path().join("out");
    fs::write(
        &cfg,
        format!(
            "[campaign]\ncommand = constants\ndims = 3\nout = {}\n",
            out_dir.display()
        ),
    )
    .unwrap();
    let out = critbound(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(out_dir.join("constants.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("3,"));

    let out = critbound(&[
        "--config",
        cfg.to_str().unwrap(),
        "constants",
        "--dims",
        "4,5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(out_dir.join("constants.csv")).unwrap();
    let dims: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(dims, ["4", "5"]);
}

#[test]
fn failed_checks_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = critbound(&[
        "lemmas",
        "--dims",
        "4",
        "--coeff-tol",
        "1e-9",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = verdict(dir.path());
    assert!(v.failed > 0);
    assert_eq!(v.passed + v.failed, v.checks.len());
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL lemma/"));
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = critbound(&["lemmas", "--dims", "4", "--out", &out_arg(dir.path())]);
        assert_eq!(out.status.code(), Some(0));
    }
    for name in ["lemmas.csv", "lemma_sweeps.csv", "verdict.json"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn solve_grid_is_complete_in_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = critbound(&[
        "solve",
        "--r",
        "3,4",
        "--q",
        "3,3.5",
        "--mesh",
        "300",
        "--format",
        "json",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let table =
        Table::from_json(&fs::read_to_string(dir.path().join("solves.json")).unwrap()).unwrap();
    assert_eq!(
        &table.columns[..8],
        [
            "dim",
            "r",
            "q",
            "regime",
            "level",
            "threshold",
            "margin",
            "grad_norm"
        ]
    );
    let mut grid: Vec<(f64, f64)> = table
        .rows
        .iter()
        .map(|row| (row[1].as_f64().unwrap(), row[2].as_f64().unwrap()))
        .collect();
    grid.sort_by(|x, y| x.partial_cmp(y).unwrap());
    assert_eq!(grid, [(3.0, 3.0), (3.0, 3.5), (4.0, 3.0), (4.0, 3.5)]);
    for row in &table.rows {
        assert!(
            row[5] == critbound::campaign::Cell::Null,
            "subcritical threshold is null"
        );
    }
    let v = verdict(dir.path());
    for file in &v.files {
        assert!(dir.path().join(file).exists(), "{file}");
    }
    assert!(v.files.iter().any(|f| f == "solve_records.json"));
}

#[test]
fn lemma_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = critbound(&["lemmas", "--dims", "5", "--out", &out_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("lemmas.csv")).unwrap();
    assert!(csv.starts_with("lemma,item,dim,coeff_fitted,coeff_closed_form,rel_dev,verdict"));
    assert!(csv.lines().skip(1).all(|l| l.contains(",pass,")));
}
