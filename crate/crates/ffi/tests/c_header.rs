//! Compiles a small C program against the generated header and the static
//! library. Skipped when no C compiler is on the path.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "critbound.h"

int main(void) {
    double s = 0.0, st = 0.0;
    if (cb_sobolev_constants(4, &s, &st) != CB_OK) return 1;
    if (cb_sobolev_constants(1, &s, &st) != CB_INVALID_ARGUMENT) return 2;
    if (cb_last_error_message() == NULL) return 3;

    CbSolver *h = NULL;
    if (cb_solver_new(3, 1.0, 3.0, 3.0, 200, 1e-9, &h) != CB_OK) return 4;
    if (cb_solver_solve(h, 0) != CB_OK) return 5;
    double level = 0.0;
    if (cb_solver_summary(h, &level, NULL, NULL) != CB_OK) return 6;
    cb_solver_free(h);
    printf("%.10f %.6f\n", s, level);
    return 0;
}
"#;

fn compiler() -> Option<&'static str> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
}

#[test]
fn c_program_links_and_runs() {
    let Some(cc) = compiler() else {
        eprintln!("no C compiler; skipped");
        return;
    };
    // tests run from target/<profile>/deps, next to the freshly built
    // archive; the copy one level up can be stale
    let exe = std::env::current_exe().unwrap();
    let deps = exe.parent().unwrap().to_path_buf();
    let Some(lib) = [deps.clone(), deps.parent().unwrap().to_path_buf()]
        .into_iter()
        .map(|d| d.join("libcritbound_ffi.a"))
        .find(|p| p.exists())
    else {
        eprintln!("libcritbound_ffi.a not built; skipped");
        return;
    };
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let bin = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let out = Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let text = String::from_utf8(run.stdout).unwrap();
    let mut it = text.split_whitespace().map(|v| v.parse::<f64>().unwrap());
    assert!((it.next().unwrap() - 8.0 * std::f64::consts::PI / 6f64.sqrt()).abs() < 1e-8);
    assert!((it.next().unwrap() - 0.0390).abs() < 1e-3);
}
