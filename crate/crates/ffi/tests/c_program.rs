//! Compiles a small C program against the generated header and the static
//! library, then runs it.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "subspace_reduce.h"

int main(void) {
    double pts[] = {1, 0, 0,  2, 0.01, 0,  -1, 0, 0.01,  0, 1, 0,  0.01, 3, 0,  0, -2, 0};
    SrDataSet *raw = NULL, *f = NULL;
    SrSolveReport *rep = NULL;
    size_t labels[6];
    size_t r = 0;
    double c = 0;
    if (sr_dataset_new(pts, 3, 6, &raw) != SR_STATUS_OK) return 1;
    if (sr_dataset_normalize(raw, &f) != SR_STATUS_OK) return 2;
    if (sr_oracle(f, 2, 1, 1000, &rep) != SR_STATUS_OK) return 3;
    if (sr_solve_report_labels(rep, labels, 6) != SR_STATUS_OK) return 4;
    if (labels[0] != labels[1] || labels[0] != labels[2] || labels[3] != labels[4] || labels[0] == labels[3]) return 5;
    if (sr_oracle(f, 2, 1, 10, &rep) != SR_STATUS_BUDGET_EXCEEDED || sr_last_error()[0] == '\0') return 6;
    if (sr_min_reduced_dim(0.5, 0.1, 2, 3, 1, 20, &r) != SR_STATUS_OK || r != 3924) return 7;
    if (sr_c0(0.5, &c) != SR_STATUS_OK || fabs(c - 1.0 / 24.0) > 1e-15) return 8;
    printf("%.6g\n", sr_solve_report_error(rep));
    sr_solve_report_free(rep);
    sr_dataset_free(f);
    sr_dataset_free(raw);
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary> -> target/<profile>
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = profile_dir.join("libsubspace_reduce_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());

    let work = tempfile::TempDir::new().unwrap();
    let src = work.path().join("main.c");
    let exe = work.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let err: f64 = String::from_utf8(out.stdout)
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!((0.0..1e-3).contains(&err));
}
