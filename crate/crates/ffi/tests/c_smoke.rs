//! Compiles a small C program against the generated header and the static
//! library, then runs it.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "ldlab.h"

int main(void) {
    LdMeasure *m = NULL;
    if (ld_measure_uniform_grid(4096, &m) != LD_STATUS_OK) return 10;
    double mean = 0.0;
    if (ld_measure_mean(m, &mean) != LD_STATUS_OK || fabs(mean - 0.5) > 1e-12) return 11;
    double l1, l2, v;
    if (ld_reverse_projection(m, 0.3, &l1, &l2, &v) != LD_STATUS_OK) return 12;
    if (fabs(l1 + 0.3 * l2 - 1.0) > 1e-9) return 13;
    double cuts[1] = {0.5};
    LdPartition *p = NULL;
    if (ld_partition_new(cuts, 1, &p) != LD_STATUS_OK) return 14;
    double cells[2];
    size_t len = 0;
    if (ld_project(m, p, cells, 2, &len) != LD_STATUS_OK || len != 2) return 15;
    if (ld_big_f_inv(2.0, &v) != LD_STATUS_INVALID_ARGUMENT || ld_last_error_message() == NULL) return 16;
    printf("%.6f %.6f\n", cells[0], ld_rate_i1(0.7));
    ld_partition_free(p);
    ld_measure_free(m);
    return 0;
}
"#;

fn static_lib() -> Option<PathBuf> {
    // tests/<exe> lives in target/<profile>/deps
    let exe = std::env::current_exe().ok()?;
    let profile = exe.parent()?.parent()?;
    let lib = profile.join("libldlab_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_and_runs() {
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    assert!(include.join("ldlab.h").exists(), "header not generated");
    let Some(lib) = static_lib() else {
        panic!("static library not found next to the test binary");
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let bin = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler runs");
    assert!(status.success(), "compiling the C program failed");
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0.500000 0.252846");
}
