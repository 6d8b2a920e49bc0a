//! Compiles and runs a small C program against the generated header and the static library.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "pinoise.h"

int main(void) {
    double p[4] = {0.25, 0.25, 0.25, 0.25};
    double h = 0.0;
    if (pinoise_entropy(p, 4, PINOISE_LOG_BASE_BITS, &h) != PINOISE_STATUS_OK || fabs(h - 2.0) > 1e-12) return 1;
    if (pinoise_entropy(p, 4, PINOISE_LOG_BASE_BITS, NULL) != PINOISE_STATUS_NULL_POINTER) return 2;
    if (pinoise_last_error() == NULL) return 3;

    double signal[3] = {0.5, 0.5, 0.5};
    double sigmas[2] = {0.0, 1.0};
    PinoiseSrSweep *sweep = NULL;
    if (pinoise_sr_sweep(signal, 3, 1.0, 0.0, 2.0, 64, 500, sigmas, 2, 1, &sweep) != PINOISE_STATUS_OK) return 4;
    PinoiseSrPoint row;
    if (pinoise_sr_sweep_get(sweep, 1, &row) != PINOISE_STATUS_OK || !(row.mi > 0.0)) return 5;
    pinoise_sr_sweep_free(sweep);
    printf("ok\n");
    return 0;
}
"#;

fn profile_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let lib = profile_dir().join("libpinoise_ffi.a");
    if !lib.exists() {
        eprintln!("static library not built at {}; skipping", lib.display());
        return;
    }
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let bin = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status();
    let Ok(status) = status else {
        eprintln!("no C compiler ({cc}); skipping");
        return;
    };
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
