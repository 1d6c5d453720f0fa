//! Exit-code contract of the installed binary: 0 success, 1 configuration
//! errors, 2 numerical failures.

use std::process::Command;

fn chemcomp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chemcomp"))
}

fn tmp(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn analysis_subcommand_succeeds() {
    let out = chemcomp()
        .args(["stability", "--a", "0.2", "--L", "2", "--dim", "1", "--chi", "5.335"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("chi_star = 5.285109107982288"), "{text}");
    assert!(text.contains("unstable"), "{text}");
}

#[test]
fn config_errors_exit_one() {
    let path = tmp("bad.cfg");
    std::fs::write(&path, "[scenario]\nname = pattern-1d\n[params]\nchi3 = 1\n").unwrap();
    let out = chemcomp().arg("simulate").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("chi3"), "{err}");

    // unknown flags are usage errors, also 1
    let out = chemcomp().args(["stability", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn numerical_failures_exit_two() {
    let path = tmp("undershoot.cfg");
    let dir = tmp("undershoot-out");
    std::fs::write(
        &path,
        format!(
            "[scenario]\nname = gaussian-2d\n[grid]\nn = 40\n[time]\ndt = 0.2\nt_end = 10\n\
             [output]\ndir = {}\n",
            dir.display()
        ),
    )
    .unwrap();
    let out = chemcomp().arg("simulate").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("undershoot"), "{err}");
}
