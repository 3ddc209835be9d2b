//! End-to-end tests for the qseries binary: output formats, file
//! loading, and the exit-code contract (0 pass, 1 fail, 2 parse error,
//! 3 evaluation error).

use std::io::Write;
use std::process::{Command, Output};

fn qseries(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qseries"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmp_file(name: &str, contents: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("qseries-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    path
}

#[test]
fn expand_prints_nonzero_coefficients() {
    let out = qseries(&["expand", "f1^4*f5^4", "--order", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == "15 -64"), "{}", text);
    assert!(text.lines().any(|l| l == "0 1"), "{}", text);

    let out = qseries(&["expand", "q", "--order", "2"]);
    assert_eq!(stdout(&out).trim(), "1 1");
}

#[test]
fn expand_modular_mode() {
    let out = qseries(&["expand", "f1^4*f5^4", "--order", "16", "--mode", "mod:64"]);
    assert_eq!(out.status.code(), Some(0));
    // -4 becomes 60 and -64 becomes 0 (so the q^15 line disappears)
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == "1 60"), "{}", text);
    assert!(!text.lines().any(|l| l.starts_with("15 ")), "{}", text);
}

#[test]
fn expand_of_vanishing_progression_prints_nothing() {
    let out = qseries(&["expand", "AP(16,7; f1^4*f5^4)", "--order", "40"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "");
}

#[test]
fn parse_errors_exit_2() {
    let out = qseries(&["expand", "f1^4 +"]);
    assert_eq!(out.status.code(), Some(2));
    let out = qseries(&["expand", "AP(4,7; f1)"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn evaluation_errors_exit_3() {
    let out = qseries(&["expand", "1/(f1 - f1)", "--order", "10"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_builtin_smoke_order() {
    let out = qseries(&["verify", "--catalog", "builtin", "--order", "40"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 29);
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
    // deterministic order: sorted by entry name
    let names: Vec<&str> = text
        .lines()
        .map(|l| l.split_whitespace().nth(1).unwrap())
        .collect();
    let mut sorted = names.clone();
    sorted.sort_unstable();
    assert_eq!(names, sorted);
}

#[test]
fn verify_catalog_file_with_failure_exits_1() {
    let path = tmp_file(
        "bad_identity.txt",
        "[identity]\nname = planted\nlhs = f1^4\nrhs = f4^10/(f2^2*f8^4) - 4*q*f2^2*f8^4/f4^2 + q^5\norder = 60\n",
    );
    let out = qseries(&["verify", "--catalog", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("FAIL planted n=5"), "{}", text);
}

#[test]
fn verify_rejects_malformed_file_exit_2() {
    let path = tmp_file("malformed.txt", "[identity]\nname only line\n");
    let out = qseries(&["verify", "--catalog", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_claim_file() {
    let path = tmp_file(
        "claims.txt",
        "\
[congruence]
name = a7_small
series = f2^6*f7^6/f1^2
m = 7
j = 6
mod = 7
nmax = 60

[family]
name = K_small_family
series = f1^2*f2^2*f7^2*f14^2
p = 7
c = 1
offset = p^a-2
modexp = 0
alphamax = 2
nmax = 10

[scalar]
name = L_small
series = f1^5*f7^5/(f2*f14)
m = 7
j = 6
scalar = -7
shift = 0
nmax = 60
",
    );
    let out = qseries(&["scan", "--claims", path.to_str().unwrap()]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{}", text);
    assert!(
        text.contains("PASS K_small_family_a2 m=49 j=47 mod=49"),
        "{}",
        text
    );
    assert!(text.contains("PASS L_small"), "{}", text);
    assert!(text.contains("induced_mod=7:PASS"), "{}", text);
}

#[test]
fn scan_failing_claim_exits_1() {
    let path = tmp_file(
        "failing_claim.txt",
        "[congruence]\nname = wrong\nseries = f1^4*f5^4\nm = 2\nj = 1\nmod = 8\nnmax = 50\n",
    );
    let out = qseries(&["scan", "--claims", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("FAIL wrong n=0 residue=4 mod=8"), "{}", text);
}

#[test]
fn prove_emits_certificate_block() {
    let out = qseries(&["prove", "--name", "diss_f1_4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("certificate diss_f1_4"), "{}", text);
    assert!(text.contains("level: 8"), "{}", text);
    assert!(text.contains("pole bound B: 1"), "{}", text);
    assert!(text.contains("verdict: PROVEN"), "{}", text);
    assert!(text.contains("PROVEN diss_f1_4 level=8 B=1"), "{}", text);
}

#[test]
fn prove_gates_theta_entries() {
    let out = qseries(&["prove", "--name", "lemma21_ii"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("NOT_APPLICABLE lemma21_ii"));
}

#[test]
fn prove_unknown_name_exit_2() {
    let out = qseries(&["prove", "--name", "no_such_entry"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_all_sections_and_exit() {
    // low catalog order keeps this test quick; the scans run at their
    // built-in sizes
    let out = qseries(&["report-all", "--order", "40"]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{}", text);
    assert!(text.contains("== identity catalog =="), "{}", text);
    assert!(text.contains("== congruence scans =="), "{}", text);
    assert!(text.contains("== rigor certificates =="), "{}", text);
    assert!(text.contains("PASS K_family_a3"), "{}", text);
    assert!(text.contains("RESOLVED K1_a2"), "{}", text);
    assert!(text.contains("PROVEN jacobi_deg5"), "{}", text);
    assert!(text.contains("NOT_APPLICABLE lemma21_i"), "{}", text);
    // 29 catalog lines plus 13 congruence, 23 family, and 8 scalar scans
    let pass_lines = text.lines().filter(|l| l.starts_with("PASS ")).count();
    assert_eq!(pass_lines, 29 + 44, "{}", text);
}
