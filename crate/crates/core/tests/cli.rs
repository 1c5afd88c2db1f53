use std::path::PathBuf;
use std::process::Command;

use fpt_height::cli::{parse_primes, run_with, CONFIG_ENV};
use serde_json::Value;

const QUARTIC_K3: [&str; 4] = ["--poly", "x^2+y^5+z^5+w^10", "--weights", "5,2,2,1"];
const LOOP_K3: [&str; 4] = ["--poly", "x^8*y+y^6*z+z^3+x*w^2", "--weights", "1,1,3,4"];

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(
        std::iter::once("fpt-height").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "args {args:?} failed: {err}");
    out
}

fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name]
        .iter()
        .collect();
    std::fs::read_to_string(path).unwrap()
}

fn with(head: &[&str], poly: &[&str], tail: &[&str]) -> Vec<String> {
    head.iter()
        .chain(poly)
        .chain(tail)
        .map(|s| s.to_string())
        .collect()
}

fn ok_owned(args: &[String]) -> String {
    ok(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

#[test]
fn lct_cy_branch() {
    assert_eq!(
        ok(&["lct", "--weights", "5,2,2,1", "--degree", "10"]),
        "1\n"
    );
    assert_eq!(ok(&["lct", "--weights", "1,1,1", "--degree", "4"]), "3/4\n");
}

#[test]
fn mu_hand_expansion() {
    assert_eq!(
        ok(&[
            "mu",
            "--poly",
            "x^2+y^2",
            "--weights",
            "1,1",
            "--prime",
            "3",
            "--exp",
            "1"
        ]),
        "3\n"
    );
}

#[test]
fn delsarte_supersingular_row() {
    assert_eq!(
        ok_owned(&with(&["delsarte"], &QUARTIC_K3, &["--prime", "19"])),
        "e_A=10, height=inf\n"
    );
    assert_eq!(
        ok_owned(&with(&["delsarte"], &QUARTIC_K3, &["--prime", "11"])),
        "e_A=10, height=1\n"
    );
}

#[test]
fn verify_quartic_k3_golden() {
    let args = with(
        &["--format", "csv", "--override-theorem-range", "verify"],
        &QUARTIC_K3,
        &["--prime", "3,7,11,13,17,19"],
    );
    let out = ok_owned(&args);
    assert_eq!(out, fixture("verify_quartic_k3.csv"));
    assert_eq!(out.lines().count(), 7);
}

#[test]
fn verify_loop_k3_golden() {
    let args = with(
        &["--format", "csv", "--override-theorem-range", "verify"],
        &LOOP_K3,
        &["--prime", "3..19"],
    );
    assert_eq!(ok_owned(&args), fixture("verify_loop_k3.csv"));
}

#[test]
fn verify_fermat_golden() {
    let out = ok(&[
        "--format",
        "csv",
        "verify",
        "--poly",
        "x^4+y^4+z^4",
        "--prime",
        "3..13",
    ]);
    assert_eq!(out, fixture("verify_fermat_quartic.csv"));
}

#[test]
fn verify_below_range_without_override_shows_bracket() {
    let out = ok_owned(&with(
        &["--format", "json", "verify"],
        &QUARTIC_K3,
        &["--prime", "3"],
    ));
    let v: Value = serde_json::from_str(&out).unwrap();
    let row = &v["rows"][0];
    assert_eq!(row["fpt"], "[5/9, 2/3]");
    assert_eq!(row["consistent"], Value::Null);
    assert!(row["note"]
        .as_str()
        .unwrap()
        .contains("outside theorem range"));
}

#[test]
fn json_schema_of_verify() {
    let out = ok_owned(&with(
        &["--format", "json", "verify"],
        &QUARTIC_K3,
        &["--prime", "11"],
    ));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["command"], "verify");
    assert_eq!(v["inputs"]["weights"], serde_json::json!([5, 2, 2, 1]));
    let keys: Vec<&str> = v["rows"][0]
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    assert_eq!(
        keys,
        [
            "p",
            "mu_p",
            "mu_p2",
            "fpt",
            "height_stienstra",
            "height_goto",
            "consistent",
            "note"
        ]
    );
    assert_eq!(v["rows"][0]["height_goto"], 1);
}

#[test]
fn infinite_height_renders_as_string() {
    let out = ok_owned(&with(
        &["--format", "json", "delsarte"],
        &QUARTIC_K3,
        &["--prime", "19"],
    ));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["rows"][0]["height"], "inf");
}

#[test]
fn output_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for t in ["1", "2", "8"] {
        let path = dir.path().join(format!("out{t}.json"));
        let p = path.to_str().unwrap();
        let args = with(
            &["--format", "json", "--threads", t, "--out", p, "verify"],
            &LOOP_K3,
            &["--prime", "11..19"],
        );
        assert_eq!(ok_owned(&args), "");
        texts.push(std::fs::read(&path).unwrap());
    }
    assert!(texts.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["mu", "--poly", "x^2", "--prime", "4"]).0, 1);
    assert_eq!(run(&["mu", "--poly", "x^2+", "--prime", "3"]).0, 1);
    assert_eq!(run(&["mu", "--bogus"]).0, 2);
    assert_eq!(
        run(&["--threads", "0", "lct", "--weights", "1", "--degree", "2"]).0,
        2
    );
    assert_eq!(run(&["mu", "--poly", "x^2", "--prime", "24..28"]).0, 2);
    let (code, _, err) = run(&["verify", "--poly", "x^2+y^2+z^2", "--prime", "5"]);
    assert_eq!(code, 1);
    assert!(err.contains("d = w"), "{err}");
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let (code, _, err) = run(&[
        "--out",
        "/nonexistent/dir/x.txt",
        "lct",
        "--weights",
        "1,1",
        "--degree",
        "2",
    ]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error:"));
}

#[test]
fn prime_lists_and_ranges() {
    assert_eq!(
        parse_primes("3..19").unwrap(),
        vec![3, 5, 7, 11, 13, 17, 19]
    );
    assert_eq!(parse_primes("5, 13").unwrap(), vec![5, 13]);
    assert!(parse_primes("9").is_err());
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# batch settings\nformat = csv\nthreads = 2\n").unwrap();
    let bin = env!("CARGO_BIN_EXE_fpt-height");
    let lct = ["lct", "--weights", "1,1,1", "--degree", "4"];
    let from_file = Command::new(bin)
        .env(CONFIG_ENV, &cfg)
        .args(lct)
        .output()
        .unwrap();
    assert!(from_file.status.success());
    assert_eq!(String::from_utf8(from_file.stdout).unwrap(), "lct\n3/4\n");
    let overridden = Command::new(bin)
        .env(CONFIG_ENV, &cfg)
        .args(["--format", "table"])
        .args(lct)
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(overridden.stdout).unwrap(), "3/4\n");

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    let bad = Command::new(bin)
        .env(CONFIG_ENV, &cfg)
        .args(lct)
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
