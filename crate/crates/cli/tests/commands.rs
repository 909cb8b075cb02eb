use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn spectra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectra")).args(args).env_remove("SPECTRA_SEED").output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = spectra(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json_of(args: &[&str]) -> Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    serde_json::from_str(&stdout(&all)).unwrap()
}

fn code(args: &[&str]) -> i32 {
    spectra(args).status.code().unwrap()
}

fn temp_file(name: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("spectra-{}-{name}.json", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn group_text() {
    assert_eq!(stdout(&["group", "hopf", "2", "0", "1"]), "Spectral sequence E^2_{0,1}\nComponent Z\n");
    assert_eq!(stdout(&["group", "s2-kz2", "2", "0", "1"]), "Spectral sequence E^2_{0,1}\nComponent Z/2Z\n");
    assert_eq!(stdout(&["group", "hopf", "3", "0", "1"]), "Spectral sequence E^3_{0,1}\n");
}

#[test]
fn group_json() {
    let v = json_of(&["group", "s2-kz2", "2", "0", "1"]);
    assert_eq!(v["components"], json!(["Z/2"]));
    assert_eq!(v["divisors"], json!([2]));
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys[..6], ["r", "p", "q", "components", "numerator", "divisors"]);
    // d²: Z → Z/2 is onto, so its kernel 2Z survives to E³_{2,0}.
    assert_eq!(json_of(&["group", "s2-kz2", "3", "2", "0"])["components"], json!(["Z"]));
    assert_eq!(json_of(&["group", "s2-kz2", "3", "0", "1"])["components"], json!([]));
}

#[test]
fn basis_divisors() {
    let hopf = stdout(&["bd", "hopf", "2", "2", "0"]);
    assert_eq!(hopf.matches("{CMBN 2}").count(), 1);
    assert!(hopf.contains("<CrPr - S2 1-0 NIL>"));
    assert!(hopf.ends_with(" (0))\n"));
    assert!(stdout(&["bd", "s2-kz2", "2", "0", "1"]).ends_with(" (2))\n"));
    let s2 = stdout(&["bd", "s2-kz2", "2", "2", "0"]);
    assert_eq!(s2.matches("{CMBN 2}").count(), 5);
    assert!(s2.ends_with(" (1 1 1 1 0))\n"));
    let v = json_of(&["bd", "hopf", "2", "0", "1"]);
    assert_eq!(v["generators"].as_array().unwrap().len(), 1);
}

#[test]
fn differentials() {
    assert_eq!(stdout(&["dffr", "hopf", "2", "2", "0", "1"]), "(1)\n");
    assert_eq!(stdout(&["dffr", "s2-kz2", "2", "2", "0", "1"]), "(1)\n");
    assert_eq!(stdout(&["dffr", "s2-kz2", "2", "2", "0", "0"]), "(0)\n");
    assert_eq!(stdout(&["dffr", "hopf", "2", "2", "0", "-3"]), "(-3)\n");
    assert_eq!(json_of(&["dffr", "s2-kz2", "2", "2", "0", "3"]), json!([1]));
}

#[test]
fn convergence() {
    assert_eq!(stdout(&["cnvg", "hopf", "1"]), "3\n");
    assert_eq!(stdout(&["cnvg", "hopf", "0"]), "1\n");
    assert_eq!(stdout(&["cnvg", "s2-kz2", "2"]), "1\n");
    assert_eq!(json_of(&["cnvg", "s2-kz2", "1"]), json!({"degree": 1, "level": 3}));
}

#[test]
fn sweeps() {
    assert_eq!(stdout(&["sweep", "s2-kz2", "1", "3"]), "Spectral sequence E^3_{0,1}\nSpectral sequence E^3_{1,0}\n");
    let hopf = json_of(&["sweep", "hopf", "3", "3"]);
    let entries = hopf.as_array().unwrap();
    assert_eq!(entries.len(), 4);
    for e in entries {
        let expected = if e["p"] == 2 { json!(["Z"]) } else { json!([]) };
        assert_eq!(e["components"], expected, "{e}");
    }
    assert_eq!(stdout(&["sweep", "s2-kz2", "0", "1"]), "Spectral sequence E^1_{0,0}\nComponent Z\n");
}

#[test]
fn text_output_is_stable() {
    let args = ["bd", "s2-kz2", "2", "2", "0"];
    assert_eq!(stdout(&args), stdout(&args));
}

#[test]
fn list_and_validate() {
    let list = stdout(&["list-scenarios"]);
    for name in ["hopf", "p3r", "s2-kz2"] {
        assert!(list.lines().any(|l| l.starts_with(&format!("{name}\t"))), "{list}");
    }
    let v = json_of(&["validate", "hopf", "--samples", "10", "--seed", "7", "--max-degree", "3"]);
    assert!(v.as_array().unwrap().iter().all(|c| c["valid"] == json!(true)), "{v}");
    assert!(stdout(&["validate", "s2-kz2", "--samples", "10"]).contains("valid"));
}

#[test]
fn file_sources() {
    let path = temp_file(
        "small",
        r#"{"filtration": {"a": 0, "b": 1, "e": 2},
            "differential": {"2:b": [[2, "a"]], "2:e": [[1, "a"]]},
            "degrees": {"1": ["a"], "2": ["b", "e"]}}"#,
    );
    let p = path.to_str().unwrap();
    assert_eq!(stdout(&["group", p, "2", "0", "1"]), "Spectral sequence E^2_{0,1}\nComponent Z/2Z\n");
    assert_eq!(stdout(&["dffr", p, "2", "2", "0", "1"]), "(1)\n");
    assert_eq!(stdout(&["cnvg", p, "1"]), "3\n");
    assert_eq!(code(&["validate", p]), 0);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["group", "no-such-scenario", "2", "0", "1"]), 2);
    let bad = temp_file(
        "bad",
        r#"{"degrees": {"0": ["z"], "1": ["a"]}, "differential": {"1:a": [[1, "z"]]}, "filtration": {"a": 0, "z": 1}}"#,
    );
    assert_eq!(code(&["group", bad.to_str().unwrap(), "1", "0", "0"]), 3);
    std::fs::write(&bad, "not json").unwrap();
    assert_eq!(code(&["cnvg", bad.to_str().unwrap(), "0"]), 3);
    std::fs::remove_file(bad).unwrap();
    assert_eq!(code(&["dffr", "hopf", "2", "2", "0", "1", "1"]), 5);
    assert_eq!(code(&["dffr", "hopf", "2", "2", "0"]), 5);
    assert_eq!(code(&["group", "hopf", "x", "0", "1"]), 1);
    assert_eq!(code(&["--help"]), 0);
}
