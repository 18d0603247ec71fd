use std::path::Path;
use std::process::Command;

fn mrnls(root: &Path, args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_mrnls"))
        .arg("--output-root")
        .arg(root)
        .args(args)
        .output()
        .expect("spawn mrnls");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn empty_config_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "empty.json", "{}");
    let (code, _, err) = mrnls(tmp.path(), &["run", &cfg]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn unknown_key_and_missing_seed_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let grid = r#""grid":{"kind":"radial4d","n":64,"extent":20.0,"dims":4}"#;
    let unknown = write(tmp.path(), "a.json", &format!(r#"{{"schema_version":1,"scenario":"ground_state","kappa":0.5,{grid},"colour":1}}"#));
    assert_eq!(mrnls(tmp.path(), &["run", &unknown]).0, 2);
    let bad_param =
        write(tmp.path(), "b.json", &format!(r#"{{"schema_version":1,"scenario":"ground_state","kappa":0.5,{grid},"params":{{"tol":1}}}}"#));
    assert_eq!(mrnls(tmp.path(), &["run", &bad_param]).0, 2);
    let no_seed = write(tmp.path(), "c.json", &format!(r#"{{"schema_version":1,"scenario":"inequality_audit","kappa":0.5,{grid}}}"#));
    assert_eq!(mrnls(tmp.path(), &["run", &no_seed]).0, 2);
    let wrong_grid = write(
        tmp.path(),
        "d.json",
        r#"{"schema_version":1,"scenario":"galilean_test","kappa":0.5,"grid":{"kind":"radial4d","n":64,"extent":20.0,"dims":4}}"#,
    );
    assert_eq!(mrnls(tmp.path(), &["run", &wrong_grid]).0, 2);
    assert_eq!(mrnls(tmp.path(), &["run", "/nonexistent/config.json"]).0, 2);
}

#[test]
fn bad_arguments_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(mrnls(tmp.path(), &["audit", "nonsense"]).0, 2);
    assert_eq!(mrnls(tmp.path(), &["groundstate"]).0, 2);
}

#[test]
fn groundstate_registers_and_rerun_is_consistent() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, out, err) = mrnls(tmp.path(), &["groundstate", "--kappa", "0.5", "--n", "128"]);
    assert_eq!(code, 0, "{out}\n{err}");
    assert!(out.contains("PASS cross_method_mass"));
    let reg: serde_json::Value = serde_json::from_slice(&std::fs::read(tmp.path().join("registry.json")).unwrap()).unwrap();
    assert_eq!(reg["entries"].as_array().unwrap().len(), 2);
    let dir = tmp.path().join("ground_state_kappa0.5");
    for f in ["run.json", "config.json", "ground_state.csv", "profile_kappa0.5.csv"] {
        assert!(dir.join(f).exists(), "{f}");
    }
    let first = std::fs::read(dir.join("ground_state.csv")).unwrap();
    let (code, out, _) = mrnls(tmp.path(), &["groundstate", "--kappa", "0.5", "--n", "128"]);
    assert_eq!(code, 0);
    assert!(out.contains("PASS registry_mass"));
    assert_eq!(first, std::fs::read(dir.join("ground_state.csv")).unwrap());
}

#[test]
fn scan_over_kappa_writes_one_row_per_value() {
    let tmp = tempfile::tempdir().unwrap();
    let t = write(
        tmp.path(),
        "t.json",
        r#"{"schema_version":1,"scenario":"ground_state","kappa":0.5,"grid":{"kind":"radial4d","n":128,"extent":20.0,"dims":4},"params":{"methods":["renormalization"]},"output":"kscan"}"#,
    );
    let (code, out, err) = mrnls(tmp.path(), &["scan", &t, "--axis", "kappa", "--values", "0.25,0.5,1,2"]);
    assert_eq!(code, 0, "{out}\n{err}");
    let csv = std::fs::read_to_string(tmp.path().join("kscan/scan.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("index,kappa,exit_code,passed,failed"));
    assert!(lines[0].contains(",mass,"));
    for i in 0..4 {
        assert!(tmp.path().join(format!("kscan/kappa_{i}/run.json")).exists());
    }
}

#[test]
fn scan_marks_failed_rows_and_continues() {
    let tmp = tempfile::tempdir().unwrap();
    let t = write(
        tmp.path(),
        "t.json",
        r#"{"schema_version":1,"scenario":"ground_state","kappa":0.5,"grid":{"kind":"radial4d","n":128,"extent":20.0,"dims":4},"params":{"methods":["renormalization"]},"output":"bad"}"#,
    );
    let (code, out, _) = mrnls(tmp.path(), &["scan", &t, "--axis", "kappa", "--values", "0.5,-1"]);
    assert_eq!(code, 1);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].contains(",0,true,"));
    assert!(rows[1].contains(",2,false,"));
}
