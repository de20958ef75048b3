use std::process::{Command, Output};

fn hhbv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hhbv")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = hhbv(&all);
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn json_report_has_the_schema_keys() {
    let v = json(&["check-dga", "--algebra", "sphere-cohomology"]);
    for key in ["command", "config", "checks", "timing_ms", "version"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["command"], "check-dga");
    assert!(v["timing_ms"].is_null());
    let check = &v["checks"][0];
    for key in ["name", "pass", "witnesses", "expected_ref"] {
        assert!(check.get(key).is_some(), "check missing {key}");
    }
}

#[test]
fn timing_is_opt_in() {
    let v = json(&["check-dga", "--timing"]);
    assert!(v["timing_ms"].is_number());
}

#[test]
fn output_is_deterministic() {
    for args in [&["bv-table", "--k-max", "4"][..], &["counterexample"], &["hh-basis", "--bound", "4"]] {
        let a = hhbv(args);
        let b = hhbv(args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn broken_algebra_file_fails_with_a_witness() {
    let dir = std::env::temp_dir().join(format!("hhbv-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.alg");
    std::fs::write(
        &path,
        "generator e degree 0\ngenerator x degree 0\ngenerator y degree -1\n\
         mul e e = e\nmul e x = x\nmul x e = x\nmul e y = y\nmul y e = y\n\
         mul x x = x\nd x = y\nunit = e\n",
    )
    .unwrap();
    let arg = format!("file:{}", path.display());
    let out = hhbv(&["check-dga", "--algebra", &arg, "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let failed: Vec<_> = v["checks"].as_array().unwrap().iter().filter(|c| c["pass"] == false).collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|c| !c["witnesses"].as_array().unwrap().is_empty()));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_names_are_errors() {
    assert_eq!(hhbv(&["check-dga", "--algebra", "torus"]).status.code(), Some(2));
    assert_eq!(hhbv(&["verify-hip", "--hip", "nope"]).status.code(), Some(2));
    assert_eq!(hhbv(&["check-dga", "--algebra", "file:/nonexistent/x.alg"]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_the_report() {
    let path = std::env::temp_dir().join(format!("hhbv-out-{}.txt", std::process::id()));
    let p = path.to_str().unwrap();
    let out = hhbv(&["local-identities", "--out", p]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let direct = hhbv(&["local-identities"]);
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
    std::fs::remove_file(&path).ok();
}

#[test]
fn counterexample_command_passes_its_checks() {
    let v = json(&["counterexample"]);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn pattern_files_are_accepted() {
    let path = std::env::temp_dir().join(format!("hhbv-pat-{}.txt", std::process::id()));
    std::fs::write(&path, "left: [] m: s right: [] out: e\nleft: [] m: e right: [] out: s\nleft: [s s] m: e right: [] out: e\n")
        .unwrap();
    let arg = format!("file:{}", path.display());
    assert!(hhbv(&["verify-hip", "--hip", &arg, "--algebra", "sphere-cohomology"]).status.success());
    assert_eq!(hhbv(&["verify-hip", "--hip", &arg]).status.code(), Some(2));
    std::fs::remove_file(&path).ok();
}
