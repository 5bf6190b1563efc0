use enriques_kit::run;

fn call(args: &[&str], stdin_file: Option<&str>) -> (i32, String, String) {
    let mut argv = vec!["enriques-kit".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    if let Some(f) = stdin_file {
        argv.push(f.to_string());
    }
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn temp_file(name: &str, contents: &str) -> String {
    let path = std::env::temp_dir().join(format!("enriques-kit-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn signature_of_d4() {
    let (code, out, _) = call(&["lattice", "signature", "--name", "D4neg"], None);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "(0,4,0)");
    let (_, out, _) = call(&["--json", "lattice", "signature", "--name", "D4neg"], None);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v, serde_json::json!([0, 4, 0]));
}

#[test]
fn action_table_lists_five_types() {
    let (code, out, _) = call(&["actions", "table"], None);
    assert_eq!(code, 0);
    for t in 1..=5 {
        assert!(out.contains(&format!("type {t}:")), "{out}");
    }
    assert!(out.contains("type 4: halves (empty, empty)"));
}

#[test]
fn single_criterion_as_json() {
    let (code, out, _) = call(&["--json", "verify-paper", "--only", "AC-4"], None);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 1);
    assert_eq!(entries[0]["id"], "AC-4");
    assert_eq!(entries[0]["status"], "verified");
}

#[test]
fn unknown_criterion_is_a_usage_error() {
    let (code, _, err) = call(&["verify-paper", "--only", "AC-99"], None);
    assert_eq!(code, 2);
    assert!(err.contains("AC-99"), "{err}");
}

#[test]
fn bad_arguments_exit_with_two() {
    assert_eq!(call(&["bogus"], None).0, 2);
    assert_eq!(call(&["lattice", "signature", "--name", "nope"], None).0, 2);
    assert_eq!(call(&["--help"], None).0, 0);
}

#[test]
fn center_round_trips_through_check() {
    let (code, center, _) = call(&["model", "center"], None);
    assert_eq!(code, 0);
    let path = temp_file("center.json", &center);
    let (code, out, _) = call(&["model", "check"], Some(&path));
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("valid"), "{out}");
}

#[test]
fn check_attributes_the_failing_clause() {
    // x²y² vanishes along both axes of the torus
    let path = temp_file("square.json", r#"{"coeffs":[{"i":2,"j":2,"re":"1","im":"0"}]}"#);
    let (code, out, _) = call(&["model", "validate"], Some(&path));
    assert_eq!(code, 0, "{out}");
    let (code, out, _) = call(&["model", "check"], Some(&path));
    assert_eq!(code, 1);
    assert!(out.contains("sign"), "{out}");
}

#[test]
fn malformed_input_is_rejected() {
    let path = temp_file("bad.json", r#"{"coeffs":[{"i":5,"j":0,"re":"1","im":"0"}]}"#);
    let (code, out, _) = call(&["model", "validate"], Some(&path));
    assert_eq!(code, 1);
    assert!(out.starts_with("invalid"), "{out}");
    // unparseable JSON is an input error
    let path = temp_file("garbage.json", "{");
    assert_eq!(call(&["model", "check"], Some(&path)).0, 2);
}
