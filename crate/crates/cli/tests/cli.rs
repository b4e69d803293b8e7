use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel).display().to_string()
}

fn reftc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reftc")).args(args).output().unwrap()
}

fn lines(o: &Output) -> Vec<String> {
    String::from_utf8_lossy(&o.stdout).lines().map(str::to_string).collect()
}

#[test]
fn exit_codes_by_failure_class() {
    let cases = [
        (vec!["check".to_string(), corpus("pos/selfify.rt")], 0),
        (vec!["check".to_string(), corpus("neg/force-non-thunk.rt")], 2),
        (vec!["check".to_string(), corpus("neg/parse-error.rt")], 3),
        (vec!["verify".to_string(), corpus("neg/bad-constant.rt")], 4),
        (vec!["check".to_string(), "/nonexistent/file.rt".to_string()], 1),
        (["check", "--monad", "maybe", "--lifting", "must"].map(String::from).into_iter().chain([corpus("pos/unit.rt")]).collect(), 1),
    ];
    for (args, code) in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(reftc(&args).status.code(), Some(code), "{args:?}");
    }
}

#[test]
fn selfification_shows_in_the_rule_list() {
    let out = reftc(&["check", "--derivation", &corpus("pos/selfify.rt")]);
    let text = lines(&out).join("\n");
    assert!(text.contains("RULES") && text.contains("var-self"), "{text}");
    assert!(text.contains("DERIV"));
}

#[test]
fn structured_output_mirrors_text() {
    let file = corpus("pos/succ.rt");
    let text = lines(&reftc(&["verify", &file]));
    let json = lines(&reftc(&["verify", "--format", "json", &file]));
    assert_eq!(text.len(), json.len());
    for (t, j) in text.iter().zip(&json) {
        let v: serde_json::Value = serde_json::from_str(j).unwrap();
        let rebuilt = format!(
            "{} {}:{}:{} {} {}",
            v["severity"].as_str().unwrap(),
            v["file"].as_str().unwrap(),
            v["line"],
            v["col"],
            v["code"].as_str().unwrap(),
            v["message"].as_str().unwrap()
        );
        assert_eq!(&rebuilt, t);
    }
}

#[test]
fn output_is_deterministic() {
    let file = corpus("pos/case-max.rt");
    let a = reftc(&["verify", &file]);
    let b = reftc(&["verify", &file]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn flags_override_the_file_model() {
    let file = corpus("pos/mu-diverge.rt");
    assert_eq!(reftc(&["verify", &file]).status.code(), Some(0));
    let out = reftc(&["verify", "--lifting", "total", &file]);
    assert_eq!(out.status.code(), Some(2));
    assert!(lines(&out).iter().any(|l| l.contains("E-MU")));
}

#[test]
fn dump_lists_carriers_and_sections() {
    let out = reftc(&["dump", &corpus("pos/succ.rt")]);
    assert_eq!(out.status.code(), Some(0));
    let text = lines(&out).join("\n");
    for code in ["BASE", "PRED", "SECTION"] {
        assert!(text.contains(code), "{code} missing from\n{text}");
    }
}

#[test]
fn eq3_law_suite_at_bound_two() {
    let out = reftc(&["laws", "eq3", "--bound", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(lines(&out).iter().all(|l| l.starts_with("info laws")));
}
