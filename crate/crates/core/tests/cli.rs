use qmut::document::QuiverDocument;
use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn qmut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmut")).args(args).env_remove("QMUT_THREADS").output().unwrap()
}

fn qmut_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_qmut"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn temp(name: &str, contents: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("qmut_cli_{}_{name}", std::process::id()));
    std::fs::write(&p, contents).unwrap();
    p
}

const MARKOV: &str = r#"{"schema_version":1,"rank":3,"ambient":1,"arrows":[
  {"from":1,"to":2,"label":{"num":0,"den":1}},
  {"from":2,"to":3,"label":{"num":0,"den":1}},
  {"from":3,"to":1,"label":{"num":0,"den":1}}]}"#;

#[test]
fn mutate_markov_is_fixed() {
    let o = qmut_stdin(&["mutate", "-", "--seq", "1"], MARKOV);
    assert_eq!(o.status.code(), Some(0));
    let doc = QuiverDocument::from_json(&stdout(&o)).unwrap();
    assert_eq!(doc.arrows.len(), 3);
    assert!(doc.arrows.iter().all(|a| a.value.label.map(|l| l.to_string()) == Some("0/1".into())));
    assert!(String::from_utf8_lossy(&o.stderr).contains("0/1"));
}

#[test]
fn mutate_twice_is_identity_and_writes_file() {
    let out = std::env::temp_dir().join(format!("qmut_cli_{}_twice.json", std::process::id()));
    let o = qmut(&["mutate", "seed:h4pp", "--seq", "3,3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("label"));
    let back = QuiverDocument::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let orig = qmut::tables::lookup("H4''").unwrap().document();
    assert_eq!(back.arrows, orig.arrows);
    std::fs::remove_file(out).unwrap();
}

#[test]
fn parse_and_vertex_errors() {
    let o = qmut_stdin(&["mutate", "-", "--seq", "1"], "{\"rank\": ");
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    let o = qmut(&["mutate", "seed:h3", "--seq", "4"]);
    assert_eq!(o.status.code(), Some(3));
    let o = qmut(&["explore", "seed:nonexistent"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn explore_verdict_exit_codes() {
    let o = qmut(&["explore", "seed:h3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["size"], 6);
    assert_eq!(v["schema_version"], 1);

    let three = temp(
        "three.json",
        r#"{"schema_version":1,"rank":3,"ambient":1,"arrows":[{"from":1,"to":2,"coeffs":["3"]},{"from":2,"to":3,"label":{"num":1,"den":3}}]}"#,
    );
    let o = qmut(&["explore", three.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(json(&o)["infiniteness_witness"]["rule"], "weight_above_two");
    std::fs::remove_file(three).unwrap();

    let o = qmut(&["explore", "seed:h4_affine", "--budget", "10", "--report", "text"]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stdout(&o).contains("budget_exhausted"));
}

#[test]
fn reports_do_not_depend_on_threads() {
    let a = qmut(&["--threads", "1", "explore", "seed:h4_11"]);
    let b = qmut(&["--threads", "4", "explore", "seed:h4_11"]);
    let c = Command::new(env!("CARGO_BIN_EXE_qmut")).args(["explore", "seed:h4_11"]).env("QMUT_THREADS", "3").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn classify_rank3_command() {
    let o = qmut(&["classify-rank3", "seed:h3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["normal_form"]["kind"], "path");
    let bad = r#"{"schema_version":1,"rank":3,"ambient":7,"arrows":[
      {"from":1,"to":2,"label":{"num":1,"den":3}},{"from":2,"to":3,"label":{"num":1,"den":3}},{"from":1,"to":3,"label":{"num":1,"den":7}}]}"#;
    let o = qmut_stdin(&["classify-rank3", "-"], bad);
    assert_eq!(o.status.code(), Some(4));
    let o = qmut(&["classify-rank3", "seed:h4"]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn series_commands() {
    let o = qmut(&["series", "realize", "--family", "odd", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = QuiverDocument::from_json(&stdout(&o)).unwrap();
    assert_eq!((doc.rank, doc.ambient, doc.arrows.len()), (4, 7, 6));

    let o = qmut(&["series", "mutate", "--family", "even-a", "--n", "5", "--vertex", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["valid"], true);

    let o = qmut(&["series", "realize", "--family", "odd", "--n", "3", "--tuple", "9,9,9,9"]);
    assert_eq!(o.status.code(), Some(2));

    let o = qmut(&["series", "verify", "--family", "even-b", "--n", "6", "--matrix"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["holds"], true);
    assert_eq!(v["class_size"], v["realized_forms"]);

    let o = qmut(&["series", "vanishing", "--family", "even-a", "--n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!json(&o)["entries"].as_array().unwrap().is_empty());
    let o = qmut(&["series", "vanishing", "--family", "odd", "--n", "4"]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn realize_command() {
    let gram = std::env::temp_dir().join(format!("qmut_cli_{}_gram.json", std::process::id()));
    let o = qmut(&["realize", "seed:F~4", "--gram-out", gram.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["corank"], 1);
    assert_eq!(v["holds"], true);
    let doc = qmut::document::GramDocument::from_json(&std::fs::read_to_string(&gram).unwrap()).unwrap();
    assert_eq!(qmut::gram_corank(&doc.to_realization().unwrap()), 1);
    std::fs::remove_file(gram).unwrap();
}

#[test]
fn tables_commands() {
    let o = qmut(&["tables", "sizes"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 18);
    assert_eq!(text.lines().filter(|l| l.ends_with("PASS")).count(), 15);
    // two published sizes are not reproduced
    assert_eq!(o.status.code(), Some(7));

    let o = qmut(&["tables", "series", "--max-n", "6", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["rows"].as_array().unwrap().len(), 15);

    let o = qmut(&["tables", "realizations", "--max-n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1 + 17 + 6);
}

#[test]
fn export_dot() {
    let o = qmut(&["export-dot", "seed:h3"]);
    let dot = stdout(&o);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(dot.matches("->").count(), 2);
    assert_eq!(dot.matches("label=").count(), 1);
    let o = qmut_stdin(&["export-dot", "-"], MARKOV);
    assert_eq!(stdout(&o).matches("black:invis:black").count(), 3);
    let o = qmut_stdin(&["export-dot", "-"], r#"{"schema_version":1,"rank":3,"ambient":1,"arrows":[]}"#);
    let dot = stdout(&o);
    assert_eq!(dot.matches("->").count(), 0);
    assert!(dot.contains("  3;"));
}

#[test]
fn path_command() {
    let h4 = qmut::tables::lookup("H4").unwrap().quiver();
    let target = temp("target.json", &QuiverDocument::from_quiver(&h4.mutate_seq(&[1, 2]).unwrap()).to_json());
    let o = qmut(&["path", "seed:h4", target.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let path: Vec<usize> = serde_json::from_value(json(&o)["path"].clone()).unwrap();
    assert!(path.len() <= 2);
    std::fs::remove_file(target).unwrap();
    let o = qmut(&["path", "seed:h3", "seed:h3pp"]);
    assert_eq!(o.status.code(), Some(6));
}
