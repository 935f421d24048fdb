use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_outerspine"))
        .args(args)
        .env_remove("OUTERSPINE_LMAX")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn norm_table_has_six_rows() {
    let o = run(&["norm", "--n", "2", "--phi", "ab,b", "--upto", "2"]);
    assert!(o.status.success());
    let rows: Vec<String> = stdout(&o).lines().map(str::to_owned).collect();
    assert_eq!(rows, ["a\t2", "b\t1", "aa\t4", "ab\t3", "aB\t1", "bb\t2"]);
}

#[test]
fn identity_norm_is_word_length() {
    let o = run(&["norm", "--n", "3", "--upto", "3", "--emit", "json"]);
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for r in rows.as_array().unwrap() {
        assert_eq!(
            r["length"].as_u64().unwrap() as usize,
            r["class"].as_str().unwrap().len()
        );
    }
}

#[test]
fn malformed_word_is_an_input_error() {
    let o = run(&["norm", "--phi", "a?,b"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("position 1"));
}

#[test]
fn identity_has_empty_complex() {
    let o = run(&["reductive-complex", "--rose", "identity"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "empty complex");
}

#[test]
fn reductive_complex_writes_a_trace() {
    let dir = std::env::temp_dir().join(format!("outerspine-trace-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("trace.json");
    let o = run(&[
        "reductive-complex",
        "--n",
        "3",
        "--phi",
        "Ba,b,ac",
        "--verify",
        "homology",
        "--trace",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("contractible"));
    let trace: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let steps = trace["steps"].as_array().unwrap();
    assert_eq!(steps[0]["justification"]["tag"], "DropNonReductive");
    assert_eq!(steps.last().unwrap()["after"].as_array().unwrap().len(), 1);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn fold_path_dot_has_several_graphs() {
    let o = run(&["fold-path", "--phi", "ab,b", "--emit", "dot"]);
    assert!(o.status.success());
    assert!(stdout(&o).matches("subgraph cluster_").count() >= 2);
}

#[test]
fn outputs_are_byte_stable() {
    let args = [
        "fold-path",
        "--n",
        "3",
        "--phi",
        "ab,cb,c",
        "--seed",
        "5",
        "--emit",
        "json",
    ];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn exhaustive_key_lemma_search_at_rank_two() {
    let o = run(&["key-lemma-search", "--n", "2", "--exhaustive"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains(" 0 violations"));
}

#[test]
fn verify_suites() {
    let o = run(&["verify", "all", "--n", "2", "--samples", "10"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("[PASS]")).count(), 10);
    let o = run(&["verify", "no-such-suite"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn rose_from_json_file() {
    let path = std::env::temp_dir().join(format!("outerspine-rose-{}.json", std::process::id()));
    std::fs::write(&path, r#"{"n": 2, "phi": ["ab", "b"]}"#).unwrap();
    let o = run(&["reduce", "--rose", path.to_str().unwrap(), "--emit", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["steps"].as_array().unwrap().len(), 1);
    std::fs::remove_file(path).ok();
}

#[test]
fn not_an_automorphism_is_rejected() {
    let o = run(&["norm", "--phi", "aa,b"]);
    assert_eq!(o.status.code(), Some(2));
}
