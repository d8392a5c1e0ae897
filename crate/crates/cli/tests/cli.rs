use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn mfhg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mfhg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_str(stdout(out).trim()).unwrap()
}

struct Files(TempDir);

impl Files {
    fn new() -> Self {
        Files(tempfile::tempdir().unwrap())
    }

    fn write(&self, name: &str, text: &str) -> String {
        let path: PathBuf = self.0.path().join(name);
        fs::write(&path, text).unwrap();
        path.to_str().unwrap().to_owned()
    }

    fn generate(&self, name: &str, args: &[&str]) -> String {
        let out = mfhg(&[&["generate"], args].concat());
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        self.write(name, &stdout(&out))
    }
}

#[test]
fn check_without_nash_outcome_fails_for_every_partition() {
    let f = Files::new();
    let g = f.generate("g.txt", &["negative-no-nash"]);
    for (i, coalitions) in [
        "[[0],[1],[2],[3]]",
        "[[0,1,2,3]]",
        "[[0,1],[2,3]]",
        "[[0,3],[1,2]]",
        "[[1,2,3],[0]]",
    ]
    .iter()
    .enumerate()
    {
        let p = f.write(
            &format!("p{i}.json"),
            &format!(r#"{{"n":4,"coalitions":{coalitions}}}"#),
        );
        let out = mfhg(&["check", &g, &p, "--kind", "nash"]);
        assert_eq!(out.status.code(), Some(1));
        let v = json(&out);
        assert_eq!(v["stable"], false);
        assert_eq!(v["witness"]["kind"], "unilateral");
    }
}

#[test]
fn check_star_grand_coalition_is_not_two_strong() {
    let f = Files::new();
    let g = f.generate("star.txt", &["star-eps", "--n", "7", "--eps", "1/100"]);
    let out = mfhg(&["check", &g, "grand", "--kind", "kstrong", "--k", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["kind"], "kstrong(2)");
    assert_eq!(v["stable"], false);
    assert_eq!(v["witness"]["agents"], serde_json::json!([0, 1]));
    assert_eq!(v["witness"]["after"], serde_json::json!(["1", "1"]));
}

#[test]
fn check_core_outcome_of_path() {
    let f = Files::new();
    let g = f.generate("cpos.txt", &["cpos-path", "--eps", "1/10"]);
    let p = f.write("p.json", r#"{"n":4,"coalitions":[[0],[1,2],[3]]}"#);
    let out = mfhg(&["check", &g, &p, "--kind", "core"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out).trim(),
        r#"{"kind":"core","stable":true,"witness":null}"#
    );

    let grand = mfhg(&["check", &g, "grand", "--kind", "core"]);
    assert_eq!(grand.status.code(), Some(1));
    assert_eq!(json(&grand)["witness"]["kind"], "blocking-coalition");
}

#[test]
fn check_accepts_full_kind_names_and_relaxed_flag() {
    let f = Files::new();
    let g = f.write("p3.txt", "3 2\n0 1 1\n1 2 1\n");
    let p = f.write("p.json", r#"{"n":3,"coalitions":[[0,1,2]]}"#);
    let strict = mfhg(&["check", &g, &p, "--kind", "kstrong(n)"]);
    assert_eq!(strict.status.code(), Some(0));
    let relaxed = mfhg(&["check", &g, &p, "--kind", "kstrong", "--relaxed"]);
    assert_eq!(relaxed.status.code(), Some(1));
    assert_eq!(json(&relaxed)["kind"], "relaxed-kstrong(n)");
    let strict_core = mfhg(&["check", &g, &p, "--kind", "strict-core"]);
    assert_eq!(strict_core.status.code(), Some(1));
}

#[test]
fn solve_examples() {
    let f = Files::new();
    let cpos = f.generate("cpos.txt", &["cpos-path", "--eps", "1/10"]);
    let out = mfhg(&["solve", &cpos, "--alg", "greedy-core"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["welfare"], "21/10");
    assert_eq!(
        v["structure"]["coalitions"],
        serde_json::json!([[0], [1, 2], [3]])
    );
    assert_eq!(v["verified"], serde_json::json!(["core"]));

    let path = f.generate("path.txt", &["path-unweighted", "--n", "6"]);
    for alg in ["brute", "optimal-basic", "strong-nash"] {
        let out = mfhg(&["solve", &path, "--alg", alg]);
        assert_eq!(out.status.code(), Some(0), "{alg}");
        assert_eq!(json(&out)["welfare"], "6", "{alg}");
    }

    let empty = f.write("empty.txt", "4 0\n");
    let v = json(&mfhg(&["solve", &empty, "--alg", "strong-nash"]));
    assert_eq!(v["welfare"], "0");
    assert_eq!(
        v["structure"]["coalitions"],
        serde_json::json!([[0], [1], [2], [3]])
    );
}

#[test]
fn solve_limits_and_input_errors() {
    let f = Files::new();
    let big = f.generate("big.txt", &["path-unweighted", "--n", "14"]);
    assert_eq!(
        mfhg(&["solve", &big, "--alg", "brute"]).status.code(),
        Some(3)
    );
    assert_eq!(
        mfhg(&["solve", &big, "--alg", "brute", "--max-agents", "14"])
            .status
            .code(),
        Some(0)
    );

    let weighted = f.generate("cpos.txt", &["cpos-path"]);
    assert_eq!(
        mfhg(&["solve", &weighted, "--alg", "optimal-basic"])
            .status
            .code(),
        Some(2)
    );

    let broken = f.write("broken.txt", "3 2\n0 1 1\n");
    assert_eq!(
        mfhg(&["solve", &broken, "--alg", "brute"]).status.code(),
        Some(2)
    );
    assert_eq!(
        mfhg(&["solve", "/nonexistent/graph.txt", "--alg", "brute"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        mfhg(&["solve", &weighted, "--alg", "nope"]).status.code(),
        Some(2)
    );
}

#[test]
fn guard_limit_exit_code() {
    let f = Files::new();
    let g = f.generate("layered.txt", &["layered-clique", "--k", "3"]);
    let solved = json(&mfhg(&["solve", &g, "--alg", "strong-nash"]));
    let p = f.write("p.json", &solved["structure"].to_string());
    assert_eq!(
        mfhg(&["check", &g, &p, "--kind", "kstrong"]).status.code(),
        Some(0)
    );
    let out = mfhg(&["check", &g, &p, "--kind", "kstrong", "--guard-limit", "10"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn dynamics_scripted_cycle() {
    let f = Files::new();
    let g = f.generate("inf.txt", &["infinite-dynamics"]);
    let init = f.write("init.json", r#"{"n":8,"coalitions":[[0,1,2,3,4,5,6],[7]]}"#);
    let out = mfhg(&[
        "dynamics",
        &g,
        &init,
        "--scheduler",
        "scripted",
        "--script",
        "5,0,6,1,2,3,5,0,6,3,2,1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<Value> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 13);
    let last = &lines[12];
    assert_eq!(last["terminal"], "cycle-detected");
    assert_eq!(last["cycle_length"], 12);
    assert_eq!(last["first_repeat_step"], 0);
    assert_eq!(
        last["last"]["coalitions"],
        serde_json::json!([[0, 1, 2, 3, 4, 5, 6], [7]])
    );
    assert_eq!(lines[0]["agent"], 5);
    assert_eq!(lines[0]["step"], 0);
}

#[test]
fn dynamics_explicit_targets_and_bad_moves() {
    let f = Files::new();
    let g = f.write("p3.txt", "3 2\n0 1 1\n1 2 1\n");
    let out = mfhg(&[
        "dynamics",
        &g,
        "singletons",
        "--scheduler",
        "scripted",
        "--script",
        "0:1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<Value> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines[0]["to"], 1);
    assert_eq!(lines[0]["after"], "1");
    assert_eq!(lines[1]["terminal"], "script-exhausted");

    let bad = mfhg(&[
        "dynamics",
        &g,
        "grand",
        "--scheduler",
        "scripted",
        "--script",
        "1:0",
    ]);
    assert_eq!(bad.status.code(), Some(2));
    let garbled = mfhg(&[
        "dynamics",
        &g,
        "grand",
        "--scheduler",
        "scripted",
        "--script",
        "x",
    ]);
    assert_eq!(garbled.status.code(), Some(2));
}

#[test]
fn dynamics_convergence_and_cap() {
    let f = Files::new();
    let g = f.generate("path.txt", &["path-unweighted", "--n", "6"]);
    let out = mfhg(&["dynamics", &g, "grand", "--scheduler", "best-response"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["terminal"], "converged");
    assert_eq!(v["steps"], 0);

    let capped = json(&mfhg(&["dynamics", &g, "singletons", "--max-steps", "0"]));
    assert_eq!(capped["terminal"], "step-cap-reached");

    let a = mfhg(&[
        "dynamics",
        &g,
        "singletons",
        "--scheduler",
        "random",
        "--seed",
        "9",
    ]);
    let b = mfhg(&[
        "dynamics",
        &g,
        "singletons",
        "--scheduler",
        "random",
        "--seed",
        "9",
    ]);
    assert_eq!(a.stdout, b.stdout);
    let terminal: Value = serde_json::from_str(stdout(&a).lines().last().unwrap()).unwrap();
    assert_eq!(terminal["terminal"], "converged");
}

#[test]
fn generate_examples() {
    let star = stdout(&mfhg(&[
        "generate", "star-eps", "--n", "7", "--eps", "1/100",
    ]));
    assert!(star.starts_with("7 6\n"));
    assert_eq!(star.lines().count(), 7);
    assert!(star.contains("0 6 1/100\n"));

    let inf = stdout(&mfhg(&["generate", "infinite-dynamics"]));
    assert!(inf.starts_with("8 7\n"));

    let a = mfhg(&[
        "generate",
        "random-er",
        "--n",
        "9",
        "--seed",
        "4",
        "--weights",
        "1,-2,1/3",
    ]);
    let b = mfhg(&[
        "generate",
        "random_er",
        "--n",
        "9",
        "--seed",
        "4",
        "--weights",
        "1,-2,1/3",
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    assert_eq!(
        mfhg(&["generate", "random-er", "--n", "9"]).status.code(),
        Some(2)
    );
    assert_eq!(mfhg(&["generate", "nothing"]).status.code(), Some(2));
}

#[test]
fn suite_passes_and_fails_on_expectations() {
    let f = Files::new();
    let good = f.write(
        "good.json",
        r#"[
  {"family": "path_unweighted", "params": {"n": 6}, "kinds": ["nash"], "expect": {"poa_eq": "3", "exists": true}},
  {"family": "star_eps", "params": {"n": 5, "eps": "1/100"}, "kinds": ["kstrong(2)"], "expect": {"exists": false}},
  {"family": "random_er", "params": {"n": 5, "seed": 1, "p": 0.6}, "kinds": ["core"], "instances": 3, "expect": {"poa_max": "2", "exists": true}}
]"#,
    );
    let one = mfhg(&["suite", "--config", &good]);
    assert_eq!(
        one.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&one.stderr)
    );
    let v = json(&one);
    assert_eq!(v["summary"]["total"], 5);
    assert_eq!(v["summary"]["failed"], 0);
    let two = mfhg(&["suite", "--config", &good, "--jobs", "2"]);
    assert_eq!(one.stdout, two.stdout);

    let bad = f.write(
        "bad.json",
        r#"[{"family": "path_unweighted", "params": {"n": 4}, "kinds": ["nash"], "expect": {"poa_eq": "3"}}]"#,
    );
    let out = mfhg(&["suite", "--config", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["summary"]["failed"], 1);

    let malformed = f.write(
        "malformed.json",
        r#"[{"family": "path_unweighted", "kinds": ["nash"], "extra": 1}]"#,
    );
    assert_eq!(
        mfhg(&["suite", "--config", &malformed]).status.code(),
        Some(2)
    );
}

#[test]
fn bundled_suite_holds() {
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/../../suites/bounds.json");
    let out = mfhg(&["suite", "--config", config, "--jobs", "2"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(json(&out)["summary"]["failed"], 0);
}
