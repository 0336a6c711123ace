use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_amcdes")).args(args).output().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let report = serde_json::from_str(stdout.trim()).unwrap_or(Value::Null);
    (out.status.code().unwrap(), report)
}

const SELF_LOOP: &str = r#"{"agents":["1","2"],"explicit_moves":{},
  "states":{"w0":{"atoms":["p"],"k":{"1":1,"2":1},"outcome":{"0,0":"w0"},"interp":{}}}}"#;

fn corpus_path() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../amcdes/tests/data/corpus.txt"))
}

#[test]
fn invariant_holds_on_the_self_loop() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("loop.json");
    std::fs::write(&model, SELF_LOOP).unwrap();
    let m = model.to_str().unwrap();
    for engine in ["naive", "game", "onestep"] {
        let (code, r) = run(&["mc", "--model", m, "--formula", "nu x. p & [{1}] x", "--state", "w0", "--engine", engine]);
        assert_eq!(code, 0);
        assert_eq!(r["verdict"], "true");
    }
    let (code, r) = run(&["mc", "--model", m, "--formula", "<{}> !p", "--state", "0"]);
    assert_eq!((code, r["verdict"].as_str()), (1, Some("false")));
}

#[test]
fn contradiction_is_unsat() {
    let (code, r) = run(&["sat", "p & !p"]);
    assert_eq!(code, 1);
    assert_eq!(r["verdict"], "unsat");
    assert!(r["wall_ms"].is_number());
    assert!(r["stats"]["closure"].is_number());
}

#[test]
fn emitted_models_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let p = path.to_str().unwrap();
    let phi = "nu x. !corrupted & [ECC, (Env:{zeroFlips|oneFlip})] x";
    let (code, r) = run(&["--agents", "Cosmic", "sat", phi, "--emit-model", p]);
    assert_eq!(code, 0);
    assert_eq!(r["witness"], p);
    let (code, _) = run(&["mc", "--model", p, "--formula", phi]);
    assert_eq!(code, 0);
}

#[test]
fn open_mode_finds_interpretations() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.json");
    let (_, _) = run(&["--agents", "Printer", "sat", "[Alice, (Bob:{cancelPrint|splitPrint})] printed", "--emit-model", model.to_str().unwrap()]);
    let mut json: Value = serde_json::from_str(&std::fs::read_to_string(&model).unwrap()).unwrap();
    for st in json["states"].as_object_mut().unwrap().values_mut() {
        st.as_object_mut().unwrap().remove("interp");
    }
    std::fs::write(&model, json.to_string()).unwrap();
    let witness = dir.path().join("w.json");
    let args = ["mc", "--model", model.to_str().unwrap(), "--formula", "[Alice, (Bob:{cancelPrint|splitPrint})] printed"];
    let (code, _) = run(&args);
    assert_eq!(code, 2, "fixed mode needs interpretations");
    let mut open = args.to_vec();
    open.extend(["--mode", "open", "--emit-model", witness.to_str().unwrap()]);
    let (code, r) = run(&open);
    assert_eq!(code, 0);
    assert_eq!(r["witness"], witness.to_str().unwrap());
    let (code, _) = run(&["mc", "--model", witness.to_str().unwrap(), "--formula", "[Alice, (Bob:{cancelPrint|splitPrint})] printed"]);
    assert_eq!(code, 0);
}

#[test]
fn onestep_and_resolve_agree() {
    let dir = tempfile::tempdir().unwrap();
    for (text, code) in [
        ("agents 1 2\ncarrier 2\n[{1}] a\n[{2}] b\ntau a 0\ntau b 1\n", 1),
        ("agents 1 2\ncarrier 2\n<{1}> a\n<{2}> b\ntau a 0\ntau b 1\n", 0),
    ] {
        let f = dir.path().join("p.txt");
        std::fs::write(&f, text).unwrap();
        let f = f.to_str().unwrap();
        assert_eq!(run(&["onestep", f]).0, code);
        for mode in ["sr", "lsr", "sr+"] {
            let (c, r) = run(&["resolve", f, "--mode", mode, "--trace"]);
            assert_eq!(c, code, "{mode}");
            if code == 1 {
                assert!(r["detail"]["derivation"].as_array().is_some_and(|d| !d.is_empty()));
            }
        }
    }
}

#[test]
fn parity_games_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("g.gm");
    std::fs::write(&f, "parity 1;\n0 1 0 1;\n1 2 1 0;\n").unwrap();
    let (code, r) = run(&["solve-game", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["detail"]["even"], serde_json::json!([0, 1]));
}

#[test]
fn errors_and_budgets_have_their_own_codes() {
    assert_eq!(run(&["sat", "[x p"]).0, 2);
    assert_eq!(run(&["mc", "--model", "/nonexistent.json", "--formula", "p"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    let out = Command::new(env!("CARGO_BIN_EXE_amcdes"))
        .args(["sat", "nu x. mu y. (p & [{1}] x) | [{1}] y", "--agents", "1,2"])
        .env("AMCDES_BUDGET", "nodes=2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn corpus_runs_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(corpus_path(), dir.path().join("corpus.txt")).unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, r) = run(&["corpus", d]);
    assert_eq!(code, 0);
    assert_eq!(r["stats"]["formulas"], 200);
    assert_eq!(r["stats"]["errors"], 0);
    let verdicts = |r: &Value| r["detail"].as_array().unwrap().iter().map(|e| e["verdict"].clone()).collect::<Vec<_>>();
    let (_, again) = run(&["corpus", d, "--jobs", "1"]);
    assert_eq!(verdicts(&r), verdicts(&again));
}

#[test]
fn engines_agree_on_the_corpus_models() {
    let corpus = amcdes_corpus();
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.json");
    let m = model.to_str().unwrap();
    let mut checked = 0;
    for (agents, formula) in corpus.iter().step_by(5) {
        let (code, _) = run(&["--agents", agents, "sat", formula, "--emit-model", m]);
        if code != 0 {
            continue;
        }
        let naive = run(&["mc", "--model", m, "--formula", formula, "--engine", "naive"]);
        let game = run(&["mc", "--model", m, "--formula", formula, "--engine", "game"]);
        assert_eq!(naive.0, 0, "{formula}");
        assert_eq!(naive.1["detail"]["holds_at"], game.1["detail"]["holds_at"], "{formula}");
        checked += 1;
    }
    assert!(checked > 20);
}

/// `(agents, formula)` pairs of the shipped corpus.
fn amcdes_corpus() -> Vec<(String, String)> {
    let mut agents = String::new();
    let mut out = Vec::new();
    for line in std::fs::read_to_string(corpus_path()).unwrap().lines() {
        let line = line.split('#').next().unwrap().trim();
        if let Some(rest) = line.strip_prefix("agents ") {
            agents = rest.split_whitespace().collect::<Vec<_>>().join(",");
        } else if !line.is_empty() && !line.starts_with("moves ") {
            out.push((agents.clone(), line.to_string()));
        }
    }
    out
}
