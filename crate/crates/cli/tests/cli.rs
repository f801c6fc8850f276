use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rooted-grid"))
        .args(args)
        .env_remove("SEED")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Grid {
    _dir: TempDir,
    graph: PathBuf,
    model: PathBuf,
    dir: PathBuf,
}

fn grid(n: u32) -> Grid {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("grid.json");
    let model = dir.path().join("model.json");
    let o = run(&[
        "gen-grid",
        "--n",
        &n.to_string(),
        "--out",
        s(&graph),
        "--model-out",
        s(&model),
    ]);
    assert_eq!(code(&o), 0);
    Grid {
        dir: dir.path().to_path_buf(),
        _dir: dir,
        graph,
        model,
    }
}

#[test]
fn identity_extract_validates() {
    let g = grid(8);
    let out = g.dir.join("result.json");
    let o = run(&[
        "extract",
        "--graph",
        s(&g.graph),
        "--roots",
        "1",
        "--model",
        s(&g.model),
        "--g",
        "2",
        "--k",
        "1",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(g.dir.join("result.json.trace.jsonl").exists());
    let v = run(&[
        "validate-model",
        "--graph",
        s(&g.graph),
        "--model",
        s(&out),
        "--strict-model",
    ]);
    assert_eq!(code(&v), 0);
    assert_eq!(json_out(&v)["valid"], Value::Bool(true));
}

#[test]
fn broken_branch_overlap_is_reported() {
    let g = grid(3);
    let mut model: Value = serde_json::from_str(&fs::read_to_string(&g.model).unwrap()).unwrap();
    model["branches"][1]["vertices"] = serde_json::json!([1]);
    let broken = g.dir.join("broken.json");
    fs::write(&broken, model.to_string()).unwrap();
    let o = run(&[
        "validate-model",
        "--graph",
        s(&g.graph),
        "--model",
        s(&broken),
    ]);
    assert_eq!(code(&o), 1);
    let rules: Vec<String> = json_out(&o)["violations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["rule"].as_str().unwrap().to_string())
        .collect();
    assert!(rules.contains(&"branches-overlap".to_string()), "{rules:?}");
}

#[test]
fn malformed_inputs_exit_64() {
    let g = grid(3);
    let junk = g.dir.join("junk.json");
    fs::write(&junk, "{ not json").unwrap();
    assert_eq!(
        code(&run(&[
            "validate-model",
            "--graph",
            s(&junk),
            "--model",
            s(&g.model)
        ])),
        64
    );
    assert_eq!(
        code(&run(&[
            "validate-model",
            "--graph",
            s(&g.graph),
            "--model",
            "/nonexistent"
        ])),
        64
    );
    assert_eq!(code(&run(&["gen-grid", "--n", "0"])), 64);
    assert_eq!(code(&run(&["no-such-command"])), 64);
    let o = run(&[
        "extract",
        "--graph",
        s(&g.graph),
        "--roots",
        "1",
        "--model",
        s(&g.model),
        "--g",
        "2",
        "--k",
        "1",
    ]);
    assert_eq!(code(&o), 64);
    let diag: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(diag["error"], "malformed-input");
}

#[test]
fn detached_roots_exit_2_with_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let o = run(&[
        "gen-instance",
        "--kind",
        "detached-roots",
        "--n",
        "8",
        "--g",
        "2",
        "--k",
        "1",
        "--seed",
        "3",
        "--out",
        s(&inst),
    ]);
    assert_eq!(code(&o), 0);
    let o = run(&["extract", "--instance", s(&inst), "--g", "2", "--k", "1"]);
    assert_eq!(code(&o), 2);
    let v = json_out(&o);
    assert_eq!(v["status"], "violated");
    let sep = &v["certificate"]["separation"];
    let a: Vec<u64> = serde_json::from_value(sep["A"]["vertices"].clone()).unwrap();
    let b: Vec<u64> = serde_json::from_value(sep["B"]["vertices"].clone()).unwrap();
    assert!(a.iter().all(|x| !b.contains(x)));
    let o = run(&[
        "find-separation",
        "--instance",
        s(&inst),
        "--max-order",
        "1",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(json_out(&o)["kind"], "strict");
}

#[test]
fn find_separation_reports_none() {
    let g = grid(8);
    let o = run(&[
        "find-separation",
        "--graph",
        s(&g.graph),
        "--roots",
        "1",
        "--model",
        s(&g.model),
        "--max-order",
        "1",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(json_out(&o), Value::String("none".into()));
}

#[test]
fn menger_paths_and_cut() {
    let g = grid(3);
    let o = run(&[
        "menger",
        "--graph",
        s(&g.graph),
        "--sources",
        "1,4,7",
        "--targets",
        "3,6,9",
        "--k",
        "3",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(json_out(&o)["paths"].as_array().unwrap().len(), 3);
    let o = run(&[
        "menger",
        "--graph",
        s(&g.graph),
        "--sources",
        "1",
        "--targets",
        "9",
        "--k",
        "3",
    ]);
    // terminals are cuttable: the lone source is the minimum cut
    assert_eq!(json_out(&o)["cut"]["separator"], serde_json::json!([1]));
    let o = run(&[
        "menger",
        "--graph",
        s(&g.graph),
        "--sources",
        "1,2,4",
        "--targets",
        "9",
        "--k",
        "2",
        "--forbidden",
        "5",
    ]);
    assert_eq!(json_out(&o)["cut"]["separator"], serde_json::json!([9]));
}

#[test]
fn tangle_checks_on_g3() {
    let g = grid(3);
    let o = run(&[
        "check-tangle",
        "--graph",
        s(&g.graph),
        "--order",
        "3",
        "--grid-model",
        s(&g.model),
    ]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    assert_eq!(v["separations"], 124);
    assert_eq!(v["members"], 62);
    let o = run(&["check-tangle", "--graph", s(&g.graph), "--order", "3"]);
    assert_eq!(json_out(&o)["tangles"], 1);
    let o = run(&[
        "oracle",
        "separations",
        "--graph",
        s(&g.graph),
        "--max-order",
        "2",
    ]);
    assert_eq!(json_out(&o)["count"], 124);
    let o = run(&["oracle", "tangles", "--graph", s(&g.graph), "--order", "3"]);
    assert_eq!(json_out(&o)["count"], 1);
    let o = run(&[
        "oracle",
        "grid-model",
        "--graph",
        s(&g.graph),
        "--side",
        "2",
    ]);
    assert_eq!(code(&o), 0);
    assert!(json_out(&o)["branches"].is_array());
}

#[test]
fn row_property_on_5x5() {
    let g = grid(5);
    let out = g.dir.join("r.json");
    let o = run(&[
        "extract",
        "--graph",
        s(&g.graph),
        "--roots",
        "1",
        "--model",
        s(&g.model),
        "--g",
        "2",
        "--k",
        "1",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0);
    let o = run(&[
        "oracle",
        "row-property",
        "--graph",
        s(&g.graph),
        "--model",
        s(&g.model),
        "--result",
        s(&out),
        "--max-vertices",
        "25",
    ]);
    assert_eq!(code(&o), 0);
    let o = run(&[
        "oracle",
        "row-property",
        "--graph",
        s(&g.graph),
        "--model",
        s(&g.model),
        "--result",
        s(&out),
    ]);
    assert_eq!(code(&o), 64);
}

#[test]
fn seed_comes_from_environment_unless_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let gen = |seed_env: &str, extra: &[&str], name: &str| {
        let path = dir.path().join(name);
        let mut args = vec![
            "gen-instance",
            "--kind",
            "grid-plus-roots",
            "--n",
            "13",
            "--g",
            "2",
            "--k",
            "2",
            "--degree",
            "3",
        ];
        args.extend(extra);
        args.extend(["--out", s(&path)]);
        let o = Command::new(env!("CARGO_BIN_EXE_rooted-grid"))
            .args(&args)
            .env("SEED", seed_env)
            .output()
            .unwrap();
        assert_eq!(code(&o), 0);
        fs::read_to_string(path).unwrap()
    };
    let a = gen("7", &[], "a.json");
    let b = gen("1", &["--seed", "7"], "b.json");
    let c = gen("1", &[], "c.json");
    assert_eq!(a, b);
    assert_ne!(a, c);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["graph"]["vertices"].as_array().unwrap().len(), 171);
    assert_eq!(v["recipe"]["seed"], 7);
}

#[test]
fn recipe_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let recipe = dir.path().join("recipe.json");
    fs::write(&recipe, r#"{"kind":"identity-grid","n":8,"g":2,"k":1}"#).unwrap();
    let o = run(&["gen-instance", "--recipe", s(&recipe)]);
    assert_eq!(code(&o), 0);
    assert_eq!(json_out(&o)["roots"], serde_json::json!([1]));
    fs::write(&recipe, r#"{"kind":"identity-grid","n":8,"g":2,"k":3}"#).unwrap();
    assert_eq!(code(&run(&["gen-instance", "--recipe", s(&recipe)])), 64);
}
