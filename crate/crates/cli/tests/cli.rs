use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        let ws = Workspace { dir: tempfile::tempdir().unwrap() };
        ws.write("c3.dg", "0 -> 1\n1 -> 2\n2 -> 0\n");
        ws.write("c6.dg", &(0..6).map(|i| format!("{i} -> {}\n", (i + 1) % 6)).collect::<String>());
        ws.write("c6_c3.txt", &(0..6).map(|i| format!("{i} -> {}\n", i % 3)).collect::<String>());
        ws.write("empty.dg", "# nothing here\n");
        ws.write("p1.dg", "0 -> 1\n");
        ws.write("p2.dg", "0 -> 1\n1 -> 2\n");
        ws
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn path(&self) -> &Path {
        self.dir.path()
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_dihom")).args(args).current_dir(self.path()).output().unwrap()
    }

    fn json(&self, args: &[&str]) -> (i32, Value, String) {
        let out = self.run(args);
        let text = String::from_utf8(out.stdout).unwrap();
        let v = serde_json::from_str(&text).unwrap_or_else(|e| {
            panic!("{args:?}: {e}\nstdout: {text}\nstderr: {}", String::from_utf8_lossy(&out.stderr))
        });
        (out.status.code().unwrap(), v, text)
    }
}

fn usizes(v: &Value) -> Vec<usize> {
    v.as_array().unwrap().iter().map(|x| x.as_u64().unwrap() as usize).collect()
}

#[test]
fn triangle_path_homology() {
    let ws = Workspace::new();
    let (code, v, _) = ws.json(&["ph", "c3.dg", "--ring", "q", "--max-degree", "2"]);
    assert_eq!(code, 0);
    assert_eq!(usizes(&v["ranks"]), [1, 1, 0]);
    assert_eq!(v["ring"], "Q");
}

#[test]
fn integral_path_homology_reports_free_ranks() {
    let ws = Workspace::new();
    let (_, v, _) = ws.json(&["ph", "c3.dg", "--ring", "z", "--max-degree", "1"]);
    assert_eq!(usizes(&v["ranks"]), [1, 1]);
    assert_eq!(v["homology"][1]["torsion"], serde_json::json!([]));
}

#[test]
fn cover_check_verdicts() {
    let ws = Workspace::new();
    let (code, v, _) = ws.json(&["cover", "check", "--level", "3", "c3.dg", "c6.dg", "c6_c3.txt"]);
    assert_eq!(code, 1);
    assert_eq!(v["holds"], false);
    assert_eq!(v["counterexample"]["kind"], "several_partners");
    let (code, v, _) = ws.json(&["cover", "check", "--level", "2", "c3.dg", "c6.dg", "c6_c3.txt"]);
    assert_eq!(code, 0);
    assert_eq!(v["holds"], true);
    assert!(v["counterexample"].is_null());
}

#[test]
fn magnitude_of_empty_digraph_is_zero() {
    let ws = Workspace::new();
    let (code, v, _) = ws.json(&["magnitude", "empty.dg", "--l", "2"]);
    assert_eq!(code, 0);
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 6);
    assert!(entries.iter().all(|e| e["rank"] == 0));
}

#[test]
fn deck_group_and_lifts() {
    let ws = Workspace::new();
    let (_, v, _) = ws.json(&["cover", "deck", "c3.dg", "c6.dg", "c6_c3.txt"]);
    assert_eq!(v["order"], 2);
    assert_eq!(v["elements"][1]["0"], "3");
    let (_, v, _) = ws.json(&["cover", "lift", "c3.dg", "c6.dg", "c6_c3.txt", "--path", "0 1 2 0", "--start", "3"]);
    assert_eq!(v["lift"], serde_json::json!(["3", "4", "5", "0"]));
}

#[test]
fn deck_of_a_non_cover_is_a_false_verdict() {
    let ws = Workspace::new();
    let (code, v, _) = ws.json(&["cover", "deck", "--level", "3", "c3.dg", "c6.dg", "c6_c3.txt"]);
    assert_eq!(code, 1);
    assert_eq!(v["holds"], false);
}

#[test]
fn built_cover_checks_as_a_cover() {
    let ws = Workspace::new();
    ws.write(
        "twist.txt",
        "fiber 0: a b\nfiber 1: a b\nfiber 2: a b\narrow 0 1: a->a, b->b\narrow 1 2: a->a, b->b\narrow 2 0: a->b, b->a\n",
    );
    let (code, v, _) = ws.json(&["cover", "build", "c3.dg", "twist.txt"]);
    assert_eq!(code, 0);
    assert_eq!(v["validated_level"], 2);
    let out = ws.run(&["cover", "build", "c3.dg", "twist.txt", "--format", "text"]);
    ws.write("total.dg", &String::from_utf8(out.stdout).unwrap());
    let map: String =
        v["projection"].as_object().unwrap().iter().map(|(e, x)| format!("{e} -> {}\n", x.as_str().unwrap())).collect();
    ws.write("proj.txt", &map);
    let (code, _, _) = ws.json(&["cover", "check", "c3.dg", "total.dg", "proj.txt"]);
    assert_eq!(code, 0);
    let (_, deck, _) = ws.json(&["cover", "deck", "c3.dg", "total.dg", "proj.txt"]);
    assert_eq!(deck["order"], 2);
}

#[test]
fn fundamental_group_presentations() {
    let ws = Workspace::new();
    let (_, v, _) = ws.json(&["pi1", "c3.dg", "--level", "2"]);
    assert_eq!(v["abelianization"]["free_rank"], 1);
    assert_eq!(v["presentation"]["relators"], serde_json::json!([]));
    let (_, v, _) = ws.json(&["pi1", "c3.dg", "--level", "3", "--basepoint", "1"]);
    assert_eq!(v["abelianization"]["free_rank"], 0);
    assert_eq!(v["basepoint"], "1");
    let out = ws.run(&["pi1", "c3.dg", "--format", "text"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("gens: a="));
}

#[test]
fn cayley_commands() {
    let ws = Workspace::new();
    let (_, v, _) = ws.json(&["cayley", "build", "--group", "Z/4", "--gens", "1"]);
    assert_eq!(v["digraph"]["vertices"].as_array().unwrap().len(), 4);
    let (_, v, _) = ws.json(&["cayley", "build", "--group", "Z", "--gens", "1", "--radius", "2"]);
    assert_eq!(v["digraph"]["vertices"].as_array().unwrap().len(), 5);
    let (_, v, _) = ws.json(&["cayley", "relations", "--group", "Z", "--gens", "1;3", "--level", "2"]);
    assert_eq!(v["relations"].as_array().unwrap().len(), 1);
    let (_, v, _) = ws.json(&["cayley", "presentation", "--group", "Z^2", "--gens", "(1,0);(0,1)", "--level", "2"]);
    assert_eq!(v["abelianization"]["free_rank"], 2);
    assert_eq!(v["rho_kernel"]["rank"], 0);
    let (_, v, _) = ws.json(&["cayley", "ph", "--group", "Z^2", "--gens", "(1,0);(0,1)", "--max-degree", "2"]);
    assert_eq!(usizes(&v["ranks"]), [1, 0, 0]);
    assert_eq!(v["hypotheses"]["holds"], true);
}

#[test]
fn cayley_ph_refuses_when_hypotheses_fail() {
    let ws = Workspace::new();
    let out = ws.run(&["cayley", "ph", "--group", "Z", "--gens", "1;2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hypotheses"));
}

#[test]
fn box_product_of_triangles() {
    let ws = Workspace::new();
    let (_, v, _) = ws.json(&["boxprod", "c3.dg", "c3.dg"]);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 9);
    assert_eq!(v["arrows"].as_array().unwrap().len(), 18);
}

#[test]
fn exhaustion_of_paths() {
    let ws = Workspace::new();
    let (code, v, _) = ws.json(&["exhaust", "p1.dg", "p2.dg", "--max-degree", "1"]);
    assert_eq!(code, 0);
    assert_eq!(usizes(&v["stabilized"]), [1, 0]);
    let (code, v, _) = ws.json(&["exhaust", "p1.dg", "p2.dg", "--invariant", "mh", "--l", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["invariant"]["kind"], "mh");
    let out = ws.run(&["exhaust", "p2.dg", "c3.dg"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn input_errors_exit_with_two() {
    let ws = Workspace::new();
    ws.write("loop.dg", "a -> a\n");
    for args in [
        &["ph", "missing.dg"][..],
        &["ph", "loop.dg"],
        &["ph", "c3.dg", "--ring", "fp:4"],
        &["ph", "c3.dg", "--max-degree", "7"],
        &["pi1", "c3.dg", "--level", "4"],
        &["pi1", "c3.dg", "--basepoint", "nowhere"],
        &["mpss", "c3.dg", "--ring", "z"],
        &["cayley", "relations", "--group", "Z", "--gens", "1", "--level", "5"],
        &["cayley", "build", "--group", "Z", "--gens", "1"],
        &["cover", "check", "c3.dg", "c6.dg", "c3.dg"],
        &["frobnicate"],
    ] {
        assert_eq!(ws.run(args).status.code(), Some(2), "{args:?}");
    }
}

const REPORTS: &[&[&str]] = &[
    &["ph", "c3.dg", "--clusters"],
    &["magnitude", "c6.dg", "--l", "3"],
    &["magnitude", "c3.dg", "--ring", "z"],
    &["mpss", "c3.dg", "--r", "2"],
    &["pi1", "c6.dg", "--level", "3"],
    &["cover", "check", "c3.dg", "c6.dg", "c6_c3.txt"],
    &["cover", "deck", "c3.dg", "c6.dg", "c6_c3.txt"],
    &["cayley", "relations", "--group", "Z^2 + Z/2", "--gens", "(1,0,0);(0,1,1)", "--level", "3"],
    &["cayley", "presentation", "--group", "Z/6", "--gens", "1;2", "--level", "2"],
    &["boxprod", "c3.dg", "p2.dg"],
    &["exhaust", "p1.dg", "p2.dg"],
];

#[test]
fn json_reports_round_trip() {
    let ws = Workspace::new();
    for args in REPORTS {
        let (_, v, text) = ws.json(args);
        let again = serde_json::to_string_pretty(&v).unwrap() + "\n";
        assert_eq!(again, text, "{args:?}");
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let ws = Workspace::new();
    for args in REPORTS {
        let first = ws.run(args).stdout;
        let second = ws.run(args).stdout;
        assert_eq!(first, second, "{args:?}");
        let text_args = [*args, &["--format", "text"][..]].concat();
        assert_eq!(ws.run(&text_args).stdout, ws.run(&text_args).stdout, "{args:?}");
    }
}

#[test]
fn output_flag_writes_the_report() {
    let ws = Workspace::new();
    let target = ws.path().join("out.json");
    let out = ws.run(&["ph", "c3.dg", "-o", target.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(usizes(&v["ranks"]), [1, 1, 0, 0]);
}

#[test]
fn logging_goes_to_stderr() {
    let ws = Workspace::new();
    let out = ws.run(&["ph", "c3.dg", "-v"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("3 vertices"));
    let quiet = ws.run(&["ph", "c3.dg"]);
    assert!(quiet.stderr.is_empty());
    assert_eq!(out.stdout, quiet.stdout);
}
