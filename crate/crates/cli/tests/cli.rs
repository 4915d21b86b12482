use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn dlsat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dlsat"))
        .args(args)
        .env("NO_COLOR", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn verdict_line(o: &Output) -> String {
    stdout(o)
        .lines()
        .find(|l| l.starts_with("verdict:"))
        .unwrap_or_default()
        .to_string()
}

#[test]
fn sat_contradiction_exits_one() {
    let d = TempDir::new().unwrap();
    let c = file(&d, "ex.cpt", "A & !A\n");
    for engine in ["tableau", "sat", "bruteforce"] {
        let o = dlsat(&["sat", s(&c), "--engine", engine]);
        assert_eq!(o.status.code(), Some(1), "{engine}");
        assert_eq!(verdict_line(&o), "verdict: unsatisfiable");
    }
}

#[test]
fn sat_with_tbox_prints_loop_model() {
    let d = TempDir::new().unwrap();
    let c = file(&d, "c.cpt", "A");
    let kb = file(&d, "kb.kb", "gci A <= some R. A\n");
    let o = dlsat(&["sat", s(&c), "--tbox", s(&kb), "--model"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("verdict: satisfiable"));
    assert!(out.contains("model: 1 element(s)"));
    assert!(out.contains("R = {(0, 0)}"));
    assert!(!out.contains('\x1b'));
}

#[test]
fn sat_engine_rejects_tbox() {
    let d = TempDir::new().unwrap();
    let c = file(&d, "c.cpt", "A");
    let kb = file(&d, "kb.kb", "gci A <= B\n");
    let o = dlsat(&["sat", s(&c), "--engine", "sat", "--tbox", s(&kb)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("without a TBox"));
}

#[test]
fn sat_json_and_nnf_of_input() {
    let d = TempDir::new().unwrap();
    let c = file(&d, "c.cpt", "!(some r. A | only r. B)");
    let o = dlsat(&["sat", s(&c), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["verdict"], "satisfiable");
    assert_eq!(v["engine"], "tableau");
    assert!(v["stats"]["or_branch_points"].is_u64());
}

#[test]
fn parse_and_cycle_errors_exit_two() {
    let d = TempDir::new().unwrap();
    let bad = file(&d, "bad.cpt", "A & (B");
    let o = dlsat(&["sat", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("syntax-error"));

    let c = file(&d, "c.cpt", "A");
    let cyc = file(&d, "cyc.kb", "def A = B\ndef B = A\n");
    let o = dlsat(&["analyze", s(&c), "--tbox", s(&cyc)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cyclic-definition"));

    let o = dlsat(&["sat", s(&d.path().join("missing.cpt"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn analyze_examples() {
    let d = TempDir::new().unwrap();
    let c = file(&d, "c.cpt", "some r. A & only r. B");
    let out = stdout(&dlsat(&["analyze", s(&c)]));
    for line in ["union_count=0", "full_existential_count=1", "fragment=ALE"] {
        assert!(out.lines().any(|l| l == line), "{line} missing in\n{out}");
    }

    let a = file(&d, "a.cpt", "A");
    let kb = file(&d, "imp.kb", "def A = some R. B\ngci top <= A\n");
    let out = stdout(&dlsat(&["analyze", s(&a), "--tbox", s(&kb)]));
    assert!(out.lines().any(|l| l == "impacted_size=4"));

    let u = file(&d, "u.cpt", "A | B");
    let o = dlsat(&["analyze", s(&u), "--json"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["fragment"], "ALU");
    assert_eq!(v["regime.full_existentials"], "para-NP-c");
}

#[test]
fn reduce_examples() {
    let d = TempDir::new().unwrap();
    let out = d.path().join("red.kb");
    let one = file(&d, "one.kb", "gci C1 <= D1\n");
    let o = dlsat(&["reduce", s(&one), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "fresh: Fresh");
    assert_eq!(
        fs::read_to_string(&out).unwrap(),
        "def Fresh = !C1 | D1\ngci top <= Fresh\n"
    );

    let empty = file(&d, "empty.kb", "# nothing\n");
    let o = dlsat(&["reduce", s(&empty)]);
    assert_eq!(stdout(&o), "def Fresh = top\ngci top <= Fresh\n");

    let two = file(&d, "two.kb", "gci B <= C\ngci C <= B\n");
    let o = dlsat(&["reduce", s(&two)]);
    assert_eq!(
        stdout(&o),
        "def Fresh = (!B | C) & (!C | B)\ngci top <= Fresh\n"
    );

    let defs = file(&d, "defs.kb", "def A = B\n");
    assert_eq!(dlsat(&["reduce", s(&defs)]).status.code(), Some(2));
}

#[test]
fn encode_examples() {
    let d = TempDir::new().unwrap();
    let c = file(&d, "c.cpt", "A & !A");
    let o = dlsat(&["encode", s(&c)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("p cnf 2 3"));

    let bot = file(&d, "bot.cpt", "bot");
    let out = d.path().join("bot.cnf");
    dlsat(&["encode", s(&bot), "--out", s(&out)]);
    assert_eq!(fs::read_to_string(&out).unwrap(), "p cnf 0 1\n0\n");

    let kb = file(&d, "kb.kb", "gci A <= B\n");
    assert_eq!(
        dlsat(&["encode", s(&c), "--tbox", s(&kb)]).status.code(),
        Some(2)
    );
}

#[test]
fn gen_hits_targets_and_is_deterministic() {
    let d = TempDir::new().unwrap();
    let prefix = d.path().join("inst");
    let args = [
        "gen",
        "--seed",
        "1",
        "--unions",
        "2",
        "--existentials",
        "1",
        "--gcis",
        "1",
        "--defs",
        "2",
        "--out",
        s(&prefix),
    ];
    assert_eq!(dlsat(&args).status.code(), Some(0));
    let cpt = prefix.with_extension("cpt");
    let kb = prefix.with_extension("kb");
    let first = (fs::read(&cpt).unwrap(), fs::read(&kb).unwrap());
    dlsat(&args);
    assert_eq!(first, (fs::read(&cpt).unwrap(), fs::read(&kb).unwrap()));

    let o = dlsat(&["analyze", s(&cpt), "--tbox", s(&kb), "--json"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(
        (
            v["union_count"].as_u64(),
            v["full_existential_count"].as_u64()
        ),
        (Some(2), Some(1))
    );
    assert_eq!(v["gci_count"], 1);

    let al = d.path().join("al");
    dlsat(&["gen", "--seed", "5", "--out", s(&al)]);
    let o = dlsat(&["analyze", s(&al.with_extension("cpt"))]);
    assert!(stdout(&o).lines().any(|l| l == "fragment=AL"));
    assert!(!al.with_extension("kb").exists());
}

#[test]
fn gen_rejects_infeasible_and_out_of_range() {
    assert_eq!(
        dlsat(&["gen", "--existentials", "1", "--max-depth", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(dlsat(&["gen", "--atoms", "9"]).status.code(), Some(2));
    assert_eq!(dlsat(&["gen", "--max-depth", "7"]).status.code(), Some(2));
}

fn unsat_corpus() -> TempDir {
    let d = TempDir::new().unwrap();
    for i in 0..10 {
        file(&d, &format!("u{i:02}.cpt"), &format!("A{i} & !A{i}"));
    }
    d
}

fn records(text: &str) -> Vec<serde_json::Value> {
    text.lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn bench_trivially_unsat_corpus() {
    let d = unsat_corpus();
    let out = d.path().join("runs.jsonl");
    let o = dlsat(&[
        "bench",
        s(d.path()),
        "--engines",
        "tableau,bruteforce",
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let recs = records(&fs::read_to_string(&out).unwrap());
    assert_eq!(recs.len(), 20);
    assert!(recs.iter().all(|r| r["verdict"] == "unsatisfiable"));
    assert_eq!(recs[0]["id"], "u00");
    assert_eq!(recs[0]["engine"], "tableau");
    assert_eq!(recs[1]["engine"], "bruteforce");
    let keys: Vec<&str> = recs[0]
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    assert!(
        keys.contains(&"wall_ms") && keys.contains(&"union_count") && keys.contains(&"rule_bot")
    );
}

#[test]
fn bench_reports_injected_disagreement() {
    let d = unsat_corpus();
    let o = dlsat(&["bench", s(d.path()), "--flip-verdict", "u03"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("u03"));
    assert_eq!(records(&stdout(&o)).len(), 20);
}

#[test]
fn bench_empty_corpus() {
    let d = TempDir::new().unwrap();
    let o = dlsat(&["bench", s(d.path())]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
}

#[test]
fn bench_mixed_corpus_agrees_across_engines() {
    let d = TempDir::new().unwrap();
    file(&d, "loop.cpt", "A");
    file(&d, "loop.kb", "gci A <= some R. A\n");
    file(&d, "alc.cpt", "(A | B) & only r. !A & some r. (A | C)");
    file(&d, "clash.cpt", "some r. A & only r. !A");
    let o = dlsat(&["bench", s(d.path()), "--engines", "tableau,sat,bruteforce"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let recs = records(&stdout(&o));
    // sat skips the instance with a TBox
    assert_eq!(recs.len(), 8);
    let verdict = |id: &str| recs.iter().find(|r| r["id"] == id).unwrap()["verdict"].clone();
    assert_eq!(verdict("loop"), "satisfiable");
    assert_eq!(verdict("alc"), "satisfiable");
    assert_eq!(verdict("clash"), "unsatisfiable");
}
