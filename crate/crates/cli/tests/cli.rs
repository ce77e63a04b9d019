use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use expgraph::kb::dumpgen::{write_dump, DumpSpec};
use tempfile::TempDir;

fn expgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expgraph"))
        .args(args)
        .output()
        .expect("run expgraph")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn core_fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn checksum(out: &str) -> String {
    out.lines()
        .find_map(|l| l.strip_prefix("checksum "))
        .expect("checksum line")
        .trim()
        .to_string()
}

/// A small synthetic dump ingested into `dir/kb.idx`.
fn small_index(dir: &Path) -> PathBuf {
    let dump = dir.join("dump.csv");
    let spec = DumpSpec {
        concepts: 3000,
        assertions: 30_000,
        ..DumpSpec::default()
    };
    write_dump(&spec, &mut fs::File::create(&dump).unwrap()).unwrap();
    let idx = dir.join("kb.idx");
    let o = expgraph(&["ingest", s(&dump), "-o", s(&idx)]);
    assert!(o.status.success(), "{}", stderr(&o));
    idx
}

#[test]
fn ingest_reports_and_checksum_is_stable() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("kb.idx");
    let dump = core_fixture("dump_100.csv");
    let first = expgraph(&["ingest", s(&dump), "-o", s(&out)]);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let text = stdout(&first);
    assert!(text.contains("lines read          100"));
    assert!(text.contains("relatedTo dropped   12"));
    assert!(text.contains("duplicates          5"));
    let second = expgraph(&["ingest", s(&dump), "-o", s(&out)]);
    assert_eq!(checksum(&text), checksum(&stdout(&second)));
}

#[test]
fn ingest_missing_dump_exits_2_without_output() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("kb.idx");
    let o = expgraph(&["ingest", s(&dir.path().join("nope.csv")), "-o", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error:"));
    assert!(!out.exists());
}

#[test]
fn corpus_is_balanced_and_reproducible() {
    let dir = TempDir::new().unwrap();
    let idx = small_index(dir.path());
    let run = |name: &str, workers: &str| {
        let out = dir.path().join(name);
        let o = expgraph(&[
            "corpus", "--index", s(&idx), "-o", s(&out), "--total", "300", "--seed", "5", "--workers", workers,
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        (stdout(&o), fs::read(&out).unwrap())
    };
    let (report, a) = run("a.txt", "1");
    for line in ["records   300", "easy      100", "normal    100", "hard      100"] {
        assert!(report.contains(line), "{report}");
    }
    assert_eq!(String::from_utf8(a.clone()).unwrap().lines().count(), 300);
    let (_, b) = run("b.txt", "1");
    let (_, c) = run("c.txt", "4");
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn corpus_jsonl_lines_parse() {
    let dir = TempDir::new().unwrap();
    let idx = small_index(dir.path());
    let out = dir.path().join("c.jsonl");
    let o = expgraph(&["corpus", "--index", s(&idx), "-o", s(&out), "--total", "9", "--format", "jsonl"]);
    assert!(o.status.success(), "{}", stderr(&o));
    for line in fs::read_to_string(&out).unwrap().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["input"].as_str().unwrap().contains(" [SEP] "));
    }
}

#[test]
fn starved_index_exits_3_without_output() {
    let dir = TempDir::new().unwrap();
    let dump = dir.path().join("tiny.csv");
    let line = |r: &str, h: &str, t: &str| {
        format!("/a/[/r/{r}/,/c/en/{h}/,/c/en/{t}/]\t/r/{r}\t/c/en/{h}\t/c/en/{t}\t{{}}\n")
    };
    fs::write(
        &dump,
        [line("Causes", "rain", "wet_road"), line("Causes", "wet_road", "car_crash"), line("IsA", "ice", "water")].concat(),
    )
    .unwrap();
    let idx = dir.path().join("kb.idx");
    let o = expgraph(&["ingest", s(&dump), "-o", s(&idx)]);
    assert!(o.status.success());
    let out = dir.path().join("c.txt");
    let o = expgraph(&["corpus", "--index", s(&idx), "-o", s(&out), "--total", "30"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn unknown_config_key_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "totl = 5\n").unwrap();
    let out = dir.path().join("c.txt");
    let o = expgraph(&["corpus", "--config", s(&cfg), "--index", "x.idx", "-o", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("totl"));
}

const GRAPH_OK: &str = "(compulsory voting; causes; inefficient vote)(inefficient vote; created by; uninformed people)(uninformed people; not used for; good societal implementation)";
const BELIEF: &str = "Compulsory voting is not a good societal implementation.";
const ARGUMENT: &str = "Compulsory voting would allow too many uninformed people the ability to vote.";

fn write_sources(dir: &Path, ids: &[&str]) -> PathBuf {
    let p = dir.join("sources.tsv");
    let body: String = ids.iter().map(|id| format!("{id}\t{BELIEF}\t{ARGUMENT}\n")).collect();
    fs::write(&p, body).unwrap();
    p
}

fn relations() -> PathBuf {
    core_fixture("downstream_relations.txt")
}

#[test]
fn validate_counts_structurally_correct_graphs() {
    let dir = TempDir::new().unwrap();
    let graphs = dir.path().join("graphs.tsv");
    let cyclic = format!("{GRAPH_OK}(good societal implementation; causes; compulsory voting)");
    let foreign = GRAPH_OK.replace("created by", "related to");
    fs::write(&graphs, format!("a\t{GRAPH_OK}\nb\t{cyclic}\nc\t{GRAPH_OK}\nd\t{foreign}\n")).unwrap();
    let sources = write_sources(dir.path(), &["a", "b", "c", "d"]);
    let o = expgraph(&["validate", s(&graphs), "--sources", s(&sources), "--relations", s(&relations())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.trim_end().ends_with("StCA 50.00"), "{out}");
    let rows: Vec<serde_json::Value> = out.lines().take(4).map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows[1]["checks"]["connected_dag"], false);
    assert_eq!(rows[3]["checks"]["relation_vocabulary"], false);
}

#[test]
fn validate_rejects_empty_and_malformed_input() {
    let dir = TempDir::new().unwrap();
    let sources = write_sources(dir.path(), &["a", "b"]);
    let empty = dir.path().join("empty.tsv");
    fs::write(&empty, "").unwrap();
    let o = expgraph(&["validate", s(&empty), "--sources", s(&sources)]);
    assert_eq!(o.status.code(), Some(2));

    let bad = dir.path().join("bad.tsv");
    fs::write(&bad, format!("a\t{GRAPH_OK}\nb\t(broken; causes\n")).unwrap();
    let o = expgraph(&["validate", s(&bad), "--sources", s(&sources)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.tsv:2"), "{}", stderr(&o));
}

fn eval_table(dir: &Path, pred: &str, stance: &str) -> Output {
    let gold = dir.join("gold.tsv");
    fs::write(&gold, format!("a\t{GRAPH_OK}\n")).unwrap();
    let pred_path = dir.join("pred.tsv");
    fs::write(&pred_path, format!("a\t{pred}\n")).unwrap();
    let stance_path = dir.join("stance.txt");
    fs::write(&stance_path, format!("a {stance}\n")).unwrap();
    let sources = write_sources(dir, &["a"]);
    let out = dir.join("scores.jsonl");
    expgraph(&[
        "eval", "--pred", s(&pred_path), "--gold", s(&gold), "--stance", s(&stance_path), "--sources", s(&sources),
        "--relations", s(&relations()), "--out", s(&out),
    ])
}

fn metric(table: &str, name: &str) -> String {
    let mut lines = table.lines();
    let header: Vec<&str> = lines.next().unwrap().split_whitespace().collect();
    let values: Vec<&str> = lines.next().unwrap().split_whitespace().collect();
    let col = header
        .iter()
        .position(|h| *h == name)
        .unwrap_or_else(|| panic!("{name} missing from\n{table}"));
    values[col].to_string()
}

#[test]
fn eval_identity_scores_perfectly() {
    let dir = TempDir::new().unwrap();
    let o = eval_table(dir.path(), GRAPH_OK, "true");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = stdout(&o);
    assert_eq!(metric(&t, "StCA"), "100.00");
    assert_eq!(metric(&t, "G-BS"), "100.00");
    assert_eq!(metric(&t, "GED"), "0.0000");
    assert_eq!(metric(&t, "SeCA"), "external");
    assert!(dir.path().join("scores.jsonl").exists());
}

#[test]
fn eval_wrong_stance_floors_every_metric() {
    let dir = TempDir::new().unwrap();
    let o = eval_table(dir.path(), GRAPH_OK, "false");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = stdout(&o);
    assert_eq!(metric(&t, "StCA"), "0.00");
    assert_eq!(metric(&t, "G-BS"), "0.00");
    assert_eq!(metric(&t, "GED"), "1.0000");
}

#[test]
fn eval_hand_scored_relation_swap() {
    // One relation relabelled: GED 1 / (4 + 3 + 4 + 3); exact-match G-BS 2/3.
    let dir = TempDir::new().unwrap();
    let pred = GRAPH_OK.replace("not used for", "not capable of");
    let o = eval_table(dir.path(), &pred, "1");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = stdout(&o);
    assert_eq!(metric(&t, "GED"), format!("{:.4}", 1.0 / 14.0));
    let scores = fs::read_to_string(dir.path().join("scores.jsonl")).unwrap();
    let row: serde_json::Value = serde_json::from_str(scores.lines().next().unwrap()).unwrap();
    assert_eq!(row["ged_raw"], 1);
    assert_eq!(row["stca"], true);
}

#[test]
fn stats_prints_distribution_and_deltas() {
    let dir = TempDir::new().unwrap();
    let corpus = dir.path().join("c.txt");
    fs::write(
        &corpus,
        "0\teasy\tin\ta : causes : b | b : isa : c | c : usedfor : d\t1\n",
    )
    .unwrap();
    let o = expgraph(&["stats", s(&corpus), "--builtin-reference"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = stdout(&o);
    assert_eq!(t.matches("33.33").count(), 3, "{t}");
    assert!(t.contains("max |delta|"));
    assert!(t.contains("+"));
}

#[test]
fn baseline_corpus_alternates_tasks() {
    let dir = TempDir::new().unwrap();
    let idx = small_index(dir.path());
    let out = dir.path().join("b.txt");
    let o = expgraph(&["baseline-corpus", "--index", s(&idx), "-o", s(&out), "--total", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].contains("predict relation: "));
    assert!(lines[1].contains("predict tail: "));
}
