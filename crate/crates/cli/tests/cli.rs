//! The `unleak` binary end to end: artifact layout, exit codes and error
//! reporting.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use unleak::synth::write_corpus;
use unleak_core::Language;
use unleak_metrics::{write_traces, LogProbTrace};

fn unleak(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unleak")).args(args).current_dir(cwd).output().unwrap()
}

fn ok(args: &[&str], cwd: &Path) -> String {
    let out = unleak(args, cwd);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn corpus(dir: &Path, language: Language, files: usize) {
    let manifest = write_corpus(&dir.join("corpus"), language, files, 1).unwrap();
    manifest.save(dir.join("corpus").join("manifest.json")).unwrap();
}

#[test]
fn python_pipeline_writes_the_artifact_tree() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    corpus(d, Language::Python, 30);
    ok(&["build-sketch", "--manifest", "corpus/manifest.json", "--out", "c.ngsk", "--fp", "1e-4"], d);
    ok(&["sample", "--manifest", "corpus/manifest.json", "--n", "12", "--seed", "2", "--out", "units.jsonl"], d);
    assert_eq!(fs::read_to_string(d.join("units.jsonl")).unwrap().lines().count(), 12);

    ok(&["refactor", "--units", "units.jsonl", "--chain", "IFF", "--chain", "ALL", "--out", "out"], d);
    let unit_dirs: Vec<_> = fs::read_dir(d.join("out")).unwrap().map(|e| e.unwrap().path()).filter(|p| p.is_dir()).collect();
    assert_eq!(unit_dirs.len(), 12);
    for unit in &unit_dirs {
        assert!(unit.join("original/code.txt").exists());
        for chain in ["NORM+IFF", "ALL"] {
            assert!(unit.join(chain).join("code.txt").exists(), "{}", unit.display());
            let outcome: serde_json::Value = serde_json::from_str(&fs::read_to_string(unit.join(chain).join("outcome.json")).unwrap()).unwrap();
            assert_eq!(outcome["operators"][0], "NORM");
        }
    }

    ok(&["overlap", "--artifacts", "out", "--sketch", "c.ngsk"], d);

    // One trace per (unit, variant) for a single model.
    let units: Vec<String> = fs::read_to_string(d.join("units.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["id"].as_str().unwrap().to_string())
        .collect();
    let mut traces = Vec::new();
    for (i, unit) in units.iter().enumerate() {
        for (j, variant) in ["original", "NORM+IFF", "ALL"].iter().enumerate() {
            let lp = -0.5 - 0.1 * (i + j) as f64;
            traces.push(LogProbTrace::new("tiny", unit.clone(), *variant, vec![lp, lp * 2.0, lp / 2.0]));
        }
    }
    let mut file = fs::File::create(d.join("traces.jsonl")).unwrap();
    write_traces(&mut file, &traces).unwrap();
    drop(file);
    ok(&["metrics", "--artifacts", "out", "--traces", "traces.jsonl", "--k", "50"], d);
    let table = fs::read_to_string(d.join("out/metrics_table.csv")).unwrap();
    let header = table.lines().next().unwrap();
    assert_eq!(header, "operator,tiny ppl_delta,tiny min50%_delta");
    assert!(table.lines().any(|l| l.starts_with("Average,")));

    ok(&["report", "--artifacts", "out", "--out", "report.csv", "--out", "report.json"], d);
    let csv = fs::read_to_string(d.join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 12 * 3);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["environment"]["seed"], 0);
    assert!(report["environment"]["sketch_digest"].as_str().is_some_and(|s| !s.is_empty()));
}

#[test]
fn unsupported_java_operators_give_partial_failure() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    corpus(d, Language::Java, 10);
    ok(&["sample", "--manifest", "corpus/manifest.json", "--n", "5", "--language", "java", "--out", "units.jsonl"], d);
    let out = unleak(&["refactor", "--units", "units.jsonl", "--chain", "ALL", "--chain", "STYL", "--out", "out"], d);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    for unit in fs::read_dir(d.join("out")).unwrap().map(|e| e.unwrap().path()).filter(|p| p.is_dir()) {
        assert!(unit.join("ALL/code.txt").exists());
        assert!(!unit.join("NORM+STYL/code.txt").exists());
        let outcome = fs::read_to_string(unit.join("NORM+STYL/outcome.json")).unwrap();
        assert!(outcome.contains("\"failed\""), "{outcome}");
    }
}

#[test]
fn sampling_more_than_the_population_is_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    corpus(d, Language::Python, 3);
    let out = unleak(&["sample", "--manifest", "corpus/manifest.json", "--n", "384", "--out", "units.jsonl"], d);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("population"), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!d.join("units.jsonl").exists());
}

#[test]
fn bad_inputs_are_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(unleak(&["overlap", "--artifacts", "missing", "--sketch", "missing.ngsk"], d).status.code(), Some(1));
    assert_eq!(unleak(&["refactor", "--units", "missing.jsonl", "--chain", "ALL"], d).status.code(), Some(1));
    fs::write(d.join("units.jsonl"), "").unwrap();
    assert_eq!(unleak(&["refactor", "--units", "units.jsonl", "--chain", "BOGUS"], d).status.code(), Some(1));
}
