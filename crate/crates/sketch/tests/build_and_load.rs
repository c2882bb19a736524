use std::fs;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unleak_sketch::{build, BuildOptions, CorpusManifest, ManifestEntry, Mode, NgramSketch, SketchError};

fn random_source(rng: &mut ChaCha8Rng) -> String {
    let words = ["def", "return", "self", "value", "for", "in", "range", "(", ")", ":", "=", "+", "if", "x", "y", "data"];
    let mut out = String::new();
    for line in 0..rng.gen_range(3..30) {
        out.push_str(&"    ".repeat(line % 3));
        for _ in 0..rng.gen_range(2..10) {
            out.push_str(words[rng.gen_range(0..words.len())]);
            out.push(' ');
        }
        out.push('\n');
    }
    out
}

fn corpus(dir: &std::path::Path, files: usize, seed: u64) -> CorpusManifest {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    for i in 0..files {
        let name = format!("f{i:03}.py");
        fs::write(dir.join(&name), random_source(&mut rng)).unwrap();
        entries.push(ManifestEntry { path: name, language: Some("python".into()), metadata: Default::default() });
    }
    CorpusManifest::new(entries, dir).unwrap()
}

#[test]
fn sharded_build_matches_single_pass() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = corpus(dir.path(), 100, 7);
    for mode in [Mode::Filter, Mode::Exact] {
        let single = BuildOptions { gram_width: 12, target_fp: 1e-5, mode, threads: 1 };
        let (a, ra) = build(&manifest, &single).unwrap();
        for threads in [2, 3, 8] {
            let (b, rb) = build(&manifest, &BuildOptions { threads, ..single.clone() }).unwrap();
            assert_eq!(a.to_bytes(), b.to_bytes(), "{mode:?} with {threads} threads");
            assert_eq!(ra, rb);
        }
    }
}

#[test]
fn unreadable_files_are_skipped_and_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let mut manifest = corpus(dir.path(), 3, 1);
    manifest.entries.push(ManifestEntry { path: "missing.py".into(), language: None, metadata: Default::default() });
    let (sketch, report) = build(&manifest, &BuildOptions { gram_width: 8, ..Default::default() }).unwrap();
    assert_eq!(report.files_read, 3);
    assert_eq!(report.skipped.len(), 1);
    assert_eq!(report.skipped[0].path, "missing.py");
    assert!(sketch.inserted_grams() > 0);
}

#[test]
fn manifest_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let mut manifest = corpus(dir.path(), 4, 2);
    manifest.total_bytes = 99;
    let path = dir.path().join("manifest.json");
    manifest.save(&path).unwrap();
    let back = CorpusManifest::load(&path).unwrap();
    assert_eq!(back, manifest);
}

#[test]
fn save_load_and_mmap_answer_identically() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = corpus(dir.path(), 20, 3);
    let texts: Vec<String> = manifest.entries.iter().map(|e| manifest.read(e).unwrap()).collect();
    for mode in [Mode::Filter, Mode::Exact] {
        let (sketch, _) = build(&manifest, &BuildOptions { gram_width: 10, target_fp: 1e-4, mode, threads: 2 }).unwrap();
        let path = dir.path().join(format!("{mode:?}.ngsk"));
        sketch.save(&path).unwrap();
        let loaded = NgramSketch::load(&path).unwrap();
        let mapped = NgramSketch::load_mmap(&path).unwrap();
        assert_eq!(mapped.is_mapped(), !sketch.is_exact());
        assert_eq!(loaded, sketch);
        assert_eq!(mapped, sketch);
        for text in &texts {
            assert_eq!(unleak_sketch::overlap(text, &mapped), unleak_sketch::overlap(text, &sketch));
        }
        let probe = "x".repeat(10);
        assert_eq!(mapped.contains(&probe).unwrap(), sketch.contains(&probe).unwrap());
    }
}

#[test]
fn corrupted_files_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut sketch = NgramSketch::exact(4).unwrap();
    sketch.insert_text("abcdefgh");
    let path = dir.path().join("s.ngsk");
    sketch.save(&path).unwrap();
    let mut bytes = fs::read(&path).unwrap();
    let last = bytes.len() - 6;
    bytes[last] ^= 1;
    fs::write(&path, &bytes).unwrap();
    assert!(matches!(NgramSketch::load_mmap(&path), Err(SketchError::Checksum { .. })));
    fs::write(&path, &bytes[..10]).unwrap();
    assert!(NgramSketch::load(&path).is_err());
}
