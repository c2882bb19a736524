//! A seeded generator of small, syntactically valid Python and Java files,
//! used to build desk-scale corpora for end-to-end runs.

use std::fs;
use std::path::Path;

use anyhow::Result;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unleak_core::Language;
use unleak_sketch::{CorpusManifest, ManifestEntry};

const VERBS: &[&str] = &[
    "compute", "collect", "find", "update", "build", "merge", "count", "filter", "parse", "scan", "load", "check",
    "render", "split", "format", "group", "select", "apply",
];
const PLURALS: &[&str] = &[
    "data", "items", "values", "nums", "rows", "nodes", "words", "lines", "names", "results", "entries", "parts",
    "chars", "keys", "errors",
];
const SINGULARS: &[&str] = &["item", "value", "num", "row", "node", "word", "line", "name", "entry", "part", "key", "elem"];
const SCALARS: &[&str] = &["target", "limit", "size", "start", "level", "step", "length", "threshold"];
const ACCUMULATORS: &[&str] = &["total", "count", "result", "acc", "output", "res", "current"];
const QUALIFIERS: &[&str] = &["max", "min", "first", "last", "new", "old", "prev", "next", "current", "temp"];
const LIBRARIES: &[&str] = &["numpy", "pandas", "sklearn"];

struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    fn pick<'a>(&mut self, xs: &[&'a str]) -> &'a str {
        xs.choose(&mut self.rng).unwrap()
    }

    /// `qualifier_noun` half of the time, so STYL and RENM have work to do.
    fn local(&mut self, nouns: &[&str]) -> String {
        let noun = self.pick(nouns);
        if self.rng.gen_bool(0.5) {
            format!("{}_{noun}", self.pick(QUALIFIERS))
        } else {
            noun.to_string()
        }
    }

    fn distinct(&mut self, nouns: &[&str], taken: &mut Vec<String>) -> String {
        loop {
            let name = self.local(nouns);
            if !taken.contains(&name) {
                taken.push(name.clone());
                return name;
            }
        }
    }

    fn python_function(&mut self, indent: &str, receiver: Option<&str>) -> String {
        let mut taken: Vec<String> = ["i", "self", "len", "range", "str", "sum", "max", "min"].iter().map(|s| s.to_string()).collect();
        let name = format!("{}_{}", self.pick(VERBS), self.pick(PLURALS));
        let list = self.distinct(PLURALS, &mut taken);
        let scalar = self.distinct(SCALARS, &mut taken);
        let acc = self.distinct(ACCUMULATORS, &mut taken);
        let out = self.distinct(&["result", "output", "selected", "found", "seen", "buffer"], &mut taken);
        let elem = self.distinct(SINGULARS, &mut taken);
        let counter = self.distinct(&["count", "counter", "idx", "pos"], &mut taken);
        let params = match receiver {
            Some(r) => format!("{r}, {list}, {scalar}"),
            None => format!("{list}, {scalar}"),
        };
        let mut body: Vec<String> = vec![format!("{acc} = 0"), format!("{out} = []")];
        let k = self.rng.gen_range(2..10);
        let mut blocks: Vec<usize> = (0..7).collect();
        blocks.shuffle(&mut self.rng);
        let n_blocks = self.rng.gen_range(2..5);
        for b in blocks.into_iter().take(n_blocks) {
            let block = match b {
                0 => format!(
                    "for {elem} in {list}:\n    if {elem} > {scalar} and {elem} != {k}:\n        {acc} += {elem}\n    else:\n        {out}.append({elem})"
                ),
                1 => format!("for i in range(len({list})):\n    {out}.append({list}[i] * {k})"),
                2 => format!(
                    "{counter} = 0\nwhile {counter} < len({list}) and {acc} < {scalar} * {k}:\n    {acc} += {list}[{counter}]\n    {counter} += 1"
                ),
                3 => {
                    let word = self.pick(PLURALS);
                    format!(
                        "if {scalar} is None or {scalar} < 0:\n    {out}.append(\"invalid {word}\")\nelif not {list}:\n    {out}.append(\"empty\")\nelse:\n    {out}.append(\"ok\")"
                    )
                }
                4 => format!("if not ({acc} > {k}):\n    {acc} = {acc} + {scalar}\nelse:\n    {acc} = {acc} - 1"),
                5 => format!("for {elem} in {list}:\n    for i in range({k}):\n        if {elem} == i or {elem} == {scalar}:\n            {out}.append(i)"),
                _ => format!("{acc} = {acc} + len({out}) * {k} - {scalar}"),
            };
            body.extend(block.lines().map(str::to_string));
        }
        let ret = if self.rng.gen_bool(0.5) { format!("return {acc}") } else { format!("return {out}, {acc}") };
        body.push(ret);
        let mut text = format!("{indent}def {name}({params}):\n");
        for line in body {
            text.push_str(indent);
            text.push_str("    ");
            text.push_str(&line);
            text.push('\n');
        }
        text
    }

    fn python_class(&mut self) -> String {
        let stem = self.pick(SINGULARS);
        let pascal = format!("{}{}", stem[..1].to_uppercase(), &stem[1..]);
        let field = self.pick(SCALARS);
        let mut text = format!(
            "class {pascal}Base:\n    def __init__(self, {field}):\n        self.{field} = {field}\n\n    def describe(self):\n        return \"{pascal}(\" + str(self.{field}) + \")\"\n\n"
        );
        text.push_str(&self.python_function("    ", Some("self")));
        text.push_str(&format!("\n\nclass {pascal}Store({pascal}Base):\n"));
        text.push_str(&self.python_function("    ", Some("self")));
        text.push('\n');
        text.push_str(&self.python_function("    ", Some("self")));
        text
    }

    fn python_file(&mut self) -> String {
        let mut parts = Vec::new();
        for _ in 0..self.rng.gen_range(2..5) {
            parts.push(self.python_function("", None));
        }
        if self.rng.gen_bool(0.5) {
            parts.push(self.python_class());
        }
        parts.join("\n\n")
    }

    fn java_method(&mut self) -> String {
        let name = format!("{}{}", self.pick(VERBS), {
            let p = self.pick(PLURALS);
            format!("{}{}", p[..1].to_uppercase(), &p[1..])
        });
        let mut taken = vec!["i".to_string()];
        let values = self.distinct(PLURALS, &mut taken).replace('_', "");
        let limit = self.distinct(SCALARS, &mut taken).replace('_', "");
        let total = self.distinct(ACCUMULATORS, &mut taken).replace('_', "");
        let counter = format!("{}Count", self.pick(SINGULARS));
        let k = self.rng.gen_range(2..10);
        let mut body = vec![format!("int {total} = 0;")];
        let mut blocks: Vec<usize> = (0..4).collect();
        blocks.shuffle(&mut self.rng);
        for b in blocks.into_iter().take(self.rng.gen_range(2..4)) {
            let block = match b {
                0 => format!(
                    "for (int i = 0; i < {values}.length; i++) {{\n    if ({values}[i] > {limit} && {total} < 1000) {{\n        {total} += {values}[i];\n    }} else {{\n        {total} -= 1;\n    }}\n}}"
                ),
                1 => format!("int {counter} = 0;\nwhile ({counter} < {limit}) {{\n    {counter}++;\n    {total} += {k};\n}}"),
                2 => format!("if (!({total} > {k})) {{\n    {total} = {total} * 2;\n}} else {{\n    {total} = {total} - {limit};\n}}"),
                _ => format!("for (int j = {limit}; j > 0; j--) {{\n    {total} += j % {k};\n}}"),
            };
            body.extend(block.lines().map(str::to_string));
        }
        body.push(format!("return {total};"));
        let mut text = format!("    public static int {name}(int[] {values}, int {limit}) {{\n");
        for line in body {
            text.push_str("        ");
            text.push_str(&line);
            text.push('\n');
        }
        text.push_str("    }\n");
        text
    }

    fn java_file(&mut self, class: &str) -> String {
        let methods: Vec<String> = (0..self.rng.gen_range(2..4)).map(|_| self.java_method()).collect();
        format!("public class {class} {{\n{}}}\n", methods.join("\n"))
    }
}

/// Generates the source text of one file.
pub fn source_file(language: Language, seed: u64, index: usize) -> String {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)) };
    match language {
        Language::Python => g.python_file(),
        Language::Java => g.java_file(&format!("Module{index}")),
    }
}

/// Writes `files` generated files into `dir` and returns their manifest.
/// Entries carry `library` and `year` metadata for stratification and
/// filtering.
pub fn write_corpus(dir: &Path, language: Language, files: usize, seed: u64) -> Result<CorpusManifest> {
    let ext = match language {
        Language::Python => "py",
        Language::Java => "java",
    };
    let mut entries = Vec::new();
    let mut total = 0u64;
    for i in 0..files {
        let library = LIBRARIES[i % LIBRARIES.len()];
        let rel = match language {
            Language::Python => format!("{library}/module_{i:04}.{ext}"),
            Language::Java => format!("{library}/Module{i}.{ext}"),
        };
        let path = dir.join(&rel);
        fs::create_dir_all(path.parent().unwrap())?;
        let text = source_file(language, seed, i);
        total += text.len() as u64;
        fs::write(&path, text)?;
        let mut metadata = std::collections::BTreeMap::new();
        metadata.insert("library".into(), library.into());
        metadata.insert("year".into(), (2019 + i % 4).to_string());
        entries.push(ManifestEntry { path: rel, language: Some(language.name().into()), metadata });
    }
    let mut manifest = CorpusManifest::new(entries, dir)?;
    manifest.total_bytes = total;
    Ok(manifest)
}
