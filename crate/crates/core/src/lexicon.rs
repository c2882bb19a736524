//! Synonym lexicon for identifier renaming.
//!
//! The text format is one entry per line: `word<TAB>syn1,syn2,...`. Blank
//! lines and lines starting with `#` are ignored. Words and synonyms must be
//! lowercase identifier words (`[a-z][a-z0-9]*`).

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

const DEFAULT_TABLE: &str = include_str!("../data/synonyms.tsv");

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, Vec<String>>,
}

fn is_word(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
}

impl Lexicon {
    /// The built-in table of common identifier words.
    pub fn default_english() -> Self {
        Self::parse(DEFAULT_TABLE).expect("built-in lexicon is well formed")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: &str| Error::Lexicon {
                line: i + 1,
                reason: reason.to_string(),
            };
            let (word, rest) = line.split_once('\t').ok_or_else(|| bad("missing tab"))?;
            let word = word.trim();
            if !is_word(word) {
                return Err(bad(&format!("`{word}` is not a lowercase identifier word")));
            }
            let synonyms: Vec<String> = rest
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect();
            if synonyms.is_empty() {
                return Err(bad("no synonyms"));
            }
            if let Some(s) = synonyms.iter().find(|s| !is_word(s)) {
                return Err(bad(&format!("`{s}` is not a lowercase identifier word")));
            }
            entries
                .entry(word.to_string())
                .or_insert_with(Vec::new)
                .extend(synonyms.into_iter().filter(|s| s != word));
        }
        Ok(Lexicon { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn synonyms(&self, word: &str) -> &[String] {
        self.entries.get(word).map_or(&[], Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_table_loads() {
        let lex = Lexicon::default_english();
        assert!(lex.len() > 50);
        assert!(lex.synonyms("new").contains(&"advanced".to_string()));
        assert!(lex.synonyms("zzz").is_empty());
    }

    #[test]
    fn comments_blank_lines_and_errors() {
        let lex = Lexicon::parse("# c\n\nnew\tadvanced, fresh\n").unwrap();
        assert_eq!(lex.synonyms("new"), ["advanced", "fresh"]);
        let err = Lexicon::parse("ok\tfine\nbroken line\n").unwrap_err();
        assert!(matches!(err, Error::Lexicon { line: 2, .. }));
        assert!(Lexicon::parse("Bad\tx\n").is_err());
        assert!(Lexicon::parse("word\t\n").is_err());
    }
}
