//! Corpus manifest: the list of documents a sketch or sample is built from.
//!
//! JSON shape: `{"entries": [{"path": "...", "language": "python",
//! "metadata": {"library": "numpy"}}], "total_bytes": 123}`. Relative paths
//! resolve against the manifest's directory.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::sketch::{Result, SketchError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub entries: Vec<ManifestEntry>,
    #[serde(default)]
    pub total_bytes: u64,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl CorpusManifest {
    pub fn new(entries: Vec<ManifestEntry>, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let manifest = CorpusManifest {
            entries,
            total_bytes: 0,
            base_dir: base_dir.into(),
        };
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn from_json(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut manifest: CorpusManifest =
            serde_json::from_str(text).map_err(|e| SketchError::Manifest(e.to_string()))?;
        manifest.base_dir = base_dir.into();
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_json(&text, base)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for entry in &self.entries {
            if !seen.insert(entry.path.as_str()) {
                return Err(SketchError::Manifest(format!("duplicate path `{}`", entry.path)));
            }
        }
        Ok(())
    }

    /// Filesystem location of an entry.
    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        let p = Path::new(&entry.path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn read(&self, entry: &ManifestEntry) -> std::io::Result<String> {
        std::fs::read_to_string(self.resolve(entry))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects_duplicates() {
        let m = CorpusManifest::from_json(
            r#"{"entries":[{"path":"a.py","language":"python","metadata":{"year":"2021"}},{"path":"/abs/b.java"}]}"#,
            "/base",
        )
        .unwrap();
        assert_eq!(m.resolve(&m.entries[0]), PathBuf::from("/base/a.py"));
        assert_eq!(m.resolve(&m.entries[1]), PathBuf::from("/abs/b.java"));
        assert_eq!(m.entries[0].metadata["year"], "2021");
        let dup = r#"{"entries":[{"path":"a"},{"path":"a"}]}"#;
        assert!(matches!(CorpusManifest::from_json(dup, "."), Err(SketchError::Manifest(_))));
    }
}
