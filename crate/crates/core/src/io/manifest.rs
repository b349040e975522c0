use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One hidden-state dump listed in a manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub id: String,
    pub matrix_path: PathBuf,
    /// Input sequence length in tokens.
    pub length: usize,
    #[serde(default)]
    pub logprobs_path: Option<PathBuf>,
}

/// A dataset of hidden-state dumps for one model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleManifest {
    #[serde(rename = "model")]
    pub model_label: String,
    #[serde(rename = "dataset")]
    pub dataset_label: String,
    pub samples: Vec<Sample>,
}

impl SampleManifest {
    /// Reads a manifest and resolves relative sample paths against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut manifest = Self::parse(path, &text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for s in &mut manifest.samples {
            s.matrix_path = base.join(&s.matrix_path);
            if let Some(lp) = &mut s.logprobs_path {
                *lp = base.join(&*lp);
            }
        }
        Ok(manifest)
    }

    /// Parses and validates manifest JSON without touching sample paths.
    pub fn parse(path: &Path, text: &str) -> Result<Self> {
        let invalid = |message: String| Error::Manifest {
            path: path.to_path_buf(),
            message,
        };
        let manifest: SampleManifest =
            serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
        let mut seen = HashSet::new();
        for s in &manifest.samples {
            if !seen.insert(s.id.as_str()) {
                return Err(invalid(format!("duplicate sample id '{}'", s.id)));
            }
            if s.length == 0 {
                return Err(invalid(format!("sample '{}' has length 0", s.id)));
            }
        }
        Ok(manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{"model": "m", "dataset": "d", "samples": [
        {"id": "a", "matrix_path": "a.npy", "length": 3, "logprobs_path": null},
        {"id": "b", "matrix_path": "b.npy", "length": 4, "logprobs_path": "b_lp.npy"}]}"#;

    #[test]
    fn parses_fields() {
        let m = SampleManifest::parse(Path::new("m.json"), GOOD).unwrap();
        assert_eq!(m.model_label, "m");
        assert_eq!(m.samples[1].logprobs_path.as_deref(), Some(Path::new("b_lp.npy")));
    }

    #[test]
    fn rejects_duplicates_and_zero_length() {
        let dup = GOOD.replace("\"id\": \"b\"", "\"id\": \"a\"");
        let err = SampleManifest::parse(Path::new("m.json"), &dup).unwrap_err();
        assert!(err.to_string().contains("duplicate sample id 'a'"));
        let zero = GOOD.replace("\"length\": 3", "\"length\": 0");
        assert!(SampleManifest::parse(Path::new("m.json"), &zero).is_err());
    }

    #[test]
    fn resolves_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        std::fs::write(&path, GOOD).unwrap();
        let m = SampleManifest::load(&path).unwrap();
        assert_eq!(m.samples[0].matrix_path, dir.path().join("a.npy"));
        assert_eq!(m.samples[1].logprobs_path, Some(dir.path().join("b_lp.npy")));
    }
}
