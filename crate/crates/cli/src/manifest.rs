use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "hzeta.manifest/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

/// Everything needed to reproduce and audit one command run. No timestamps,
/// so identical runs serialize to identical bytes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub fixture_hash: String,
    pub outputs: Value,
    pub checks: Vec<CheckRecord>,
}

impl RunManifest {
    pub fn new(command: &str, parameters: BTreeMap<String, Value>, fixture_hash: String) -> RunManifest {
        RunManifest { schema: SCHEMA.into(), command: command.into(), parameters, fixture_hash, outputs: Value::Null, checks: Vec::new() }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(CheckRecord { name: name.into(), passed, detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    /// Key identifying the command and its parameters.
    pub fn key(&self) -> String {
        let params = serde_json::to_string(&self.parameters).expect("parameters serialize");
        hex::encode(Sha256::digest(format!("{}\n{params}", self.command).as_bytes()))
    }

    pub fn store(&self, dir: &Path) -> std::io::Result<PathBuf> {
        let dir = dir.join("manifests");
        std::fs::create_dir_all(&dir)?;
        let path = dir.join(format!("{}.json", &self.key()[..16]));
        std::fs::write(&path, self.to_json())?;
        Ok(path)
    }
}

/// Hash over named fixture texts in name order, each framed like a git blob.
pub fn content_hash<'a>(sources: impl IntoIterator<Item = (&'a str, &'a str)>) -> String {
    let mut sorted: Vec<_> = sources.into_iter().collect();
    sorted.sort();
    let mut h = Sha256::new();
    for (name, text) in sorted {
        h.update(format!("{name}\0blob {}\0", text.len()).as_bytes());
        h.update(text.as_bytes());
    }
    hex::encode(h.finalize())
}

/// Stored manifests in `dir`, in file name order.
pub fn load_all(dir: &Path) -> Result<Vec<RunManifest>, String> {
    let dir = dir.join("manifests");
    let Ok(entries) = std::fs::read_dir(&dir) else {
        return Ok(Vec::new());
    };
    let mut paths: Vec<PathBuf> = entries.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|x| x == "json")).collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let src = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            serde_json::from_str(&src).map_err(|e| format!("{}: {e}", p.display()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_order() {
        let a = content_hash([("x", "1"), ("y", "2")]);
        let b = content_hash([("y", "2"), ("x", "1")]);
        assert_eq!(a, b);
        assert_ne!(a, content_hash([("x", "1"), ("y", "3")]));
    }
}
