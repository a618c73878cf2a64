//! Run manifests and the file sink that feeds them.
//!
//! Every file a command writes goes through [`Sink`], which records its
//! SHA-256. The manifest lives in `manifest.txt` at the sink root and is
//! rewritten once, after all stages finished.

use crate::config::digest_hex;
use crate::error::LabResult;
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

/// File name of the manifest.
pub const MANIFEST: &str = "manifest.txt";

/// Status of one stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageRecord {
    /// Hash of the inputs the stage ran with.
    pub hash: String,
    /// `ok` or `failed`.
    pub status: String,
}

/// Inventory of an output directory.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RunManifest {
    /// Tool version that wrote it.
    pub version: String,
    /// Hash of the most recent config.
    pub config_hash: String,
    /// Stages by name.
    pub stages: BTreeMap<String, StageRecord>,
    /// Relative path to `(stage, sha256)`.
    pub files: BTreeMap<String, (String, String)>,
}

impl RunManifest {
    /// Reads `dir/manifest.txt`; missing or unreadable manifests are empty.
    pub fn load(dir: &Path) -> Self {
        let Ok(text) = fs::read_to_string(dir.join(MANIFEST)) else {
            return Self::default();
        };
        let mut m = Self::default();
        for line in text.lines() {
            let Some((k, v)) = line.split_once(" = ") else { continue };
            if k == "version" {
                m.version = v.to_string();
            } else if k == "config_hash" {
                m.config_hash = v.to_string();
            } else if let Some(rest) = k.strip_prefix("stage.") {
                if let Some((name, field)) = rest.rsplit_once('.') {
                    let e = m.stages.entry(name.to_string()).or_insert(StageRecord { hash: String::new(), status: String::new() });
                    match field {
                        "hash" => e.hash = v.to_string(),
                        "status" => e.status = v.to_string(),
                        _ => {}
                    }
                }
            } else if let Some(path) = k.strip_prefix("file.") {
                if let Some((stage, sum)) = v.split_once(' ') {
                    m.files.insert(path.to_string(), (stage.to_string(), sum.to_string()));
                }
            }
        }
        m
    }

    /// Canonical text.
    pub fn to_text(&self) -> String {
        let mut s = format!("version = {}\nconfig_hash = {}\n", self.version, self.config_hash);
        for (name, r) in &self.stages {
            s += &format!("stage.{name}.hash = {}\nstage.{name}.status = {}\n", r.hash, r.status);
        }
        for (path, (stage, sum)) in &self.files {
            s += &format!("file.{path} = {stage} {sum}\n");
        }
        s
    }

    /// True when `stage` ran successfully with `hash` and its files are
    /// still present with matching checksums.
    pub fn is_current(&self, dir: &Path, stage: &str, hash: &str) -> bool {
        let Some(r) = self.stages.get(stage) else { return false };
        if r.hash != hash || r.status != "ok" {
            return false;
        }
        self.files
            .iter()
            .filter(|(_, (s, _))| s == stage)
            .all(|(p, (_, sum))| fs::read(dir.join(p)).map(|b| digest_hex(&b) == *sum).unwrap_or(false))
    }
}

/// Collects output files of one stage under a root directory.
#[derive(Debug)]
pub struct Sink {
    root: PathBuf,
    stage: String,
    written: Vec<(String, String)>,
}

impl Sink {
    /// Sink for `stage` rooted at `root` (created if missing).
    pub fn new(root: &Path, stage: &str) -> LabResult<Self> {
        fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf(), stage: stage.to_string(), written: Vec::new() })
    }

    /// Root directory.
    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Writes raw bytes to `rel`.
    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> LabResult<PathBuf> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, bytes)?;
        self.written.push((rel.to_string(), digest_hex(bytes)));
        Ok(path)
    }

    /// Writes a CSV with `header` and numeric or text `rows`.
    pub fn csv<R: AsRef<[String]>>(&mut self, rel: &str, header: &[&str], rows: &[R]) -> LabResult<PathBuf> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            w.write_record(r.as_ref())?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        self.write(rel, &bytes)
    }

    /// Records the stage and its files in the root manifest.
    pub fn commit(self, hash: &str, ok: bool) -> LabResult<()> {
        let mut m = RunManifest::load(&self.root);
        m.version = env!("CARGO_PKG_VERSION").to_string();
        m.config_hash = hash.to_string();
        m.files.retain(|_, (s, _)| *s != self.stage);
        for (p, sum) in self.written {
            m.files.insert(p, (self.stage.clone(), sum));
        }
        m.stages.insert(self.stage, StageRecord { hash: hash.to_string(), status: if ok { "ok" } else { "failed" }.to_string() });
        fs::write(self.root.join(MANIFEST), m.to_text())?;
        Ok(())
    }
}

/// Formats a float for CSV output with full round-trip precision.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_tracks_files_and_detects_tampering() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = Sink::new(dir.path(), "demo").unwrap();
        s.csv("a.csv", &["x"], &[vec!["1".to_string()]]).unwrap();
        s.commit("h1", true).unwrap();
        let m = RunManifest::load(dir.path());
        assert_eq!(RunManifest::load(dir.path()).to_text(), m.to_text());
        assert!(m.is_current(dir.path(), "demo", "h1"));
        assert!(!m.is_current(dir.path(), "demo", "h2"));
        fs::write(dir.path().join("a.csv"), "x\n2\n").unwrap();
        assert!(!m.is_current(dir.path(), "demo", "h1"));
    }
}
