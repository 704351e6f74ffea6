//! Run manifests written next to every output.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

#[derive(Debug, Clone, Serialize)]
pub struct OutputDigest {
    /// Path relative to the manifest's directory.
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub seed: u64,
    /// Command-line inputs not covered by `config`.
    pub inputs: Value,
    pub started_utc: String,
    pub finished_utc: String,
    pub outputs: Vec<OutputDigest>,
    pub results: Value,
}

pub fn sha256_file(path: &Path) -> io::Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

fn stamp(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Collects what a command did; `write` hashes the outputs and stores the
/// manifest.
pub struct ManifestBuilder {
    command: &'static str,
    config: RunConfig,
    seed: u64,
    inputs: Value,
    started: DateTime<Utc>,
    outputs: Vec<PathBuf>,
    results: Value,
}

impl ManifestBuilder {
    pub fn start(command: &'static str, config: RunConfig, seed: u64) -> Self {
        Self {
            command,
            config,
            seed,
            inputs: Value::Object(Default::default()),
            started: Utc::now(),
            outputs: Vec::new(),
            results: Value::Object(Default::default()),
        }
    }

    pub fn inputs(mut self, inputs: Value) -> Self {
        self.inputs = inputs;
        self
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    pub fn results(&mut self, results: Value) {
        self.results = results;
    }

    pub fn write(self, manifest_path: &Path) -> io::Result<RunManifest> {
        let base = manifest_path.parent().unwrap_or(Path::new(""));
        let mut outputs = Vec::with_capacity(self.outputs.len());
        for p in &self.outputs {
            let file = p
                .strip_prefix(base)
                .unwrap_or(p)
                .to_string_lossy()
                .into_owned();
            outputs.push(OutputDigest {
                file,
                bytes: fs::metadata(p)?.len(),
                sha256: sha256_file(p)?,
            });
        }
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: self.command.to_string(),
            config: self.config,
            seed: self.seed,
            inputs: self.inputs,
            started_utc: stamp(self.started),
            finished_utc: stamp(Utc::now()),
            outputs,
            results: self.results,
        };
        let text = serde_json::to_string_pretty(&manifest).map_err(io::Error::other)?;
        fs::write(manifest_path, text + "\n")?;
        Ok(manifest)
    }
}

/// `dir/name.csv` → `dir/name.manifest.json`.
pub fn manifest_path_for(output: &Path) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    output.with_file_name(format!("{stem}.manifest.json"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_known_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("abc.txt");
        fs::write(&p, "abc").unwrap();
        assert_eq!(
            sha256_file(&p).unwrap(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn manifest_sits_next_to_output() {
        assert_eq!(
            manifest_path_for(Path::new("out/pair.csv")),
            Path::new("out/pair.manifest.json")
        );
    }

    #[test]
    fn outputs_are_listed_relative() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("data.csv");
        fs::write(&out, "x\n").unwrap();
        let mut b = ManifestBuilder::start("test", RunConfig::default(), 7);
        b.output(&out);
        let m = b.write(&dir.path().join("manifest.json")).unwrap();
        assert_eq!(m.outputs[0].file, "data.csv");
        assert_eq!(m.outputs[0].bytes, 2);
        assert_eq!(m.seed, 7);
    }
}
