//! Run manifests.
//!
//! Every command writes a `<command>.manifest.json` next to its outputs
//! recording the exact resolved configuration, the seed, and a content
//! digest of each input file. The manifest carries no timestamps, so a
//! rerun over identical inputs produces a byte-identical manifest, and any
//! artifact can be traced back to exactly what produced it.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use polsum_core::nn::sha256_file;
use serde::Serialize;

use crate::config::PipelineConfig;

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub seed: u64,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
    pub config: PipelineConfig,
}

impl RunManifest {
    pub fn new(command: &str, config: &PipelineConfig) -> Self {
        Self {
            command: command.to_string(),
            seed: config.seed,
            inputs: Vec::new(),
            outputs: Vec::new(),
            config: config.clone(),
        }
    }

    /// Records one input file with its content digest.
    pub fn add_input(&mut self, path: &Path) -> anyhow::Result<()> {
        let sha256 = sha256_file(path)
            .with_context(|| format!("hashing input {}", path.display()))?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256,
        });
        Ok(())
    }

    /// Records every regular file under `dir` (sorted, one level deep) as an
    /// input. Used for checkpoint directories.
    pub fn add_input_dir(&mut self, dir: &Path) -> anyhow::Result<()> {
        let mut files: Vec<PathBuf> = fs::read_dir(dir)
            .with_context(|| format!("listing {}", dir.display()))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        files.sort();
        for file in files {
            self.add_input(&file)?;
        }
        Ok(())
    }

    pub fn add_output(&mut self, name: &str) {
        self.outputs.push(name.to_string());
    }

    /// Writes `<command>.manifest.json` into `out_dir` and returns its path.
    pub fn write(&self, out_dir: &Path) -> anyhow::Result<PathBuf> {
        let path = out_dir.join(format!("{}.manifest.json", self.command));
        let mut json = serde_json::to_string_pretty(self).context("encoding run manifest")?;
        json.push('\n');
        fs::write(&path, json)
            .with_context(|| format!("writing manifest {}", path.display()))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_is_reproducible_and_names_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("corpus.jsonl");
        fs::write(&input, b"{}\n").unwrap();

        let cfg = PipelineConfig::default();
        let build = || {
            let mut m = RunManifest::new("stats", &cfg);
            m.add_input(&input).unwrap();
            m.add_output("stats.json");
            m.write(dir.path()).unwrap()
        };
        let path = build();
        let first = fs::read(&path).unwrap();
        let again = fs::read(build()).unwrap();
        assert_eq!(first, again);

        let text = String::from_utf8(first).unwrap();
        assert!(text.contains("corpus.jsonl"));
        assert!(text.contains("stats.json"));
        assert!(path.file_name().unwrap() == "stats.manifest.json");
    }

    #[test]
    fn input_hash_tracks_content() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("x");
        fs::write(&input, b"a").unwrap();
        let cfg = PipelineConfig::default();
        let mut m = RunManifest::new("score", &cfg);
        m.add_input(&input).unwrap();
        let before = m.inputs[0].sha256.clone();

        fs::write(&input, b"b").unwrap();
        let mut m = RunManifest::new("score", &cfg);
        m.add_input(&input).unwrap();
        assert_ne!(before, m.inputs[0].sha256);
    }
}
