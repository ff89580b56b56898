use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::ALL_LABELS;
use crate::error::{Error, Result};
use crate::nn::{load_params, save_params, sha256_file, Vocab};

use super::loss::EEPDLossConfig;
use super::model::{EEPDModel, EEPDModelConfig, EncoderConfig};

const MANIFEST: &str = "manifest.json";
const WEIGHTS: &str = "weights.bin";
const VOCAB: &str = "vocab.json";

/// Everything needed to reconstruct the extractor besides the weights:
/// encoder identity, span enumeration limits, loss weights, the label
/// inventory in index order, and the decoding threshold. The weight file
/// is integrity-checked against its recorded digest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EEPDManifest {
    pub encoder: EncoderConfig,
    pub max_span_len: usize,
    pub span_width_emb_dim: usize,
    pub alphas: [f64; 3],
    pub labels: Vec<String>,
    pub threshold: f64,
    pub weights_sha256: String,
}

pub fn save_eepd_checkpoint(
    model: &EEPDModel,
    loss_cfg: &EEPDLossConfig,
    dir: impl AsRef<Path>,
) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    save_params(&model.store, dir.join(WEIGHTS))?;
    model.vocab.save(dir.join(VOCAB))?;
    let manifest = EEPDManifest {
        encoder: model.config.encoder.clone(),
        max_span_len: model.config.max_span_len,
        span_width_emb_dim: model.config.span_width_emb_dim,
        alphas: [loss_cfg.alpha1, loss_cfg.alpha2, loss_cfg.alpha3],
        labels: ALL_LABELS.iter().map(|l| l.as_str().to_string()).collect(),
        threshold: model.config.threshold,
        weights_sha256: sha256_file(dir.join(WEIGHTS))?,
    };
    let path = dir.join(MANIFEST);
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Checkpoint(format!("manifest encode: {e}")))?;
    fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
    Ok(())
}

pub fn load_eepd_checkpoint(dir: impl AsRef<Path>) -> Result<(EEPDModel, EEPDLossConfig)> {
    let dir = dir.as_ref();
    let manifest_path = dir.join(MANIFEST);
    let json = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let manifest: EEPDManifest = serde_json::from_str(&json)
        .map_err(|e| Error::Checkpoint(format!("manifest decode: {e}")))?;

    let expected: Vec<String> = ALL_LABELS.iter().map(|l| l.as_str().to_string()).collect();
    if manifest.labels != expected {
        return Err(Error::Checkpoint(format!(
            "label inventory mismatch: checkpoint has {:?}",
            manifest.labels
        )));
    }
    let digest = sha256_file(dir.join(WEIGHTS))?;
    if digest != manifest.weights_sha256 {
        return Err(Error::Checkpoint(
            "weight file does not match manifest digest".into(),
        ));
    }

    let store = load_params(dir.join(WEIGHTS))?;
    let vocab = Vocab::load(dir.join(VOCAB))?;
    let config = EEPDModelConfig {
        encoder: manifest.encoder.clone(),
        max_span_len: manifest.max_span_len,
        span_width_emb_dim: manifest.span_width_emb_dim,
        threshold: manifest.threshold,
    };
    config.validate()?;
    let model = EEPDModel { config, vocab, store };
    let loss_cfg = EEPDLossConfig {
        alpha1: manifest.alphas[0],
        alpha2: manifest.alphas[1],
        alpha3: manifest.alphas[2],
        ..EEPDLossConfig::default()
    };
    Ok((model, loss_cfg))
}
