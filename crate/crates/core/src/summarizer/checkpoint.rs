use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{load_params, save_params, sha256_file, Vocab};

use super::generate::GenerationConfig;
use super::loss::{SummarizerLossConfig, TpMode};
use super::model::{Seq2SeqModel, SummarizerModelConfig};

const MANIFEST: &str = "manifest.json";
const WEIGHTS: &str = "weights.bin";
const VOCAB: &str = "vocab.json";

/// Identity and settings of a saved summarizer: base architecture, loss
/// mixing weight and penalty mode, default generation settings, and the
/// weight-file digest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummarizerManifest {
    pub base: SummarizerModelConfig,
    pub lambda: f64,
    pub tp_mode: TpMode,
    pub generation: GenerationConfig,
    pub weights_sha256: String,
}

pub fn save_summarizer_checkpoint(
    model: &Seq2SeqModel,
    loss_cfg: &SummarizerLossConfig,
    gen_cfg: &GenerationConfig,
    dir: impl AsRef<Path>,
) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    save_params(&model.store, dir.join(WEIGHTS))?;
    model.vocab.save(dir.join(VOCAB))?;
    let manifest = SummarizerManifest {
        base: model.config.clone(),
        lambda: loss_cfg.lambda,
        tp_mode: loss_cfg.tp_mode,
        generation: gen_cfg.clone(),
        weights_sha256: sha256_file(dir.join(WEIGHTS))?,
    };
    let path = dir.join(MANIFEST);
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Checkpoint(format!("manifest encode: {e}")))?;
    fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
    Ok(())
}

pub fn load_summarizer_checkpoint(
    dir: impl AsRef<Path>,
) -> Result<(Seq2SeqModel, SummarizerLossConfig, GenerationConfig)> {
    let dir = dir.as_ref();
    let manifest_path = dir.join(MANIFEST);
    let json = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let manifest: SummarizerManifest = serde_json::from_str(&json)
        .map_err(|e| Error::Checkpoint(format!("manifest decode: {e}")))?;
    let digest = sha256_file(dir.join(WEIGHTS))?;
    if digest != manifest.weights_sha256 {
        return Err(Error::Checkpoint(
            "weight file does not match manifest digest".into(),
        ));
    }
    let store = load_params(dir.join(WEIGHTS))?;
    let vocab = Vocab::load(dir.join(VOCAB))?;
    manifest.base.validate()?;
    manifest.generation.validate()?;
    let model = Seq2SeqModel {
        config: manifest.base.clone(),
        vocab,
        store,
    };
    let loss_cfg = SummarizerLossConfig {
        lambda: manifest.lambda,
        tp_mode: manifest.tp_mode,
    };
    Ok((model, loss_cfg, manifest.generation))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::summarizer::generate::generate_summary;

    fn toy_model() -> Seq2SeqModel {
        let vocab = Vocab::build(
            "we collect your email address and phone number".split_whitespace(),
        );
        let config = SummarizerModelConfig {
            d_model: 8,
            d_ff: 16,
            dropout: 0.0,
            max_src_len: 16,
            max_tgt_len: 16,
            ..SummarizerModelConfig::default()
        };
        Seq2SeqModel::new(config, vocab, 61)
    }

    #[test]
    fn roundtrip_generation_is_bit_identical() {
        let model = toy_model();
        let dir = tempfile::tempdir().unwrap();
        let gen_cfg = GenerationConfig {
            min_new_tokens: 4,
            max_seq_length: 10,
            ..Default::default()
        };
        save_summarizer_checkpoint(&model, &SummarizerLossConfig::default(), &gen_cfg, dir.path())
            .unwrap();
        let (reloaded, loss_cfg, gen_loaded) = load_summarizer_checkpoint(dir.path()).unwrap();
        assert_eq!(loss_cfg, SummarizerLossConfig::default());
        assert_eq!(gen_loaded, gen_cfg);
        assert_eq!(reloaded.config, model.config);

        let src: Vec<String> = ["we", "collect", "your", "email", "address"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        for seed in 0..3 {
            let a = generate_summary(&model, &src, &gen_cfg, seed).unwrap();
            let b = generate_summary(&reloaded, &src, &gen_loaded, seed).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn tampered_weights_are_rejected() {
        let model = toy_model();
        let dir = tempfile::tempdir().unwrap();
        save_summarizer_checkpoint(
            &model,
            &SummarizerLossConfig::default(),
            &GenerationConfig::default(),
            dir.path(),
        )
        .unwrap();
        let weights = dir.path().join(WEIGHTS);
        let mut bytes = fs::read(&weights).unwrap();
        bytes[40] ^= 0x01;
        fs::write(&weights, bytes).unwrap();
        assert!(load_summarizer_checkpoint(dir.path()).is_err());
    }

    #[test]
    fn missing_directory_is_an_error() {
        assert!(load_summarizer_checkpoint("/nonexistent/summarizer").is_err());
    }
}
