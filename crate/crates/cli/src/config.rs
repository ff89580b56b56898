//! Pipeline configuration.
//!
//! A single TOML file drives every command. Its sections mirror the library
//! config structs, and every field has a default, so an empty file (or no
//! `--config` at all) reproduces the documented hyperparameters; a section
//! only needs to name the fields it overrides. Unknown keys are rejected so
//! typos surface instead of silently falling back to defaults.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use polsum_core::eepd::{EEPDLossConfig, EEPDModelConfig, EEPDTrainConfig, EncoderConfig};
use polsum_core::ppo::PPOConfig;
use polsum_core::scoring::{R2Mode, RewardConfig};
use polsum_core::summarizer::{
    GenerationConfig, SummarizerLossConfig, SummarizerModelConfig, SummarizerTrainConfig, TpMode,
};
use serde::{Deserialize, Serialize};

/// File locations shared by the commands. `corpus` and the checkpoint
/// directories may instead be given per invocation with flags; `out_dir` is
/// where every command puts its artifacts and manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathsConfig {
    pub corpus: Option<PathBuf>,
    pub eepd_checkpoint: Option<PathBuf>,
    pub summarizer_checkpoint: Option<PathBuf>,
    pub out_dir: PathBuf,
}

impl Default for PathsConfig {
    fn default() -> Self {
        Self {
            corpus: None,
            eepd_checkpoint: None,
            summarizer_checkpoint: None,
            out_dir: PathBuf::from("runs"),
        }
    }
}

/// Fully resolved settings for one command invocation: defaults, overlaid
/// with the config file, overlaid with command-line flags. This is the
/// struct snapshotted into every run manifest, so whatever a command did
/// can be read back from its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub seed: u64,
    pub paths: PathsConfig,
    pub eepd: EEPDModelConfig,
    pub eepd_train: EEPDTrainConfig,
    pub summarizer: SummarizerModelConfig,
    pub summarizer_train: SummarizerTrainConfig,
    pub generation: GenerationConfig,
    pub reward: RewardConfig,
    pub ppo: PPOConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            paths: PathsConfig::default(),
            eepd: EEPDModelConfig::default(),
            eepd_train: EEPDTrainConfig::default(),
            summarizer: SummarizerModelConfig::default(),
            summarizer_train: SummarizerTrainConfig::default(),
            generation: GenerationConfig::default(),
            reward: RewardConfig::default(),
            ppo: PPOConfig::default(),
        }
    }
}

impl PipelineConfig {
    /// Defaults overlaid with `path`, when given. The top-level seed is
    /// copied into every training section, so one value controls the run.
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let mut cfg = Self::default();
        if let Some(path) = path {
            let raw = fs::read_to_string(path)
                .with_context(|| format!("reading config file {}", path.display()))?;
            let file: ConfigFile = toml::from_str(&raw)
                .with_context(|| format!("parsing config file {}", path.display()))?;
            file.apply(&mut cfg);
        }
        cfg.set_seed(cfg.seed);
        Ok(cfg)
    }

    /// Sets the run seed everywhere a component keeps its own copy.
    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.eepd_train.seed = seed;
        self.summarizer_train.seed = seed;
        self.ppo.seed = seed;
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.eepd.validate().context("eepd settings")?;
        self.eepd_train.validate().context("eepd_train settings")?;
        self.summarizer.validate().context("summarizer settings")?;
        self.summarizer_train
            .validate()
            .context("summarizer_train settings")?;
        self.generation.validate().context("generation settings")?;
        self.reward.validate().context("reward settings")?;
        self.ppo.validate().context("ppo settings")?;
        Ok(())
    }
}

/// Generates the partially-specified mirror of a config struct: every field
/// optional, absent fields keep the target's current value.
macro_rules! overlay {
    ($name:ident => $target:ty { $($field:ident: $ty:ty),+ $(,)? }) => {
        #[derive(Debug, Default, Deserialize)]
        #[serde(deny_unknown_fields)]
        struct $name {
            $( $field: Option<$ty>, )+
        }

        impl $name {
            fn apply(self, target: &mut $target) {
                $( if let Some(v) = self.$field { target.$field = v; } )+
            }
        }
    };
}

overlay!(EncoderOverlay => EncoderConfig {
    encoder: String,
    d_model: usize,
    d_ff: usize,
    dropout: f64,
    max_len: usize,
});

overlay!(EepdOverlay => EEPDModelConfig {
    max_span_len: usize,
    span_width_emb_dim: usize,
    threshold: f64,
});

overlay!(EepdLossOverlay => EEPDLossConfig {
    alpha1: f64,
    alpha2: f64,
    alpha3: f64,
    neg_ratio: usize,
});

overlay!(EepdTrainOverlay => EEPDTrainConfig {
    epochs: usize,
    batch_size: usize,
    lr: f64,
    max_grad_norm: f64,
});

overlay!(SummarizerOverlay => SummarizerModelConfig {
    base: String,
    d_model: usize,
    d_ff: usize,
    dropout: f64,
    max_src_len: usize,
    max_tgt_len: usize,
});

overlay!(SummarizerLossOverlay => SummarizerLossConfig {
    lambda: f64,
    tp_mode: TpMode,
});

overlay!(SummarizerTrainOverlay => SummarizerTrainConfig {
    epochs: usize,
    batch_size: usize,
    lr: f64,
    warmup_frac: f64,
    max_grad_norm: f64,
});

overlay!(GenerationOverlay => GenerationConfig {
    max_seq_length: usize,
    min_new_tokens: usize,
    top_p: f64,
    top_k: usize,
    do_sample: bool,
    num_beams: usize,
    use_cache: bool,
});

overlay!(RewardOverlay => RewardConfig {
    beta: f64,
    w1: f64,
    w2: f64,
    w3: f64,
    r2_mode: R2Mode,
});

overlay!(PpoOverlay => PPOConfig {
    learning_rate: f64,
    warmup_frac: f64,
    gamma: f64,
    lambda_gae: f64,
    clip_epsilon: f64,
    init_kl_coef: f64,
    adaptive_kl_coef: bool,
    kl_target: f64,
    kl_horizon: usize,
    batch_size: usize,
    mini_batch_size: usize,
    epochs_per_batch: usize,
    vf_coef: f64,
    max_grad_norm: f64,
    normalize_rewards: bool,
    steps: usize,
});

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PathsOverlay {
    corpus: Option<PathBuf>,
    eepd_checkpoint: Option<PathBuf>,
    summarizer_checkpoint: Option<PathBuf>,
    out_dir: Option<PathBuf>,
}

impl PathsOverlay {
    fn apply(self, target: &mut PathsConfig) {
        if let Some(v) = self.corpus {
            target.corpus = Some(v);
        }
        if let Some(v) = self.eepd_checkpoint {
            target.eepd_checkpoint = Some(v);
        }
        if let Some(v) = self.summarizer_checkpoint {
            target.summarizer_checkpoint = Some(v);
        }
        if let Some(v) = self.out_dir {
            target.out_dir = v;
        }
    }
}

/// On-disk shape of the TOML file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    seed: Option<u64>,
    #[serde(default)]
    paths: PathsOverlay,
    #[serde(default)]
    encoder: EncoderOverlay,
    #[serde(default)]
    eepd: EepdOverlay,
    #[serde(default)]
    eepd_loss: EepdLossOverlay,
    #[serde(default)]
    eepd_train: EepdTrainOverlay,
    #[serde(default)]
    summarizer: SummarizerOverlay,
    #[serde(default)]
    summarizer_loss: SummarizerLossOverlay,
    #[serde(default)]
    summarizer_train: SummarizerTrainOverlay,
    #[serde(default)]
    generation: GenerationOverlay,
    #[serde(default)]
    reward: RewardOverlay,
    #[serde(default)]
    ppo: PpoOverlay,
}

impl ConfigFile {
    fn apply(self, cfg: &mut PipelineConfig) {
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        self.paths.apply(&mut cfg.paths);
        self.encoder.apply(&mut cfg.eepd.encoder);
        self.eepd.apply(&mut cfg.eepd);
        self.eepd_loss.apply(&mut cfg.eepd_train.loss);
        self.eepd_train.apply(&mut cfg.eepd_train);
        self.summarizer.apply(&mut cfg.summarizer);
        self.summarizer_loss.apply(&mut cfg.summarizer_train.loss);
        self.summarizer_train.apply(&mut cfg.summarizer_train);
        self.generation.apply(&mut cfg.generation);
        self.reward.apply(&mut cfg.reward);
        self.ppo.apply(&mut cfg.ppo);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn load_str(toml: &str) -> anyhow::Result<PipelineConfig> {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(toml.as_bytes()).unwrap();
        PipelineConfig::load(Some(file.path()))
    }

    #[test]
    fn empty_file_reproduces_documented_defaults() {
        let cfg = load_str("").unwrap();
        assert_eq!(cfg, PipelineConfig::default());

        assert_eq!(cfg.eepd.encoder.dropout, 0.2);
        assert_eq!(cfg.eepd.encoder.max_len, 512);
        assert_eq!(cfg.eepd.max_span_len, 10);
        assert_eq!(cfg.eepd.span_width_emb_dim, 300);
        assert_eq!(cfg.eepd_train.lr, 1e-5);
        assert_eq!(cfg.eepd_train.batch_size, 4);
        assert_eq!(cfg.eepd_train.max_grad_norm, 1.0);
        assert_eq!(
            (
                cfg.eepd_train.loss.alpha1,
                cfg.eepd_train.loss.alpha2,
                cfg.eepd_train.loss.alpha3
            ),
            (0.5, 0.25, 0.25)
        );

        assert_eq!(cfg.summarizer_train.lr, 5.41e-6);
        assert_eq!(cfg.summarizer_train.warmup_frac, 0.1);
        assert_eq!(cfg.summarizer_train.batch_size, 8);

        assert_eq!(cfg.generation.max_seq_length, 1024);
        assert_eq!(cfg.generation.min_new_tokens, 200);
        assert_eq!(cfg.generation.top_p, 0.9);
        assert_eq!(cfg.generation.top_k, 10);
        assert!(cfg.generation.do_sample);
        assert_eq!(cfg.generation.num_beams, 1);
        assert!(cfg.generation.use_cache);

        assert_eq!(cfg.ppo.learning_rate, 5.41e-6);
        assert_eq!(cfg.ppo.gamma, 0.99);
        assert!(cfg.ppo.adaptive_kl_coef);
        assert_eq!(cfg.ppo.batch_size, 8);
        assert_eq!(cfg.ppo.mini_batch_size, 2);

        assert_eq!(cfg.reward.beta, 0.3);
        assert_eq!((cfg.reward.w1, cfg.reward.w2, cfg.reward.w3), (1.0, 1.0, 1.0));
        assert_eq!(cfg.reward.r2_mode, R2Mode::Normalized);
    }

    #[test]
    fn missing_config_flag_equals_defaults() {
        let cfg = PipelineConfig::load(None).unwrap();
        assert_eq!(cfg, PipelineConfig::default());
    }

    #[test]
    fn partial_section_overrides_named_fields_only() {
        let cfg = load_str(
            "[eepd_train]\nepochs = 3\n\n[ppo]\nsteps = 5\n\n[reward]\nr2_mode = \"literal\"\n",
        )
        .unwrap();
        assert_eq!(cfg.eepd_train.epochs, 3);
        assert_eq!(cfg.eepd_train.lr, 1e-5);
        assert_eq!(cfg.ppo.steps, 5);
        assert_eq!(cfg.ppo.batch_size, 8);
        assert_eq!(cfg.reward.r2_mode, R2Mode::Literal);
        assert_eq!(cfg.reward.beta, 0.3);
    }

    #[test]
    fn seed_reaches_every_section() {
        let cfg = load_str("seed = 9\n").unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.eepd_train.seed, 9);
        assert_eq!(cfg.summarizer_train.seed, 9);
        assert_eq!(cfg.ppo.seed, 9);

        let mut cfg = cfg;
        cfg.set_seed(21);
        assert_eq!(cfg.ppo.seed, 21);
        assert_eq!(cfg.summarizer_train.seed, 21);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = load_str("[eepd_train]\nlearning_rate = 0.1\n").unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("learning_rate"), "{msg}");

        let err = load_str("[optimizer]\nlr = 0.1\n").unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("optimizer"), "{msg}");
    }

    #[test]
    fn paths_section_round_trips() {
        let cfg = load_str("[paths]\ncorpus = \"data/x.jsonl\"\nout_dir = \"work\"\n").unwrap();
        assert_eq!(cfg.paths.corpus.as_deref(), Some(Path::new("data/x.jsonl")));
        assert_eq!(cfg.paths.out_dir, Path::new("work"));
        assert_eq!(cfg.paths.eepd_checkpoint, None);
    }

    #[test]
    fn validate_flags_bad_values() {
        let cfg = load_str("[ppo]\ngamma = 1.5\n").unwrap();
        assert!(cfg.validate().is_err());
        let cfg = load_str("[generation]\nnum_beams = 0\n").unwrap();
        assert!(cfg.validate().is_err());
        assert!(PipelineConfig::default().validate().is_ok());
    }
}
