//! `polsum train-summarizer`: supervised training of the encoder-decoder
//! summarizer with the entity-coverage penalty.

use polsum_core::summarizer::{save_summarizer_checkpoint, train_summarizer, Seq2SeqModel};

use crate::config::PipelineConfig;
use crate::manifest::RunManifest;
use crate::util::{build_vocab, write_csv, CorpusArgs};

#[derive(Debug, clap::Args)]
pub struct TrainSummarizerArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Override the configured epoch count.
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Override the configured batch size.
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Override the configured learning rate.
    #[arg(long)]
    pub lr: Option<f64>,
    /// Override the loss mixing weight between cross-entropy and the
    /// entity-coverage penalty.
    #[arg(long)]
    pub lambda: Option<f64>,
}

pub fn run(args: &TrainSummarizerArgs, cfg: &mut PipelineConfig) -> anyhow::Result<()> {
    if let Some(epochs) = args.epochs {
        cfg.summarizer_train.epochs = epochs;
    }
    if let Some(batch_size) = args.batch_size {
        cfg.summarizer_train.batch_size = batch_size;
    }
    if let Some(lr) = args.lr {
        cfg.summarizer_train.lr = lr;
    }
    if let Some(lambda) = args.lambda {
        cfg.summarizer_train.loss.lambda = lambda;
    }

    let (path, docs) = args.corpus.load(cfg)?;
    let vocab = build_vocab(&docs);
    let mut model = Seq2SeqModel::new(cfg.summarizer.clone(), vocab, cfg.seed);

    log::info!(
        "training summarizer on {} documents for {} epochs",
        docs.len(),
        cfg.summarizer_train.epochs
    );
    let history = train_summarizer(&mut model, &docs, &cfg.summarizer_train)?;

    let out_dir = cfg.paths.out_dir.clone();
    let rows: Vec<String> = history
        .iter()
        .enumerate()
        .map(|(i, h)| format!("{},{},{},{},{}", i + 1, h.ce, h.tp, h.tp_hard, h.total))
        .collect();
    write_csv(
        &out_dir.join("summarizer_train.csv"),
        "epoch,ce,tp,tp_hard,total",
        &rows,
    )?;

    let ckpt = out_dir.join("summarizer");
    save_summarizer_checkpoint(&model, &cfg.summarizer_train.loss, &cfg.generation, &ckpt)?;
    if let Some(last) = history.last() {
        println!(
            "trained {} epochs, final loss {:.6} (ce {:.6}, tp {:.6}, hard tp {:.3})",
            history.len(),
            last.total,
            last.ce,
            last.tp,
            last.tp_hard
        );
    }
    println!("checkpoint written to {}", ckpt.display());

    let mut manifest = RunManifest::new("train-summarizer", cfg);
    manifest.add_input(&path)?;
    manifest.add_output("summarizer");
    manifest.add_output("summarizer_train.csv");
    manifest.write(&out_dir)?;
    Ok(())
}
