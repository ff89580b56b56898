//! `polsum train-eepd`: train the span-based entity extractor and leave a
//! loadable checkpoint behind.

use polsum_core::eepd::{save_eepd_checkpoint, train_eepd, EEPDModel};

use crate::config::PipelineConfig;
use crate::manifest::RunManifest;
use crate::util::{build_vocab, write_csv, CorpusArgs};

#[derive(Debug, clap::Args)]
pub struct TrainEepdArgs {
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
}

pub fn run(args: &TrainEepdArgs, cfg: &mut PipelineConfig) -> anyhow::Result<()> {
    if let Some(epochs) = args.epochs {
        cfg.eepd_train.epochs = epochs;
    }
    if let Some(batch_size) = args.batch_size {
        cfg.eepd_train.batch_size = batch_size;
    }
    if let Some(lr) = args.lr {
        cfg.eepd_train.lr = lr;
    }

    let (path, docs) = args.corpus.load(cfg)?;
    let vocab = build_vocab(&docs);
    let mut model = EEPDModel::new(cfg.eepd.clone(), vocab, cfg.seed);

    log::info!(
        "training entity extractor on {} documents for {} epochs",
        docs.len(),
        cfg.eepd_train.epochs
    );
    let history = train_eepd(&mut model, &docs, &cfg.eepd_train)?;

    let out_dir = cfg.paths.out_dir.clone();
    let rows: Vec<String> = history
        .iter()
        .enumerate()
        .map(|(i, h)| format!("{},{},{},{},{}", i + 1, h.l1, h.l2, h.l3, h.total))
        .collect();
    write_csv(&out_dir.join("eepd_train.csv"), "epoch,l1,l2,l3,total", &rows)?;

    let ckpt = out_dir.join("eepd");
    save_eepd_checkpoint(&model, &cfg.eepd_train.loss, &ckpt)?;
    if let Some(last) = history.last() {
        println!(
            "trained {} epochs, final loss {:.6} (l1 {:.6}, l2 {:.6}, l3 {:.6})",
            history.len(),
            last.total,
            last.l1,
            last.l2,
            last.l3
        );
    }
    println!("checkpoint written to {}", ckpt.display());

    let mut manifest = RunManifest::new("train-eepd", cfg);
    manifest.add_input(&path)?;
    manifest.add_output("eepd");
    manifest.add_output("eepd_train.csv");
    manifest.write(&out_dir)?;
    Ok(())
}
