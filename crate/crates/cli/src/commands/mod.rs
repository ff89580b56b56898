//! One module per subcommand.

pub mod eval_eepd;
pub mod ppo_finetune;
pub mod pseudo_label;
pub mod score;
pub mod stats;
pub mod summarize;
pub mod train_eepd;
pub mod train_summarizer;
