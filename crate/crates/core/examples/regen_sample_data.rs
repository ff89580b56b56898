//! Regenerates the bundled synthetic sample corpus file from the in-crate
//! drafts. Run after editing `corpus::sample`:
//!
//! ```text
//! cargo run -p polsum-core --example regen_sample_data -- data/sample_corpus.jsonl
//! ```

use polsum_core::corpus::{sample_corpus, save_corpus};

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "data/sample_corpus.jsonl".to_string());
    let docs = sample_corpus();
    save_corpus(&path, &docs).expect("writing the sample corpus failed");
    println!("wrote {} documents to {path}", docs.len());
}
