//! End-to-end tests that drive the compiled binary the way a user would.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polsum"))
}

fn sample_corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/sample_corpus.jsonl")
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawning polsum failed");
    assert!(
        out.status.success(),
        "command {:?} failed\nstdout:\n{}\nstderr:\n{}",
        cmd,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn run_err(cmd: &mut Command) -> String {
    let out = cmd.output().expect("spawning polsum failed");
    assert!(
        !out.status.success(),
        "command {:?} unexpectedly succeeded\nstdout:\n{}",
        cmd,
        String::from_utf8_lossy(&out.stdout)
    );
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_json(path: &Path) -> serde_json::Value {
    let raw = fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("reading {}: {e}", path.display()));
    serde_json::from_str(&raw).unwrap_or_else(|e| panic!("parsing {}: {e}", path.display()))
}

#[test]
fn stats_emits_corpus_stats_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(bin().args([
        "stats",
        "--corpus",
        sample_corpus().to_str().unwrap(),
        "--retokenize-check",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]));

    let stdout: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("stats stdout is not JSON");
    assert_eq!(stdout["n_documents"], 10);

    let on_disk = read_json(&dir.path().join("stats.json"));
    assert_eq!(stdout, on_disk);

    let manifest = read_json(&dir.path().join("stats.manifest.json"));
    assert_eq!(manifest["command"], "stats");
    assert_eq!(manifest["outputs"][0], "stats.json");
    let sha = manifest["inputs"][0]["sha256"].as_str().unwrap();
    assert_eq!(sha.len(), 64);
    assert!(sha.chars().all(|c| c.is_ascii_hexdigit()));
    assert!(manifest["config"]["ppo"]["gamma"].is_number());
}

#[test]
fn stats_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = sample_corpus();
    let args = [
        "stats",
        "--corpus",
        corpus.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ];
    run_ok(bin().args(args));
    let stats = fs::read(dir.path().join("stats.json")).unwrap();
    let manifest = fs::read(dir.path().join("stats.manifest.json")).unwrap();
    run_ok(bin().args(args));
    assert_eq!(stats, fs::read(dir.path().join("stats.json")).unwrap());
    assert_eq!(
        manifest,
        fs::read(dir.path().join("stats.manifest.json")).unwrap()
    );
}

#[test]
fn missing_checkpoints_name_the_producing_command() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap().to_string();
    let corpus = sample_corpus().to_str().unwrap().to_string();

    let stderr = run_err(bin().args([
        "eval-eepd",
        "--corpus",
        &corpus,
        "--out-dir",
        &out_dir,
    ]));
    assert!(stderr.contains("missing artifact"), "{stderr}");
    assert!(stderr.contains("polsum train-eepd"), "{stderr}");

    let stderr = run_err(bin().args([
        "ppo-finetune",
        "--corpus",
        &corpus,
        "--out-dir",
        &out_dir,
    ]));
    assert!(stderr.contains("missing artifact"), "{stderr}");
    assert!(stderr.contains("polsum train-summarizer"), "{stderr}");

    let stderr = run_err(bin().args([
        "summarize",
        "--input",
        &corpus,
        "--out-dir",
        &out_dir,
    ]));
    assert!(stderr.contains("polsum train-summarizer"), "{stderr}");
}

#[test]
fn malformed_corpus_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    fs::write(
        &bad,
        "{\"id\":\"x\",\"text\":\"a b\",\"entities\":[{\"b\":0,\"e\":5,\"label\":\"reason\"}],\"summary\":\"a\",\"summary_entities\":[]}\n",
    )
    .unwrap();
    let stderr = run_err(bin().args([
        "stats",
        "--corpus",
        bad.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]));
    assert!(stderr.contains("line 1"), "{stderr}");
}

fn write_pairs(path: &Path) {
    fs::write(
        path,
        concat!(
            "{\"generated\": \"Collects email address and name from you.\", ",
            "\"reference\": \"Collects email address and name from you to provide services.\", ",
            "\"gold_entities\": [\"email address\", \"name\"]}\n",
            "{\"generated\": \"We share data with advertisers.\", ",
            "\"reference\": \"Shares browsing data with third-party advertisers.\", ",
            "\"gold_entities\": [\"browsing data\", \"advertisers\"]}\n",
        ),
    )
    .unwrap();
}

fn score_report(pairs: &Path, extra: &[&str]) -> serde_json::Value {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        bin()
            .args([
                "score",
                "--input",
                pairs.to_str().unwrap(),
                "--out-dir",
                dir.path().to_str().unwrap(),
            ])
            .args(extra),
    );
    read_json(&dir.path().join("score.json"))
}

#[test]
fn score_r2_literal_flag_changes_only_r2_derived_fields() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = dir.path().join("pairs.jsonl");
    write_pairs(&pairs);

    let base = score_report(&pairs, &[]);
    let literal = score_report(&pairs, &["--r2-literal"]);

    let base_map = base.as_object().unwrap();
    let literal_map = literal.as_object().unwrap();
    assert_eq!(base_map.len(), literal_map.len());
    for (key, value) in base_map {
        if key == "mean_r2" || key == "mean_composite" {
            assert_ne!(value, &literal_map[key], "{key} should differ");
        } else {
            assert_eq!(value, &literal_map[key], "{key} should not change");
        }
    }
}

#[test]
fn score_weight_and_beta_flags_act_on_reward_fields() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = dir.path().join("pairs.jsonl");
    write_pairs(&pairs);

    let base = score_report(&pairs, &[]);
    let weighted = score_report(&pairs, &["--weights", "2,0,1"]);
    let composite = weighted["mean_composite"].as_f64().unwrap();
    let expected = 2.0 * weighted["mean_r1"].as_f64().unwrap()
        + weighted["mean_r3"].as_f64().unwrap();
    assert!((composite - expected).abs() < 1e-12);
    assert_eq!(base["mean_r1"], weighted["mean_r1"]);
    assert_eq!(base["rouge_l"], weighted["rouge_l"]);

    let harsher = score_report(&pairs, &["--beta", "0.9"]);
    assert_eq!(base["mean_r1"], harsher["mean_r1"]);
    assert_eq!(base["mean_r2"], harsher["mean_r2"]);
}

const SMOKE_CONFIG: &str = "\
seed = 7

[encoder]
d_model = 16
d_ff = 32
dropout = 0.0
max_len = 96

[eepd]
max_span_len = 4
span_width_emb_dim = 8

[eepd_train]
epochs = 6
batch_size = 4
lr = 3e-3

[summarizer]
d_model = 16
d_ff = 32
dropout = 0.0
max_src_len = 48
max_tgt_len = 24

[summarizer_train]
epochs = 6
batch_size = 4
lr = 3e-3

[generation]
max_seq_length = 12
min_new_tokens = 4
top_p = 1.0
top_k = 8

[ppo]
steps = 5
batch_size = 4
mini_batch_size = 2
epochs_per_batch = 2
learning_rate = 1e-4
kl_horizon = 20
";

#[test]
fn full_pipeline_smoke_on_bundled_sample() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap().to_string();
    let config_path = dir.path().join("config.toml");
    fs::write(&config_path, SMOKE_CONFIG).unwrap();
    let config = config_path.to_str().unwrap().to_string();
    let corpus = sample_corpus().to_str().unwrap().to_string();
    let corpus_bytes = fs::read(sample_corpus()).unwrap();

    run_ok(bin().args([
        "train-eepd", "--config", &config, "--corpus", &corpus, "--out-dir", &out_dir,
    ]));
    for file in ["manifest.json", "weights.bin", "vocab.json"] {
        assert!(dir.path().join("eepd").join(file).is_file(), "eepd/{file}");
    }
    assert!(dir.path().join("eepd_train.csv").is_file());

    run_ok(bin().args([
        "eval-eepd", "--config", &config, "--corpus", &corpus, "--out-dir", &out_dir,
    ]));
    let eval = read_json(&dir.path().join("eepd_eval.json"));
    assert!(eval["micro"]["f1"].is_number());

    run_ok(bin().args([
        "pseudo-label", "--config", &config, "--corpus", &corpus, "--out-dir", &out_dir,
    ]));
    let labeled_path = dir.path().join("pseudo_labeled.jsonl");
    let labeled = fs::read_to_string(&labeled_path).unwrap();
    assert_eq!(labeled.lines().count(), 10);
    for line in labeled.lines() {
        let record: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(record["entity_provenance"], "pseudo");
    }

    let labeled_arg = labeled_path.to_str().unwrap().to_string();
    run_ok(bin().args([
        "train-summarizer", "--config", &config, "--corpus", &labeled_arg, "--out-dir", &out_dir,
    ]));
    assert!(dir.path().join("summarizer/manifest.json").is_file());
    assert!(dir.path().join("summarizer_train.csv").is_file());

    run_ok(bin().args([
        "ppo-finetune", "--config", &config, "--corpus", &labeled_arg, "--out-dir", &out_dir,
        "--checkpoint-every", "2",
    ]));
    let csv = fs::read_to_string(dir.path().join("ppo_steps.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "step,r1,r2,r3,composite,kl,kl_coef,policy_loss,value_loss"
    );
    let steps: Vec<&str> = lines.collect();
    assert_eq!(steps.len(), 5);
    for (i, row) in steps.iter().enumerate() {
        assert!(row.starts_with(&format!("{i},")), "row {i}: {row}");
        assert_eq!(row.split(',').count(), 9);
    }
    assert!(dir.path().join("policy/final/manifest.json").is_file());
    assert!(dir.path().join("policy/step-0001/manifest.json").is_file());
    assert!(dir.path().join("policy/step-0003/manifest.json").is_file());

    let policy = dir.path().join("policy/final");
    let policy_arg = policy.to_str().unwrap().to_string();
    run_ok(bin().args([
        "summarize", "--config", &config, "--input", &corpus, "--checkpoint", &policy_arg,
        "--out-dir", &out_dir,
    ]));
    let summaries = fs::read_to_string(dir.path().join("summaries.jsonl")).unwrap();
    assert_eq!(summaries.lines().count(), 10);
    for (i, line) in summaries.lines().enumerate() {
        let record: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(record["id"], format!("sample-{:02}", i + 1));
        assert!(record["summary"].is_string());
    }

    run_ok(bin().args([
        "summarize", "--config", &config, "--input", &corpus, "--checkpoint", &policy_arg,
        "--out-dir", &out_dir,
    ]));
    assert_eq!(
        summaries,
        fs::read_to_string(dir.path().join("summaries.jsonl")).unwrap(),
        "generation is not reproducible for a fixed seed"
    );

    let plain = dir.path().join("notes.txt");
    fs::write(&plain, "plain text about cookies and consent for testing.\n").unwrap();
    let plain_out = dir.path().join("plain_summary.jsonl");
    run_ok(bin().args([
        "summarize", "--config", &config, "--input", plain.to_str().unwrap(),
        "--checkpoint", &policy_arg, "--output", plain_out.to_str().unwrap(),
        "--out-dir", &out_dir,
    ]));
    let record: serde_json::Value =
        serde_json::from_str(fs::read_to_string(&plain_out).unwrap().lines().next().unwrap())
            .unwrap();
    assert_eq!(record["id"], "notes");

    let pairs = dir.path().join("pairs.jsonl");
    let mut pair_lines = String::new();
    for (line, sum) in fs::read_to_string(sample_corpus())
        .unwrap()
        .lines()
        .zip(summaries.lines())
    {
        let doc: serde_json::Value = serde_json::from_str(line).unwrap();
        let generated: serde_json::Value = serde_json::from_str(sum).unwrap();
        let pair = serde_json::json!({
            "generated": generated["summary"],
            "reference": doc["summary"],
            "gold_entities": [],
        });
        pair_lines.push_str(&pair.to_string());
        pair_lines.push('\n');
    }
    fs::write(&pairs, pair_lines).unwrap();
    run_ok(bin().args([
        "score", "--input", pairs.to_str().unwrap(), "--out-dir", &out_dir,
    ]));
    let report = read_json(&dir.path().join("score.json"));
    assert_eq!(report["n_pairs"], 10);
    assert!(report["rouge_l"].as_f64().unwrap() >= 0.0);

    for manifest in [
        "train-eepd", "eval-eepd", "pseudo-label", "train-summarizer",
        "ppo-finetune", "summarize", "score",
    ] {
        let path = dir.path().join(format!("{manifest}.manifest.json"));
        assert!(path.is_file(), "missing {}", path.display());
    }

    assert_eq!(
        corpus_bytes,
        fs::read(sample_corpus()).unwrap(),
        "a command mutated the input corpus"
    );
}
