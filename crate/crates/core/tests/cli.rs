use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn mtprep(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtprep"))
        .arg("--output-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("spawn mtprep")
}

fn last_json(out: &Output) -> Value {
    let stdout = String::from_utf8_lossy(&out.stdout);
    let line = stdout.lines().last().expect("stdout is empty");
    serde_json::from_str(line).unwrap_or_else(|e| panic!("{e}: {line}"))
}

fn ok(out: Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    last_json(&out)
}

fn write(path: PathBuf, text: &str) -> String {
    std::fs::create_dir_all(path.parent().unwrap()).unwrap();
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn numbered(tag: &str, n: usize) -> String {
    (0..n).map(|i| format!("{tag} sentence number {i}\n")).collect()
}

#[test]
fn compute_plan_pins_english_share() {
    let dir = tempfile::tempdir().unwrap();
    let counts = write(dir.path().join("counts.json"), r#"{"en": 1000000, "de": 64, "is": 1}"#);
    let summary = ok(mtprep(dir.path(), &["compute-plan", "--counts", &counts]));
    assert_eq!(summary["command"], "compute-plan");
    let plan: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("plan.json")).unwrap()).unwrap();
    let p = &plan["probabilities"];
    assert_eq!(p["en"].as_f64().unwrap(), 0.1);
    assert!((p["de"].as_f64().unwrap() - 0.6).abs() < 1e-12);
    assert!((p["is"].as_f64().unwrap() - 0.3).abs() < 1e-12);
}

#[test]
fn tokenizer_pipeline_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let en = write(d.join("data/en.txt"), &"the quick brown fox jumps over the lazy dog\n".repeat(30));
    let hi = write(d.join("data/hi.txt"), &"नमस्ते दुनिया यह एक परीक्षण है\n".repeat(30));

    let base = d.join("base");
    ok(mtprep(&base, &["train-vocab", "--corpus", &format!("en={en}"), "--vocab-size", "300"]));
    let ext = d.join("ext");
    ok(mtprep(&ext, &["train-vocab", "--corpus", &format!("hi={hi}"), "--vocab-size", "300"]));
    let merged = d.join("merged");
    let s = ok(mtprep(
        &merged,
        &["merge-vocab", "--base", base.to_str().unwrap(), "--ext", ext.to_str().unwrap()],
    ));
    assert_eq!(s["command"], "merge-vocab");
    assert!(merged.join("vocab.json").exists() && merged.join("extension_report.json").exists());

    // identical text in every language gives ratio 1 for every tokenizer
    let corpus = d.join("flores");
    for l in ["en", "de", "hi"] {
        write(corpus.join(format!("{l}.devtest")), &std::fs::read_to_string(&hi).unwrap());
    }
    let out = d.join("eff");
    let args = [
        "analyze-efficiency",
        "--tokenizer",
        &format!("base={}", base.display()),
        "--tokenizer",
        &format!("merged={}", merged.display()),
        "--corpus-dir",
        corpus.to_str().unwrap(),
        "--format",
        "both",
    ];
    ok(mtprep(&out, &args));
    let csv = std::fs::read_to_string(out.join("efficiency.csv")).unwrap();
    let mut rows = csv.lines();
    assert_eq!(rows.next(), Some("tokenizer,language,length_ratio"));
    let rows: Vec<_> = rows.collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.ends_with(",1.000000")), "{csv}");
    let first = std::fs::read(out.join("efficiency.json")).unwrap();
    ok(mtprep(&out, &args));
    assert_eq!(std::fs::read(out.join("efficiency.json")).unwrap(), first);

    // mix and pack text shards with the merged tokenizer
    let plan = write(d.join("plan.json"), r#"{"english_code":"en","probabilities":{"en":0.5,"hi":0.5}}"#);
    let mix = d.join("mix");
    let mix_args = [
        "--seed",
        "7",
        "mix-pack",
        "--plan",
        &plan,
        "--shard",
        &format!("en={en}"),
        "--shard",
        &format!("hi={hi}"),
        "--tokenizer",
        merged.to_str().unwrap(),
        "--total-docs",
        "200",
        "--seq-len",
        "64",
    ];
    let s = ok(mtprep(&mix, &mix_args));
    let seqs = s["sequences"].as_u64().unwrap();
    assert!(seqs > 0);
    let packed = std::fs::read(mix.join("packed.bin")).unwrap();
    assert_eq!(&packed[..4], b"MTPK");
    assert_eq!(packed.len() as u64, 12 + seqs * 64 * 4);
    ok(mtprep(&mix, &mix_args));
    assert_eq!(std::fs::read(mix.join("packed.bin")).unwrap(), packed);
}

#[test]
fn prepare_finetune_reports_direction_counts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let tok = d.join("tok");
    let seed_text = write(d.join("seed.txt"), "a b c\n");
    ok(mtprep(&tok, &["train-vocab", "--corpus", &seed_text, "--vocab-size", "256"]));
    for l in ["en", "de"] {
        write(d.join(format!("flores/{l}.devtest")), &numbered(&format!("flores {l}"), 5));
        write(d.join(format!("ntrex/{l}.txt")), &numbered(&format!("ntrex {l}"), 4));
    }
    let wen = write(d.join("wmt/en"), &numbered("wmt en", 6));
    let wde = write(d.join("wmt/de"), &numbered("wmt de", 6));
    let out = d.join("out");
    let (flores, ntrex) = (d.join("flores"), d.join("ntrex"));
    let args = [
        "prepare-finetune",
        "--flores-dir",
        flores.to_str().unwrap(),
        "--ntrex-dir",
        ntrex.to_str().unwrap(),
        "--wmt",
        &format!("en-de={wen},{wde}"),
        "--tokenizer",
        tok.to_str().unwrap(),
    ];
    let s = ok(mtprep(&out, &args));
    assert_eq!(s["records"], 26);
    let stats: Value = serde_json::from_str(&std::fs::read_to_string(out.join("stats.json")).unwrap()).unwrap();
    assert_eq!(stats["counts"]["en-de"], 15);
    assert_eq!(stats["counts"]["de-en"], 11);
    let table = std::fs::read_to_string(out.join("stats.txt")).unwrap();
    assert!(table.contains("Total: 26"), "{table}");
    let jsonl = std::fs::read_to_string(out.join("finetune.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 26);
    let first: Value = serde_json::from_str(jsonl.lines().next().unwrap()).unwrap();
    let keys: Vec<_> = first.as_object().unwrap().keys().cloned().collect();
    assert_eq!(keys.len(), 5);
    for k in ["prompt", "completion", "src_lang", "tgt_lang", "origin"] {
        assert!(first.get(k).is_some(), "missing {k}");
    }
    ok(mtprep(&out, &args));
    assert_eq!(std::fs::read_to_string(out.join("finetune.jsonl")).unwrap(), jsonl);

    let rejected = ok(mtprep(&out, &[&args[..], &["--max-tgt", "3"]].concat()));
    assert_eq!(rejected["accepted"], 0);
    assert_eq!(rejected["rejected"], 26);
}

#[test]
fn training_profile_is_emitted() {
    let dir = tempfile::tempdir().unwrap();
    ok(mtprep(dir.path(), &["emit-training-profile"]));
    let p: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("training_profile.json")).unwrap()).unwrap();
    assert_eq!(p["finetuning"]["lora_rank"], 64);
    assert_eq!(p["continuous_pretraining"]["sequence_length"], 2048);
}

#[test]
fn exit_codes_distinguish_usage_and_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(mtprep(d, &["no-such-command"]).status.code(), Some(1));
    assert_eq!(mtprep(d, &["compute-plan"]).status.code(), Some(1));
    assert_eq!(mtprep(d, &["mix-pack", "--plan", "x.json", "--total-docs", "1"]).status.code(), Some(1));
    assert_eq!(mtprep(d, &["--help"]).status.code(), Some(0));

    let missing = d.join("missing.json");
    assert_eq!(mtprep(d, &["compute-plan", "--counts", missing.to_str().unwrap()]).status.code(), Some(2));
    let bad = write(d.join("bad.json"), "{\"en\": 5,\n \"de\": }");
    let out = mtprep(d, &["compute-plan", "--counts", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.json:2"));

    let en = write(d.join("w.en"), "a\nb\n");
    let de = write(d.join("w.de"), "a\n");
    let tok = d.join("tok");
    ok(mtprep(&tok, &["train-vocab", "--corpus", &en, "--vocab-size", "256"]));
    let out = mtprep(
        d,
        &["prepare-finetune", "--wmt", &format!("en-de={en},{de}"), "--tokenizer", tok.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("w.en"));
}
