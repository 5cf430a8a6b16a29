mod common;

use std::fs;

use common::{binpv, ok, p, report_value, write_corpus};
use tempfile::tempdir;

#[test]
fn pipeline_runs_and_separates_topics() {
    let dir = tempdir().unwrap();
    let raw = write_corpus(dir.path(), 240, 1);
    let corpus = dir.path().join("corpus");
    let stats = ok(&["ingest", "--source", p(&raw), "--format", "jsonl", "--out", p(&corpus), "--test-fraction", "0.25", "--bigrams"]);
    assert!(stats.contains("train_docs 180\ntest_docs 60\nlabels 4\n"), "{stats}");

    let model = dir.path().join("m.bpv");
    ok(&["train", "--corpus", p(&corpus), "--bits", "16", "--epochs", "5", "--out", p(&model), "--deterministic"]);
    let report = fs::read_to_string(dir.path().join("m.bpv.report.jsonl")).unwrap();
    assert_eq!(report.lines().count(), 5);

    let codes = dir.path().join("test.codes");
    ok(&["infer", "--model", p(&model), "--input", p(&corpus.join("test.jsonl")), "--out", p(&codes)]);
    let eval = ok(&["eval", "--codes", p(&codes), "--labels", p(&corpus.join("test.jsonl"))]);
    assert!(report_value(&eval, "map") > 0.5, "{eval}");
    let csv = fs::read_to_string(dir.path().join("test.codes.pr.csv")).unwrap();
    assert_eq!(csv.lines().count(), 12);
}

#[test]
fn baselines_share_the_code_format() {
    let dir = tempdir().unwrap();
    let raw = write_corpus(dir.path(), 160, 2);
    let corpus = dir.path().join("corpus");
    ok(&["ingest", "--source", p(&raw), "--format", "jsonl", "--out", p(&corpus), "--test-fraction", "0.25"]);
    let model = dir.path().join("pv.bpv");
    ok(&["train", "--corpus", p(&corpus), "--model", "pvdbow", "--bits", "8", "--epochs", "3", "--out", p(&model)]);
    let vecs = dir.path().join("test.vecs");
    ok(&["infer", "--model", p(&model), "--input", p(&corpus.join("test.jsonl")), "--out", p(&dir.path().join("unused")), "--vectors-out", p(&vecs)]);
    let train_vecs = dir.path().join("train.vecs");
    ok(&["export-vectors", "--model", p(&model), "--corpus", p(&corpus), "--out", p(&train_vecs)]);
    for method in ["rhp", "itq"] {
        let codes = dir.path().join(format!("{method}.codes"));
        ok(&["baseline", "--vectors", p(&vecs), "--fit", p(&train_vecs), "--method", method, "--bits", "8", "--out", p(&codes)]);
        let eval = ok(&["eval", "--codes", p(&codes), "--labels", p(&corpus.join("test.jsonl"))]);
        assert!(report_value(&eval, "map") > 0.0);
    }
    let eval = ok(&["eval", "--codes", p(&dir.path().join("itq.codes")), "--labels", p(&corpus.join("test.jsonl")), "--vectors", p(&vecs), "--rank", "filter-rerank", "--radius", "8"]);
    let cosine = ok(&["eval", "--codes", p(&dir.path().join("itq.codes")), "--labels", p(&corpus.join("test.jsonl")), "--vectors", p(&vecs), "--rank", "cosine"]);
    assert_eq!(report_value(&eval, "map"), report_value(&cosine, "map"));
}

#[test]
fn malformed_jsonl_names_the_line() {
    let dir = tempdir().unwrap();
    let raw = dir.path().join("bad.jsonl");
    fs::write(&raw, "{\"id\":\"a\",\"text\":\"x y\",\"labels\":[]}\n{\"id\":\"b\",\"labels\":[]}\n").unwrap();
    let out = binpv(&["ingest", "--source", p(&raw), "--format", "jsonl", "--out", p(&dir.path().join("c"))]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.jsonl:2"), "{err}");
}

#[test]
fn exit_codes() {
    assert_eq!(binpv(&["train", "--bogus"]).status.code(), Some(1));
    assert_eq!(binpv(&["train"]).status.code(), Some(1));
    assert_eq!(binpv(&["--help"]).status.code(), Some(0));

    let dir = tempdir().unwrap();
    let model = dir.path().join("junk.bpv");
    fs::write(&model, b"NOPE and more bytes").unwrap();
    let input = write_corpus(dir.path(), 3, 0);
    let out = binpv(&["infer", "--model", p(&model), "--input", p(&input), "--out", p(&dir.path().join("c"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("magic"));
}

#[test]
fn divergence_exits_with_three() {
    let dir = tempdir().unwrap();
    let raw = write_corpus(dir.path(), 40, 3);
    let corpus = dir.path().join("corpus");
    ok(&["ingest", "--source", p(&raw), "--format", "jsonl", "--out", p(&corpus)]);
    let out = binpv(&["train", "--corpus", p(&corpus), "--model", "pvdbow", "--bits", "8", "--epochs", "2", "--lr", "1e300", "--out", p(&dir.path().join("m"))]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn config_file_and_precedence() {
    let dir = tempdir().unwrap();
    let raw = write_corpus(dir.path(), 60, 4);
    let corpus = dir.path().join("corpus");
    ok(&["ingest", "--source", p(&raw), "--format", "jsonl", "--out", p(&corpus)]);
    let conf = dir.path().join("train.conf");
    let model = dir.path().join("m.bpv");
    fs::write(&conf, format!("# test\ncorpus = {}\nbits = 8\nepochs = 4\nout = {}\ndeterministic = true\n", p(&corpus), p(&model))).unwrap();
    ok(&["train", "--config", p(&conf), "--epochs", "2"]);
    let run = fs::read_to_string(dir.path().join("m.bpv.run")).unwrap();
    assert!(run.contains("epochs = 2\n") && run.contains("bits = 8\n") && run.contains("lr = 0.1\n"), "{run}");
    let first = fs::read(&model).unwrap();

    // the persisted settings reproduce the model
    fs::rename(&model, dir.path().join("first.bpv")).unwrap();
    ok(&["train", "--config", p(&dir.path().join("m.bpv.run"))]);
    assert_eq!(fs::read(&model).unwrap(), first);

    fs::write(&conf, "bogus = 1\n").unwrap();
    assert_eq!(binpv(&["train", "--config", p(&conf), "--corpus", "x", "--out", "y"]).status.code(), Some(1));
}

#[test]
fn eval_reports_mismatched_ids() {
    let dir = tempdir().unwrap();
    let raw = write_corpus(dir.path(), 60, 5);
    let corpus = dir.path().join("corpus");
    ok(&["ingest", "--source", p(&raw), "--format", "jsonl", "--out", p(&corpus), "--test-fraction", "0.5"]);
    let model = dir.path().join("m.bpv");
    ok(&["train", "--corpus", p(&corpus), "--bits", "8", "--epochs", "1", "--out", p(&model)]);
    let codes = dir.path().join("c");
    ok(&["infer", "--model", p(&model), "--input", p(&corpus.join("test.jsonl")), "--out", p(&codes)]);
    let out = binpv(&["eval", "--codes", p(&codes), "--labels", p(&corpus.join("train.jsonl"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("doc"));
}

#[test]
fn ingest_is_repeatable() {
    let dir = tempdir().unwrap();
    let raw = write_corpus(dir.path(), 50, 6);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&["ingest", "--source", p(&raw), "--format", "jsonl", "--out", p(&a), "--bigrams"]);
    ok(&["ingest", "--source", p(&raw), "--format", "jsonl", "--out", p(&b), "--bigrams"]);
    for f in ["train.jsonl", "test.jsonl", "vocab.txt", "stats.txt"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}
