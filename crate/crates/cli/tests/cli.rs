use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sonoforge(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sonoforge"))
        .args(args)
        .current_dir(cwd)
        .env_remove("SONOFORGE_WORKERS")
        .output()
        .expect("binary runs")
}

fn ok(out: Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn count(dir: &Path) -> usize {
    fs::read_dir(dir).unwrap().count()
}

fn synth(dir: &Path) {
    ok(sonoforge(&["synth", "--out", "data", "--per-class", "2"], dir));
}

#[test]
fn pipeline_baseline_eval_fuse() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    synth(d);
    fs::write(d.join("config.json"), r#"{"schema_version": 1, "sample_rate": 16000}"#).unwrap();
    let summary = ok(sonoforge(
        &["pipeline", "--config", "config.json", "--manifest", "data/manifest.csv", "--out", "run", "--protocol", "sspa", "--seed", "4"],
        d,
    ));
    assert!(summary.contains("\"sspa\": 5"), "{summary}");
    assert_eq!(count(&d.join("run/1/train/sspa")), 3 * 6);
    assert_eq!(count(&d.join("run/2/test/none")), 3);

    for set in ["none", "sspa"] {
        ok(sonoforge(&["baseline", "run", "--manifest", "data/manifest.csv", "--train-set", set, "--out", &format!("{set}.csv")], d));
    }
    let text = ok(sonoforge(&["eval", "none.csv", "--manifest", "data/manifest.csv", "--out", "report"], d));
    assert!(text.starts_with("mean accuracy over 2 folds"), "{text}");
    assert!(d.join("report/eval_confusion.csv").is_file());

    ok(sonoforge(&["fuse", "none.csv", "sspa.csv", "--out", "fused.csv"], d));
    let fused = fs::read_to_string(d.join("fused.csv")).unwrap();
    assert!(fused.starts_with("pattern_id,true_label,score_burst,score_chirp,score_tone\n"));
    assert_eq!(fused.lines().count(), 7);
    ok(sonoforge(&["fuse", "none.csv", "sspa.csv", "--normalize", "--out", "fused_n.csv"], d));
}

#[test]
fn single_file_commands() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    synth(d);
    let wav = "data/tone_00.wav";
    let line = ok(sonoforge(&["repr", wav, "--out", "tone.pgm", "--repr", "mel"], d));
    assert!(line.contains("64x"), "{line}");
    ok(sonoforge(&["preview", wav, "--out", "tone.png"], d));
    assert!(fs::read(d.join("tone.png")).unwrap().starts_with(b"\x89PNG"));

    ok(sonoforge(&["augment", wav, "--protocol", "ssa", "--out", "ssa"], d));
    assert_eq!(count(&d.join("ssa")), 10);
    ok(sonoforge(&["augment", wav, "--protocol", "tsm", "--alphas", "0.9", "--out", "tsm"], d));
    assert_eq!(count(&d.join("tsm")), 5);
    ok(sonoforge(&["augment", "tone.pgm", "--protocol", "susa", "--out", "susa"], d));
    assert_eq!(count(&d.join("susa")), 29);
}

#[test]
fn failures_exit_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    synth(d);
    fs::remove_file(d.join("data/burst_00.wav")).unwrap();
    let args = ["pipeline", "--manifest", "data/manifest.csv", "--out", "run", "--protocol", "ssa"];
    let out = sonoforge(&args, d);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("1 file(s) failed") && err.contains("burst_00"), "{err}");

    let mut skip = args.to_vec();
    skip.push("--skip-errors");
    ok(sonoforge(&skip, d));
    assert_eq!(count(&d.join("run/1/test/none")) + count(&d.join("run/2/test/none")), 5);

    let out = sonoforge(&["augment", "data/tone_00.wav", "--protocol", "nope", "--out", "x"], d);
    assert!(!out.status.success());
    let out = sonoforge(&["eval", "missing.csv", "--manifest", "data/manifest.csv", "--out", "r"], d);
    assert!(!out.status.success());
}

#[test]
fn workers_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    synth(d);
    let out = Command::new(env!("CARGO_BIN_EXE_sonoforge"))
        .args(["pipeline", "--manifest", "data/manifest.csv", "--out", "run", "--protocol", "ssa"])
        .current_dir(d)
        .env("SONOFORGE_WORKERS", "0")
        .output()
        .unwrap();
    // zero workers is rejected, which shows the variable was read
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("workers"));
}
