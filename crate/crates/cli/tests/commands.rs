use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use exlife_cli::{cmd_extract, cmd_lifecycle, RunConfig};
use exlife_core::exir::MethodId;
use exlife_core::json::{from_str, to_canonical_string};
use exlife_core::lifecycle::{build_lifecycle, summarize_statistics, LifecycleReport};
use exlife_core::matching::{diff_reports, ChangeKind, ChangeReport};
use exlife_core::summary::{Mode, SummaryReport};

const VERSIONS: [&str; 5] = ["1.4", "2.0", "2.7", "2.9", "2.13"];

fn corpus(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(rel)
}

fn versions() -> Vec<PathBuf> {
    VERSIONS
        .iter()
        .map(|v| corpus(&format!("movefile/{v}.exir")))
        .collect()
}

fn exlife(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exlife"))
        .args(args)
        .output()
        .expect("run exlife")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read<T: serde::de::DeserializeOwned>(p: &Path) -> T {
    from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn malformed_input_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.exir");
    fs::write(&bad, "method A::f() {\n x := := 1\n}\n").unwrap();
    let out = dir.path().join("out");
    let good = corpus("movefile/1.4.exir");
    let o = exlife(&["extract", s(&good), s(&bad), "--out", s(&out)]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.exir:2:"), "{err}");
    assert!(!out.exists());

    let o = exlife(&["lifecycle", s(&good), s(&bad), "--out", s(&out)]);
    assert!(!o.status.success());
    assert!(!out.exists());
}

#[test]
fn diff_of_identical_reports_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    let o = exlife(&[
        "extract",
        s(&corpus("movefile/2.7.exir")),
        "--out",
        s(dir.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let json = dir.path().join("2.7.summary.json");
    let changes = dir.path().join("changes.json");
    let o = exlife(&["diff", s(&json), s(&json), "--out", s(&changes)]);
    assert!(o.status.success());
    let report: ChangeReport = read(&changes);
    assert!(report.events.is_empty());
}

#[test]
fn destination_type_change_between_first_versions() {
    let dir = tempfile::tempdir().unwrap();
    let files = versions();
    let o = exlife(&[
        "extract",
        s(&files[0]),
        s(&files[1]),
        "--out",
        s(dir.path()),
        "--pretty",
    ]);
    assert!(o.status.success());
    assert!(dir.path().join("1.4.summary.txt").exists());
    let changes = dir.path().join("changes.json");
    let o = exlife(&[
        "diff",
        s(&dir.path().join("1.4.summary.json")),
        s(&dir.path().join("2.0.summary.json")),
        "--out",
        s(&changes),
        "--pretty",
    ]);
    assert!(o.status.success());
    let report: ChangeReport = read(&changes);
    assert_eq!(report.events.len(), 1);
    let e = &report.events[0];
    assert_eq!(e.kind, ChangeKind::ExceptionTypeChanged);
    assert_eq!(e.old.as_ref().unwrap().exception_type, "IOException");
    assert_eq!(
        e.new.as_ref().unwrap().exception_type,
        "FileExistsException"
    );
    let text = fs::read_to_string(dir.path().join("changes.txt")).unwrap();
    assert!(text.contains("exception-type-changed FileUtils::moveFile(File,File) (R2)"));
}

#[test]
fn reports_of_different_modes_are_not_compared() {
    let dir = tempfile::tempdir().unwrap();
    let file = corpus("movefile/2.7.exir");
    for (mode, sub) in [("intra", "a"), ("inter", "b")] {
        let out = dir.path().join(sub);
        let o = exlife(&["extract", s(&file), "--mode", mode, "--out", s(&out)]);
        assert!(o.status.success());
    }
    let changes = dir.path().join("changes.json");
    let o = exlife(&[
        "diff",
        s(&dir.path().join("a/2.7.summary.json")),
        s(&dir.path().join("b/2.7.summary.json")),
        "--out",
        s(&changes),
    ]);
    assert!(!o.status.success());
    assert!(!changes.exists());
}

#[test]
fn lifecycle_equals_the_composed_stages() {
    let dir = tempfile::tempdir().unwrap();
    let files = versions();
    let cfg = RunConfig::default();
    let summaries = dir.path().join("summaries");
    let written = cmd_extract(&files, &[], &summaries, &cfg, None).unwrap();
    let reports: Vec<SummaryReport> = written.iter().map(|p| read(p)).collect();
    let diffs: Vec<ChangeReport> = reports
        .windows(2)
        .map(|w| diff_reports(&w[0], &w[1]).unwrap())
        .collect();
    let manual = build_lifecycle(&reports, &diffs).unwrap();

    let from_exir = dir.path().join("exir");
    cmd_lifecycle(&files, &[], &from_exir, &cfg).unwrap();
    let from_json = dir.path().join("json");
    cmd_lifecycle(&written, &[], &from_json, &cfg).unwrap();

    let expected = to_canonical_string(&manual).unwrap();
    for d in [&from_exir, &from_json] {
        assert_eq!(
            fs::read_to_string(d.join("lifecycle.json")).unwrap(),
            expected
        );
        assert_eq!(
            fs::read_to_string(d.join("statistics.json")).unwrap(),
            to_canonical_string(&summarize_statistics(&manual)).unwrap()
        );
    }
}

#[test]
fn single_version_is_all_open() {
    let dir = tempfile::tempdir().unwrap();
    let o = exlife(&[
        "lifecycle",
        s(&corpus("movefile/1.4.exir")),
        "--out",
        s(dir.path()),
        "--pretty",
    ]);
    assert!(o.status.success());
    let life: LifecycleReport = read(&dir.path().join("lifecycle.json"));
    assert_eq!(life.versions, vec!["1.4"]);
    for api in &life.apis {
        assert!(api.intervals.iter().all(|i| i.removed.is_none()));
        assert!(api
            .exceptions
            .iter()
            .all(|e| e.removed.is_none() && e.events.is_empty()));
    }
    let text = fs::read_to_string(dir.path().join("lifecycle.txt")).unwrap();
    assert!(text.contains("present [1.4, OPEN)"));
}

#[test]
fn version_labels_override_file_names() {
    let dir = tempfile::tempdir().unwrap();
    let files = versions();
    let cfg = RunConfig::default();
    let labels: Vec<String> = ["a", "b"].map(String::from).to_vec();
    let (life, _) = cmd_lifecycle(&files[..2], &labels, dir.path(), &cfg).unwrap();
    assert_eq!(life.versions, labels);
    assert!(cmd_lifecycle(&files, &labels, dir.path(), &cfg).is_err());
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let files = versions();
    let mut runs = Vec::new();
    for (i, parallel) in [true, true, false].into_iter().enumerate() {
        let out = dir.path().join(i.to_string());
        let cfg = RunConfig {
            parallel,
            pretty: true,
            ..RunConfig::default()
        };
        cmd_lifecycle(&files, &[], &out, &cfg).unwrap();
        runs.push(
            ["lifecycle.json", "statistics.json", "lifecycle.txt"]
                .map(|f| fs::read(out.join(f)).unwrap()),
        );
    }
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}

#[test]
fn dot_dump_writes_both_graphs_per_method() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("dot");
    let o = exlife(&[
        "extract",
        s(&corpus("movefile/1.4.exir")),
        "--out",
        s(dir.path()),
        "--dot-dump",
        s(&dot),
    ]);
    assert!(o.status.success());
    let base = dot.join("1_4").join("FileUtils__moveFile_File_File_");
    let cfg = fs::read_to_string(base.with_extension("cfg.dot")).unwrap();
    let cdg = fs::read_to_string(base.with_extension("cdg.dot")).unwrap();
    assert!(cfg.starts_with("digraph"));
    assert!(cdg.starts_with("digraph"));
}

#[test]
fn intra_mode_lifecycle_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        mode: Mode::Intra,
        ..RunConfig::default()
    };
    let (life, stats) = cmd_lifecycle(&versions(), &[], dir.path(), &cfg).unwrap();
    assert_eq!(life.mode, Mode::Intra);
    assert_eq!(stats.mode, Mode::Intra);
    let api = MethodId::new("FileUtils", "moveFile", &["File", "File"]);
    assert!(life.apis.iter().any(|m| m.signature == api));
}

#[test]
fn invalid_limits_are_rejected() {
    let o = exlife(&[
        "extract",
        s(&corpus("movefile/1.4.exir")),
        "--path-cap",
        "0",
    ]);
    assert!(!o.status.success());
    let o = exlife(&[
        "extract",
        s(&corpus("movefile/1.4.exir")),
        "--loop-unroll",
        "2",
    ]);
    assert!(!o.status.success());
}
