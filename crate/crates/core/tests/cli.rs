use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use densmat::ensemble::DensityOperator;
use densmat::formats::{read_correlations, read_ensemble, read_matrix, read_to_string, write_text};
use densmat::hardy::{golden_table, maximize_p22gg, tau, HardyContext};
use densmat::report;
use densmat::sampling::EmpiricalSet;
use densmat::tomography::{reconstruct, CorrelationSet};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn densmat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_densmat"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn steer_output_matches_library_report() {
    let (w, a, b) = (
        fixture("random3.json"),
        fixture("random3_ensemble_a.json"),
        fixture("random3_ensemble_b.json"),
    );
    let out = densmat(&["steer", path_str(&w), path_str(&a), path_str(&b)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let density = DensityOperator::new(read_matrix(&w).unwrap()).unwrap();
    let targets = [read_ensemble(&a).unwrap(), read_ensemble(&b).unwrap()];
    let names = [a.display().to_string(), b.display().to_string()];
    let summary = report::steering(&density, &targets, &names).unwrap();
    assert_eq!(stdout(&out), summary.text);
    assert!(summary.text.starts_with("purification: system dimension 3"));
}

#[test]
fn steer_rejects_a_foreign_ensemble() {
    let out = densmat(&[
        "steer",
        path_str(&fixture("wpq.json")),
        path_str(&fixture("z_ensemble.json")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("z_ensemble.json"), "{}", stderr(&out));
}

#[test]
fn hardy_golden_matches_library_and_writes_records() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("golden.json");
    let out = densmat(&["hardy", "--golden", "--out", path_str(&file)]);
    assert_eq!(out.status.code(), Some(0));

    let ctx = HardyContext::new(1.0 / tau()).unwrap();
    let m = maximize_p22gg();
    let expected = format!(
        "{}maximum of p(2G,2G) at x = {}, p = {}\n\n{}",
        report::golden(&golden_table()),
        report::fixed12(m.x),
        report::fixed12(m.p),
        report::hardy(&ctx)
    );
    assert_eq!(stdout(&out), expected);

    let records = read_correlations(&file).unwrap();
    assert_eq!(records, golden_table().to_records(&ctx));
}

#[test]
fn hardy_modes_and_domain() {
    let out = densmat(&["hardy", "--x", "0.3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        report::hardy(&HardyContext::new(0.3).unwrap())
    );

    let out = densmat(&["hardy", "--sweep", "9"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), report::sweep(&densmat::hardy::sweep(9)));

    for bad in [
        &["hardy", "--x", "0"][..],
        &["hardy", "--x", "-0.5"],
        &["hardy"],
        &["hardy", "--x", "0.5", "--golden"],
    ] {
        assert_eq!(densmat(bad).status.code(), Some(2), "{bad:?}");
    }
}

#[test]
fn tomo_forward_then_inverse() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("records.json");
    let rebuilt = dir.path().join("rebuilt.json");
    let w = fixture("three_qubits.json");

    let out = densmat(&[
        "tomo",
        path_str(&w),
        "--partition",
        "2x2x2",
        "--out",
        path_str(&records),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), "wrote 64 records for partition 2x2x2\n");

    let out = densmat(&[
        "tomo",
        path_str(&records),
        "--reference",
        path_str(&w),
        "--out",
        path_str(&rebuilt),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let set = read_correlations(&records).unwrap();
    let summary = report::reconstruction(&set, Some(&read_matrix(&w).unwrap())).unwrap();
    assert_eq!(stdout(&out), summary.text);
    assert_eq!(
        read_matrix(&rebuilt).unwrap(),
        *reconstruct(&set).unwrap().matrix()
    );
}

#[test]
fn tomo_missing_record_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("records.json");
    let out = densmat(&[
        "tomo",
        path_str(&fixture("singlet.json")),
        "--partition",
        "2x2",
        "--basis",
        "pauli",
        "--out",
        path_str(&records),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let mut set: CorrelationSet = read_correlations(&records).unwrap();
    set.records.retain(|r| r.indices != [1, 1]);
    write_text(&records, &densmat::formats::correlations_to_json(&set)).unwrap();
    let out = densmat(&["tomo", path_str(&records)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("missing [1, 1]"), "{}", stderr(&out));
}

#[test]
fn tomo_groupings_agree() {
    let out = densmat(&[
        "tomo",
        path_str(&fixture("three_qubits.json")),
        "--partition",
        "2x2x2",
        "--group",
        "1|23",
        "--group",
        "12|3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("2x4"));
    assert!(stdout(&out).contains("4x2"));
}

#[test]
fn sample_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let w = fixture("singlet.json");
    for f in [&a, &b] {
        let out = densmat(&[
            "sample",
            path_str(&w),
            "--partition",
            "2x2",
            "--shots",
            "2000",
            "--seed",
            "5",
            "--out",
            path_str(f),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    }
    let (ta, tb) = (read_to_string(&a).unwrap(), read_to_string(&b).unwrap());
    assert_eq!(ta, tb);
    let set = EmpiricalSet::from_json(&ta).unwrap();
    assert_eq!((set.shots, set.seed), (2000, 5));
    assert!(set.records.iter().all(|r| r.shots == 2000));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(densmat(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        densmat(&["steer", path_str(&fixture("wpq.json"))])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        densmat(&[
            "sample",
            path_str(&fixture("singlet.json")),
            "--partition",
            "2x2",
            "--shots",
            "0"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        densmat(&["steer", "/nonexistent.json", "/nonexistent2.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(densmat(&["--help"]).status.code(), Some(0));
}

#[test]
fn in_process_run_matches_binary() {
    let args = ["densmat", "hardy", "--x", "0.4"];
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = densmat::cli::run(args, &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(
        String::from_utf8(out).unwrap(),
        stdout(&densmat(&args[1..]))
    );
}
