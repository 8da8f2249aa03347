//! Corpus replays through the binary, byte-compared against golden JSON.
//! Set `UPDATE_GOLDEN=1` to rewrite the golden files.

use std::path::PathBuf;
use std::process::Command;

fn corpus(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "corpus", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn whp(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_whp")).args(args).output().expect("run whp")
}

const CASES: &[(&str, &str, &str, &[&str])] = &[
    ("ni_prove", "ni_prove.wrcl", "ni_prove.q", &["--mode", "exhaustive"]),
    ("ni_disprove", "ni_disprove.wrcl", "ni_disprove.q", &["--mode", "search"]),
    ("gni_prove", "gni_prove.wrcl", "gni_prove.q", &["--mode", "exhaustive"]),
    ("gni_disprove", "gni_disprove.wrcl", "gni_disprove.q", &["--mode", "hyper-check", "--strategy", "search"]),
    ("qif", "qif.wrcl", "qif.q", &["--mode", "whp", "--semiring", "maxmin"]),
    ("qif_99", "qif.wrcl", "qif_99.q", &["--mode", "whp", "--semiring", "maxmin"]),
    ("qif_value", "qif.wrcl", "qif_value.q", &["--mode", "whp", "--semiring", "maxmin"]),
    ("variance", "variance.wrcl", "variance.q", &["--mode", "whp", "--semiring", "prob"]),
    ("variance_linear", "variance.wrcl", "variance.q", &["--mode", "whp-linear", "--semiring", "prob"]),
    ("coin", "coin.wrcl", "coin.q", &["--mode", "whp", "--semiring", "prob", "--oracle"]),
    ("lang_sp", "lang_example.wrcl", "lang_example.q", &["--mode", "sp", "--semiring", "lang:4", "--oracle"]),
    ("lang_wp", "lang_example.wrcl", "lang_example.q", &["--mode", "wp", "--semiring", "lang:4", "--oracle"]),
    ("nondet_compare", "nondet_compare.wrcl", "nondet_compare.q", &["--mode", "whp", "--semiring", "maxmin"]),
    ("nondet_compare_wlp", "nondet_compare.wrcl", "nondet_compare_wlp.q", &["--mode", "whp", "--semiring", "maxmin"]),
    ("backward_assign", "backward_assign.wrcl", "backward_assign.q", &["--mode", "check"]),
    ("backward_assign_disprove", "backward_assign.wrcl", "backward_assign.q", &["--mode", "disprove"]),
    ("countdown", "countdown.wrcl", "countdown.q", &["--mode", "termination"]),
];

#[test]
fn corpus_matches_golden_files() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut mismatched = Vec::new();
    for (name, program, query, extra) in CASES {
        let (program, query) = (corpus(program), corpus(query));
        let mut args = vec![program.as_str(), query.as_str(), "--output", "json"];
        args.extend_from_slice(extra);
        let out = whp(&args);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let golden: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", &format!("{name}.json")].iter().collect();
        if update {
            std::fs::write(&golden, &out.stdout).unwrap();
            continue;
        }
        let expected = std::fs::read(&golden).unwrap_or_else(|_| panic!("missing {}", golden.display()));
        if expected != out.stdout {
            mismatched.push(*name);
        }
    }
    assert!(mismatched.is_empty(), "golden mismatch: {mismatched:?}");
}

#[test]
fn assert_flag_sets_exit_status() {
    let (p, q) = (corpus("backward_assign.wrcl"), corpus("backward_assign.q"));
    assert_eq!(whp(&[&p, &q, "--mode", "check", "--assert"]).status.code(), Some(2));
    assert_eq!(whp(&[&p, &q, "--mode", "check"]).status.code(), Some(0));
    let (p, q) = (corpus("ni_prove.wrcl"), corpus("ni_prove.q"));
    assert_eq!(whp(&[&p, &q, "--mode", "exhaustive", "--assert"]).status.code(), Some(0));
    let (p, q) = (corpus("ni_disprove.wrcl"), corpus("ni_disprove.q"));
    assert_eq!(whp(&[&p, &q, "--mode", "search", "--assert"]).status.code(), Some(2));
}

#[test]
fn errors_exit_one_with_position() {
    let dir = std::env::temp_dir().join(format!("whp-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.wrcl");
    std::fs::write(&bad, "vars x;\nx := ;\n").unwrap();
    let out = whp(&[bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.wrcl:2:6:"), "{err}");

    let overflow = dir.join("overflow.wrcl");
    std::fs::write(&overflow, "vars x;\ndomain 3;\nx := x + 1\n").unwrap();
    let q = dir.join("all.q");
    std::fs::write(&q, "init: uniform;").unwrap();
    let out = whp(&[overflow.to_str().unwrap(), q.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("domain overflow"));

    let (p, q) = (corpus("qif.wrcl"), corpus("qif.q"));
    let out = whp(&[&p, &q, "--mode", "check"]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn text_output_reports_values() {
    let (p, q) = (corpus("qif.wrcl"), corpus("qif.q"));
    let out = whp(&[&p, &q, "--mode", "whp", "--semiring", "maxmin"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("at uniform: 7\n"), "{text}");
}
