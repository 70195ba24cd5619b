//! Byte-level output checks against files in `tests/golden`. Timing fields are masked.
//! Run with `UPDATE_GOLDEN=1` to rewrite the expected files.

mod support;

use std::fs;

use support::{golden_cases, golden_dir, run_case};

#[test]
fn outputs_match_golden_files() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut mismatches = Vec::new();
    for case in golden_cases() {
        let tmp = tempfile::tempdir().unwrap();
        for (file, text) in run_case(&case, tmp.path()) {
            let expected_path = golden_dir().join(case.name).join(&file);
            if update {
                fs::create_dir_all(expected_path.parent().unwrap()).unwrap();
                fs::write(&expected_path, &text).unwrap();
                continue;
            }
            let expected = fs::read_to_string(&expected_path)
                .unwrap_or_else(|e| panic!("{}: {e} (run with UPDATE_GOLDEN=1)", expected_path.display()));
            if expected != text {
                mismatches.push(format!("{}/{file}", case.name));
            }
        }
    }
    assert!(mismatches.is_empty(), "outputs differ from golden files: {mismatches:?}");
}

#[test]
fn repeated_runs_are_identical() {
    for case in golden_cases() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        assert_eq!(run_case(&case, a.path()), run_case(&case, b.path()), "{}", case.name);
    }
}
