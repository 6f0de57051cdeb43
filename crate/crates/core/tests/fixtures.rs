//! The JSON files under `fixtures/` at the workspace root must match the
//! in-code fixtures. Run with `CARVE_BLESS=1` to regenerate them.

use std::path::PathBuf;

use carve_core::canonical::structural_equal;
use carve_core::diagram::{to_canonical_json, Presentation};
use carve_core::fixtures::{self, DEFAULT_N};
use carve_core::pipelines::{carve, CarveInput};

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn expected() -> Vec<(String, String)> {
    let mut files: Vec<(String, String)> = fixtures::NAMES
        .iter()
        .map(|name| {
            let doc = fixtures::by_name(name, DEFAULT_N).expect("known name");
            (format!("{name}.json"), to_canonical_json(&doc) + "\n")
        })
        .collect();
    files.push((
        "ex1_result.json".into(),
        to_canonical_json(&fixtures::ex1_result(DEFAULT_N)) + "\n",
    ));
    files
}

#[test]
fn shipped_files_match_generators() {
    let bless = std::env::var_os("CARVE_BLESS").is_some();
    for (name, text) in expected() {
        let path = dir().join(&name);
        if bless {
            std::fs::write(&path, &text).unwrap();
            continue;
        }
        let shipped = std::fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("{}: {e}; run with CARVE_BLESS=1", path.display()));
        assert_eq!(shipped, text, "{name} is stale; run with CARVE_BLESS=1");
    }
}

#[test]
fn shipped_ex1_carves_to_shipped_golden() {
    let read = |name: &str| std::fs::read_to_string(dir().join(name)).unwrap();
    let input: CarveInput = serde_json::from_str(&read("ex1.json")).unwrap();
    let golden: Presentation = serde_json::from_str(&read("ex1_result.json")).unwrap();
    let report = carve(&input).unwrap();
    assert!(structural_equal(&report.result, &golden));
}
