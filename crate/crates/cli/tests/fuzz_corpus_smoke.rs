//! Replays the checked-in fuzz corpus seeds through the parser entry points
//! the fuzz targets exercise, so plain `cargo test` covers them too.

use std::path::PathBuf;

use ramsey_zne_cli::config::{apply_override, ConfigFile};
use ramsey_zne_cli::csv_io::CsvTable;
use ramsey_zne_cli::svg::{render_plot, PlotSpec};

fn corpus(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut seeds: Vec<(PathBuf, Vec<u8>)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("missing corpus dir {}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            let bytes = std::fs::read(&path).unwrap();
            (path, bytes)
        })
        .collect();
    seeds.sort();
    assert!(!seeds.is_empty(), "corpus {target} has no seeds");
    seeds
}

#[test]
fn config_parse_seeds_never_panic() {
    let mut parsed_ok = 0;
    for (path, bytes) in corpus("fuzz_config_parse") {
        let Ok(text) = std::str::from_utf8(&bytes) else { continue };
        if let Ok(config) = ConfigFile::parse(text) {
            let _ = config.validate();
            parsed_ok += 1;
        } else {
            assert!(
                path.file_name().unwrap() != "minimal.json",
                "the minimal seed must stay parseable"
            );
        }
    }
    assert!(parsed_ok >= 3, "expected several parseable config seeds, got {parsed_ok}");
}

#[test]
fn csv_parse_seeds_never_panic() {
    let mut parsed_ok = 0;
    for (_, bytes) in corpus("fuzz_csv_parse") {
        let Ok(text) = std::str::from_utf8(&bytes) else { continue };
        if let Ok(table) = CsvTable::parse(text) {
            let _ = render_plot(&table, PlotSpec { log_y: false });
            let _ = render_plot(&table, PlotSpec { log_y: true });
            let reparsed = CsvTable::parse(&table.to_csv_string()).expect("writer output reparses");
            assert_eq!(reparsed.header, table.header);
            parsed_ok += 1;
        }
    }
    assert!(parsed_ok >= 2, "expected several parseable csv seeds, got {parsed_ok}");
}

#[test]
fn override_seeds_never_panic() {
    const BASE: &str = r#"{
        "schema": "zne-experiment-v1",
        "noise": {"kind": "phase_damping", "rate": 0.0},
        "protocol": {"detection": "variance", "sensing_time": 1.0},
        "experiment": {"kind": "infinite_shot", "b_grid": [0.5, 1.0]}
    }"#;
    for (_, bytes) in corpus("fuzz_set_override") {
        let Ok(setting) = std::str::from_utf8(&bytes) else { continue };
        let mut doc: serde_json::Value = serde_json::from_str(BASE).unwrap();
        if apply_override(&mut doc, setting).is_ok() {
            if let Ok(config) = serde_json::from_value::<ConfigFile>(doc) {
                let _ = config.validate();
            }
        }
    }
}
