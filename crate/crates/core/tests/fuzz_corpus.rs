//! Replays the checked-in fuzz seeds through the parsers so the corpus stays
//! in sync with the formats.

use std::path::PathBuf;

use fockdyn::config::RunConfig;
use fockdyn::io::{read_measurement_csv, read_prep_report, read_sweep_csv, read_wigner_csv};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    assert!(!files.is_empty(), "no seeds for {target}");
    files
        .into_iter()
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(p).unwrap(),
            )
        })
        .collect()
}

#[test]
fn csv_seeds_parse() {
    for (name, bytes) in seeds("wigner_csv") {
        read_wigner_csv(bytes.as_slice()).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    for (name, bytes) in seeds("sweep_csv") {
        read_sweep_csv(bytes.as_slice()).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    for (name, bytes) in seeds("measurement_csv") {
        read_measurement_csv(bytes.as_slice()).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn json_seeds_parse() {
    for (name, bytes) in seeds("prep_report") {
        read_prep_report(&bytes).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    for (name, bytes) in seeds("run_config") {
        let result = RunConfig::from_json(&bytes);
        assert_eq!(
            result.is_ok(),
            !name.starts_with("invalid"),
            "{name}: {result:?}"
        );
    }
}
