#![no_main]

use libfuzzer_sys::fuzz_target;
use ramsey_zne_cli::config::{apply_override, ConfigFile};

const BASE: &str = r#"{
    "schema": "zne-experiment-v1",
    "noise": {"kind": "phase_damping", "rate": 0.0},
    "protocol": {"detection": "variance", "sensing_time": 1.0},
    "experiment": {"kind": "infinite_shot", "b_grid": [0.5, 1.0]}
}"#;

// --set key=value parsing over an arbitrary string, then revalidation of
// whatever document comes out.
fuzz_target!(|data: &[u8]| {
    let Ok(setting) = std::str::from_utf8(data) else { return };
    let mut doc: serde_json::Value = serde_json::from_str(BASE).unwrap();
    if apply_override(&mut doc, setting).is_ok() {
        if let Ok(config) = serde_json::from_value::<ConfigFile>(doc) {
            let _ = config.validate();
        }
    }
});
