#![no_main]

use libfuzzer_sys::fuzz_target;
use ramsey_zne_cli::config::ConfigFile;

// Arbitrary bytes must never panic the config parser or validator.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(config) = ConfigFile::parse(text) {
        let _ = config.validate();
    }
});
