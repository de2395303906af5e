#![no_main]

use libfuzzer_sys::fuzz_target;
use wsms_crb_cli::{ConfigMap, ScenarioConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(map) = ConfigMap::parse(text) {
        if let Ok(c) = ScenarioConfig::from_map(&map) {
            assert!(c.check().is_ok());
        }
    }
});
