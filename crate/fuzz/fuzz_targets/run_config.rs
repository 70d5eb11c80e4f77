#![no_main]

use fockdyn::config::RunConfig;
use libfuzzer_sys::fuzz_target;

// Accepted configurations are valid and serialize back to an equal value.
fuzz_target!(|data: &[u8]| {
    if let Ok(config) = RunConfig::from_json(data) {
        config.validate().unwrap();
        let text = serde_json::to_vec(&config).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), config);
    }
});
