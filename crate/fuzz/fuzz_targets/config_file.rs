#![no_main]

use libfuzzer_sys::fuzz_target;
use limitsets_cli::config::{format_config, parse_config};
use limitsets_cli::RunConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(settings) = parse_config(text) else {
        return;
    };
    assert_eq!(parse_config(&format_config(&settings)).unwrap(), settings);
    let _ = RunConfig::from_settings(&settings);
});
