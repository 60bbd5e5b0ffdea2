#![no_main]

use libfuzzer_sys::fuzz_target;
use limitsets_cli::config::format_periods;
use limitsets_cli::parse_periods;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(periods) = parse_periods(text) else {
        return;
    };
    assert_eq!(parse_periods(&format_periods(&periods)).unwrap(), periods);
});
