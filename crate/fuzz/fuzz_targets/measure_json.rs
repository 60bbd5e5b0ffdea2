#![no_main]

use libfuzzer_sys::fuzz_target;
use limitsets::measure::{read_measure_json, write_measure_json};

fuzz_target!(|data: &[u8]| {
    let Ok(mu) = read_measure_json(data) else {
        return;
    };
    let mut out = Vec::new();
    write_measure_json(&mu, &mut out).unwrap();
    assert_eq!(read_measure_json(out.as_slice()).unwrap(), mu);
});
