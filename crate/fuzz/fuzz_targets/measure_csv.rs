#![no_main]

use libfuzzer_sys::fuzz_target;
use limitsets::measure::{read_measure_csv, write_measure_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(mu) = read_measure_csv(data) else {
        return;
    };
    let mut out = Vec::new();
    write_measure_csv(&mu, &mut out).unwrap();
    assert_eq!(read_measure_csv(out.as_slice()).unwrap(), mu);
});
