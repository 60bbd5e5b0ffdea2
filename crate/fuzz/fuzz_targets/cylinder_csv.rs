#![no_main]

use libfuzzer_sys::fuzz_target;
use limitsets::embedding::{read_cylinder_csv, write_cylinder_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(nu) = read_cylinder_csv(data, 0.05, 1.0) else {
        return;
    };
    let mut out = Vec::new();
    write_cylinder_csv(&nu, &mut out).unwrap();
    assert_eq!(read_cylinder_csv(out.as_slice(), 0.05, 1.0).unwrap(), nu);
});
