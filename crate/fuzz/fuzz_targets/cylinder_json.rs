#![no_main]

use libfuzzer_sys::fuzz_target;
use limitsets::embedding::{read_cylinder_json, write_cylinder_json};

fuzz_target!(|data: &[u8]| {
    let Ok(nu) = read_cylinder_json(data) else {
        return;
    };
    let mut out = Vec::new();
    write_cylinder_json(&nu, &mut out).unwrap();
    assert_eq!(read_cylinder_json(out.as_slice()).unwrap(), nu);
});
