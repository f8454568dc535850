#![no_main]

use libfuzzer_sys::fuzz_target;
use vfarm::hvac::parse_plf_table_str;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(t) = parse_plf_table_str(text, "fuzz") {
        assert!((t.eval(1.0) - 1.0).abs() < 1e-9);
    }
});
