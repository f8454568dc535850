#![no_main]

use libfuzzer_sys::fuzz_target;
use vfarm::hvac::parse_cop_table_str;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(t) = parse_cop_table_str(text, "fuzz") {
        let v = t.eval(7.0, 45.0);
        assert!(v.is_finite());
    }
});
