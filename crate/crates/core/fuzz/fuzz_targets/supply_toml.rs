#![no_main]

use libfuzzer_sys::fuzz_target;
use vfarm::sustain::{import_footprint, parse_supply_str};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(chain) = parse_supply_str(text, "fuzz") {
        assert!(import_footprint(&chain).unwrap() >= 0.0);
    }
});
