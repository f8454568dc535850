#![no_main]

use libfuzzer_sys::fuzz_target;
use vfarm::econ::{parse_global_str, parse_local_str};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_global_str(text, "fuzz") {
        assert!(g.lifetime > 0);
    }
    let _ = parse_local_str(text, "fuzz");
});
