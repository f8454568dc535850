#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;
use vfarm::config::RunConfig;
use vfarm::sweep::build_grid;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = RunConfig::from_toml_str(text, Path::new(".")) {
        let _ = build_grid(&c);
    }
});
