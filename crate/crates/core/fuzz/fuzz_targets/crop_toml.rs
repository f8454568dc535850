#![no_main]

use libfuzzer_sys::fuzz_target;
use vfarm::crop::CropParams;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = CropParams::from_toml_str(text) {
        let _ = p.harvest_threshold();
        let _ = p.kc(p.stage_of(1.0));
    }
});
