#![no_main]

use libfuzzer_sys::fuzz_target;
use vfarm::sweep::ScenarioSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = text.parse::<ScenarioSpec>() {
        assert_eq!(spec.id(), text);
    }
});
