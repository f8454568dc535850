#![no_main]

use libfuzzer_sys::fuzz_target;
use vfarm::weather::{parse_weather_str, Location};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let loc = Location::new("fuzz", 63.43, 10.40, 1.0, 0.0).unwrap();
    if let Ok(series) = parse_weather_str(text, loc, "fuzz") {
        assert!(!series.is_empty());
        let _ = series.sample(0.0);
    }
});
