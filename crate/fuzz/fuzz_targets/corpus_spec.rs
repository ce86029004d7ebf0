#![no_main]

use expind::experiments::parse_corpus;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    // keep generated instances small: short numbers, small tree enumerations
    let mut run = 0;
    for c in text.chars() {
        run = if c.is_ascii_digit() { run + 1 } else { 0 };
        if run > 3 {
            return;
        }
    }
    if text.match_indices("trees:").any(|(i, _)| text[i + 6..].starts_with(['7', '8', '9'])) {
        return;
    }
    let _ = parse_corpus(text);
});
