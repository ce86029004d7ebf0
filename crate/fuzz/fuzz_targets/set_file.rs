#![no_main]

use expind::io::{parse_set, write_set};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    if let Ok(s) = parse_set(text, n as usize) {
        assert!(s.iter().all(|v| v < n as usize));
        assert_eq!(parse_set(&write_set(&s), n as usize).as_ref(), Ok(&s));
    }
});
