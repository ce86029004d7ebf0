#![no_main]

use expind::Dyadic;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if text.len() > 4096 {
        return;
    }
    if let Ok(d) = text.parse::<Dyadic>() {
        assert_eq!(d.to_string().parse::<Dyadic>().as_ref(), Ok(&d));
        let _ = d.to_decimal(40);
    }
});
