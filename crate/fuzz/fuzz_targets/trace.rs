#![no_main]

use expind::constructors::GoodSetTrace;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(trace) = text.parse::<GoodSetTrace>() {
        let again: GoodSetTrace = trace.to_string().parse().expect("displayed traces parse");
        assert_eq!(trace, again);
        let _ = trace.replay();
    }
});
