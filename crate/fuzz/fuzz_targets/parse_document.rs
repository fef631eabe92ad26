#![no_main]

use libfuzzer_sys::fuzz_target;

// The parser must never panic on any input; errors come back as values with
// line and column.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = bratteli::dsl::parse_all(text);
    }
});
