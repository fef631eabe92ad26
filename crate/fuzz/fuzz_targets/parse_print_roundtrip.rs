#![no_main]

use bratteli::dsl;
use libfuzzer_sys::fuzz_target;

// Whenever the input parses, the canonical printout must parse back and be a
// fixed point of print(parse(..)).
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(docs) = dsl::parse_all(text) else {
        return;
    };
    let printed = dsl::print_all(&docs);
    let reparsed = dsl::parse_all(&printed).expect("canonical output parses");
    assert_eq!(dsl::print_all(&reparsed), printed, "printing is idempotent");
});
