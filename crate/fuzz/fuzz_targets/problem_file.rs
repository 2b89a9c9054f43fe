#![no_main]

use coulomb_glue_core::problem::{problem_of, Flags, ProblemFile};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(doc) = ProblemFile::parse(text) else {
        return;
    };
    // Whatever parses must serialize back to an equal document.
    let again = ProblemFile::parse(&doc.to_json()).expect("own output parses");
    assert_eq!(doc, again);
    let _ = problem_of(&doc, Flags::default());
});
