#![no_main]

use invariant_ops::io;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(m) = io::spectrum_from_json(data) {
        let again = io::spectrum_from_json(&io::spectrum_to_json(&m)).expect("re-parse");
        assert_eq!(m.hash(), again.hash());
    }
});
