#![no_main]

use invariant_ops::DiagnosticReport;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(r) = DiagnosticReport::from_json(data) {
        let _ = r.to_csv();
        let _ = r.exit_code();
    }
});
