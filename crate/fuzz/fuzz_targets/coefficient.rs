#![no_main]

use invariant_ops::models::DiophantineCoefficient;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if data.len() > 256 {
        return;
    }
    if let Ok(c) = DiophantineCoefficient::parse(data) {
        let _ = c.to_f64();
    }
});
