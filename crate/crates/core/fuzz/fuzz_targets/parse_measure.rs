#![no_main]

use libfuzzer_sys::fuzz_target;
use opconn::FiniteMeasure;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(mu) = s.parse::<FiniteMeasure>() else { return };
    let again: FiniteMeasure = mu.to_string().parse().expect("display output parses");
    assert_eq!(again, mu);
});
