#![no_main]

use libfuzzer_sys::fuzz_target;
use opconn::FunctionSpec;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(f) = s.parse::<FunctionSpec>() {
            let again: FunctionSpec = f.to_string().parse().expect("display output parses");
            assert_eq!(again, f);
            let _ = f.eval(1.0);
        }
    }
});
