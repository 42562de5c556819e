#![no_main]

use libfuzzer_sys::fuzz_target;
use opconn::matfile::{format_matrix, parse_matrix};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(file) = parse_matrix(s) {
            let again = parse_matrix(&format_matrix(&file.matrix)).expect("formatted matrix parses");
            assert_eq!(again.matrix, file.matrix);
        }
    }
});
