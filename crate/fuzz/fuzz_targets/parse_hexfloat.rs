#![no_main]

use libfuzzer_sys::fuzz_target;
use sampboost::hexfloat;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(v) = hexfloat::parse(text) {
        if let Ok(s) = hexfloat::format(v) {
            let back = hexfloat::parse(&s).expect("formatted value parses");
            assert_eq!(back.to_bits(), v.to_bits());
        }
    }
});
