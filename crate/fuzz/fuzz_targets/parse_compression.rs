#![no_main]

use libfuzzer_sys::fuzz_target;
use sampboost::compress::{compression_size, CompressionSequence};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(seq) = CompressionSequence::from_json(text) {
        assert!(compression_size(&seq) <= seq.len());
        let again = CompressionSequence::from_json(&seq.to_json()).expect("round trip");
        assert_eq!(again.to_json(), seq.to_json());
    }
});
