#![no_main]

use libfuzzer_sys::fuzz_target;
use sampboost::boost::BoostTrace;

fuzz_target!(|data: &[u8]| {
    if let Ok(trace) = BoostTrace::read_ndjson(data) {
        let again = BoostTrace::from_ndjson(&trace.to_ndjson()).expect("round trip");
        assert_eq!(again.to_ndjson(), trace.to_ndjson());
        let _ = trace.classifier();
    }
});
