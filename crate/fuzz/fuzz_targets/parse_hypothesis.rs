#![no_main]

use libfuzzer_sys::fuzz_target;
use sampboost::weak::Hypothesis;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(h) = Hypothesis::from_json(text) {
        let again = Hypothesis::from_json(&h.to_json()).expect("round trip");
        assert_eq!(again, h);
        let x = vec![0.0; h.min_dim()];
        let _ = h.predict(&x);
    }
});
