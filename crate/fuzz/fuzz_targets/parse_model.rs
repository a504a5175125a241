#![no_main]

use libfuzzer_sys::fuzz_target;
use sampboost::boost::{Ensemble, VotingClassifier, WeightedVotingClassifier};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(vc) = VotingClassifier::from_json(text) {
        assert_eq!(VotingClassifier::from_json(&vc.to_json()).expect("round trip"), vc);
        let dim = vc.hypotheses().iter().map(|h| h.min_dim()).max().unwrap_or(0);
        let s = vc.score(&vec![0.5; dim]);
        assert!((-1.0..=1.0).contains(&s));
    }
    if let Ok(wvc) = WeightedVotingClassifier::from_json(text) {
        assert_eq!(WeightedVotingClassifier::from_json(&wvc.to_json()).expect("round trip"), wvc);
    }
});
