#![no_main]

use libfuzzer_sys::fuzz_target;
use sampboost::dataset::Dataset;

fuzz_target!(|data: &[u8]| {
    let Ok(ds) = Dataset::from_csv_reader(data) else {
        return;
    };
    // accepted datasets survive their own export
    let again = Dataset::from_csv_str(&ds.to_csv()).expect("exported csv parses");
    assert_eq!(again.digest(), ds.digest());
});
