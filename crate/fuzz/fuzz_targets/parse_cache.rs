#![no_main]

use libfuzzer_sys::fuzz_target;
use twistpar::cache::{parse_cache, parse_record};

fuzz_target!(|data: &[u8]| {
    let (records, good) = parse_cache(data);
    assert!(good <= data.len());
    let (again, good_again) = parse_cache(&data[..good]);
    assert_eq!(again, records);
    assert_eq!(good_again, good);
    if let Ok(line) = std::str::from_utf8(data) {
        let _ = parse_record(line);
    }
});
