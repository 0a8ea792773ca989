#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(set) = twistpar::parse_profiles(text) {
        let again = twistpar::parse_profiles(&set.to_file_string()).expect("canonical form parses");
        assert_eq!(again, set);
    }
});
