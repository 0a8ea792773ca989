#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(curve) = twistpar::parse_curve(text) {
        let again = twistpar::parse_curve(&curve.to_file_string()).expect("canonical form parses");
        assert_eq!(again.hash(), curve.hash());
    }
});
