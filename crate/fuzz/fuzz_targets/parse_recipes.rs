#![no_main]

use libfuzzer_sys::fuzz_target;
use twistpar::curve::curve_from_i64;
use twistpar::search::parse_recipes;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(recipes) = parse_recipes(text) else {
        return;
    };
    let json = serde_json::to_string(&recipes).expect("recipes serialize");
    assert_eq!(parse_recipes(&json).expect("serialized recipes parse"), recipes);
    let curve = curve_from_i64(&[-2, 0, 0, 1]);
    for r in recipes.iter().filter(|r| r.prime < 1_000_000) {
        let _ = r.verify(&curve);
    }
});
