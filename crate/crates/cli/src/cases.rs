//! Curve files shipped under `papercases/`, embedded at build time.

use twistpar::{parse_curve, CurveSpec};

pub const CUBE_ROOT_TWO: &str = include_str!("../../../papercases/cube_root_two.curve");
pub const SPLIT_CUBIC: &str = include_str!("../../../papercases/split_cubic.curve");
pub const QUINTIC_H: &str = include_str!("../../../papercases/quintic_h.curve");
pub const QUINTIC_G: &str = include_str!("../../../papercases/quintic_g.curve");
pub const TRINOMIAL_QUINTIC: &str = include_str!("../../../papercases/trinomial_quintic.curve");
pub const CUBE_ROOT_TWO_PROFILES: &str = include_str!("../../../papercases/cube_root_two.profiles");

/// Every embedded curve with a short name.
pub const ALL: [(&str, &str); 5] = [
    ("cube_root_two", CUBE_ROOT_TWO),
    ("split_cubic", SPLIT_CUBIC),
    ("quintic_h", QUINTIC_H),
    ("quintic_g", QUINTIC_G),
    ("trinomial_quintic", TRINOMIAL_QUINTIC),
];

pub fn curve(text: &str) -> CurveSpec {
    parse_curve(text).expect("embedded curve parses")
}

/// Constant of the sextic model that maps to the quintic `h`.
pub const SEXTIC_A: i64 = 1_990_170;

/// The constant `c` with `x^6 h0((3x+1)/x) = c^2 h(x)` as stated,
/// `2^2 3^14 5^2 7 13`.
pub fn stated_constant() -> num_bigint::BigInt {
    num_bigint::BigInt::from(4u32) * num_bigint::BigInt::from(3u32).pow(14) * 25u32 * 7u32 * 13u32
}
