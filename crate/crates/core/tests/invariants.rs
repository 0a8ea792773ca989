use num_bigint::BigInt;
use twistpar::curve::curve_from_i64;
use twistpar::galois::ScanFilter;
use twistpar::primes::primes_up_to;
use twistpar::search::{find_shift_primes, Direction};
use twistpar::{prime_scan, ParityEngine, ProfileSet, QuadTwist};

fn roots_mod(coeffs: &[i64], l: u64) -> usize {
    (0..l)
        .filter(|&x| {
            let v = coeffs
                .iter()
                .rev()
                .fold(0i128, |acc, &c| (acc * x as i128 + c as i128).rem_euclid(l as i128));
            v == 0
        })
        .count()
}

#[test]
fn split_primes_match_root_counting() {
    let f = [-2, 0, 0, 1];
    let c = curve_from_i64(&f);
    let scanned: Vec<u64> = prime_scan(&c, ScanFilter::class(2).with_congruence(8, 1), 3, 700)
        .map(|pc| pc.prime)
        .collect();
    let brute: Vec<u64> = primes_up_to(700)
        .into_iter()
        .filter(|&l| l > 3 && l % 8 == 1 && roots_mod(&f, l) == 3)
        .collect();
    assert_eq!(scanned, brute);
    // 89 is not split: x^3 - 2 has a single root mod 89
    assert_eq!(roots_mod(&f, 89), 1);
    assert_eq!(scanned, [433, 457, 601]);
}

#[test]
fn inert_cubic_primes_match_root_counting() {
    let f = [-2, 0, 0, 1];
    let c = curve_from_i64(&f);
    let scanned: Vec<u64> = prime_scan(&c, ScanFilter::class(0), 3, 50).map(|pc| pc.prime).collect();
    let brute: Vec<u64> = primes_up_to(50)
        .into_iter()
        .filter(|&l| l > 3 && roots_mod(&f, l) == 0)
        .collect();
    assert_eq!(scanned, brute);
}

#[test]
fn square_discriminant_gives_only_even_classes() {
    let c = curve_from_i64(&[1, -3, 0, 1]);
    assert!(prime_scan(&c, ScanFilter::default(), 3, 5000).all(|pc| pc.class_index % 2 == 0));
}

#[test]
fn flip_depends_on_squarefree_kernel() {
    let c = curve_from_i64(&[-2, 0, 0, 1]);
    let engine = ParityEngine::new(&c, &ProfileSet::new()).unwrap();
    for d in [5i64, -7, 10, 73, -219] {
        let base = engine.parity_flip(&QuadTwist::from_i64(d).unwrap());
        for k in [2i64, 3, 35] {
            let scaled = QuadTwist::new(&(BigInt::from(d) * k * k)).unwrap();
            assert_eq!(engine.parity_flip(&scaled), base);
        }
    }
}

#[test]
fn shift_prime_density_is_near_naive() {
    // x^5 - x - 1: disc 19 * 151, group S5; the three-odd-orbit type {1,1,3}
    // has density 1/6, l = 1 (mod 8) 1/4, and two split conditions 1/4
    let c = curve_from_i64(&[-1, -1, 0, 0, 0, 1]);
    let limit = 100_000;
    let found = find_shift_primes(&c, Direction::Raise2, limit).unwrap().count() as f64;
    let naive = (primes_up_to(limit).len() - 3) as f64 / 96.0;
    let ratio = found / naive;
    assert!((1.0 / 3.0..=3.0).contains(&ratio), "found {found}, naive {naive}");
}
