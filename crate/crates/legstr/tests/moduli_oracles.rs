//! Cross-checks for the exact classification layer: an independent
//! brute-force census, round-trip bijections, and closed-form inverses
//! for the constant-curvature series.

use std::collections::HashSet;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;

use legstr::moduli::{
    c_of_q, characteristic_numbers, constant_curvature_classes, enumerate_closed_strings,
    knot_annotation, modulus_from_fractions, r_of_q,
};
use legstr::period_map::{in_monodromic_domain, in_monodromic_domain_exact, MonodromicPoint};

fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Independent census: scan every reduced fraction pair with denominators
/// up to the bound, test membership with exact rational arithmetic on the
/// moduli themselves, and keep pairs whose lcm is within the bound. No
/// divisor-pair structure is used anywhere.
fn brute_force_census(max_wave_number: i64) -> HashSet<(i64, i64, i64, i64)> {
    let mut seen = HashSet::new();
    for k1 in 1..=max_wave_number {
        for h1 in 1..k1 {
            if h1.gcd(&k1) != 1 {
                continue;
            }
            for k2 in 1..=max_wave_number {
                if k1.lcm(&k2) > max_wave_number {
                    continue;
                }
                for h2 in 1..k2 {
                    if h2.gcd(&k2) != 1 {
                        continue;
                    }
                    if modulus_from_fractions(h1, k1, h2, k2).is_ok() {
                        seen.insert((h1, k1, h2, k2));
                    }
                }
            }
        }
    }
    seen
}

#[test]
fn enumeration_agrees_with_the_brute_force_census() {
    for bound in [9, 16, 30] {
        let listed = enumerate_closed_strings(bound);
        let census = brute_force_census(bound);
        assert_eq!(listed.len(), census.len(), "count mismatch at bound {bound}");
        for c in &listed {
            assert!(
                census.contains(&(c.h1, c.k1, c.h2, c.k2)),
                "census is missing {:?}",
                c
            );
            assert_eq!(c.n, c.k1.lcm(&c.k2));
        }
    }
}

#[test]
fn enumeration_is_sorted_duplicate_free_and_sign_correct() {
    let all = enumerate_closed_strings(50);
    let mut seen = HashSet::new();
    let mut prev_key = (0, i64::MIN, i64::MIN);
    for c in &all {
        assert!(seen.insert((c.h1, c.k1, c.h2, c.k2)), "duplicate class {:?}", c);
        let key = (c.n, c.l1, c.l2);
        assert!(key > prev_key, "ordering violated at {:?}", c);
        prev_key = key;
        assert!(c.l1 > 0 && c.l2 < 0, "linking signs wrong in {:?}", c);
        assert!(c.maslov == c.l1 + c.l2 && c.maslov < 0);
        assert_eq!(c.l1 % (c.n / c.k2), 0);
        assert_eq!(c.l2 % (c.n / c.k1), 0);
    }
}

#[test]
fn enumeration_to_fifty_is_quick() {
    let start = Instant::now();
    let all = enumerate_closed_strings(50);
    let elapsed = start.elapsed();
    assert!(!all.is_empty());
    assert!(
        elapsed.as_millis() < 1000,
        "enumeration took {elapsed:?}, expected well under a second"
    );
}

#[test]
fn round_trip_is_a_bijection_on_the_census() {
    for c in enumerate_closed_strings(40) {
        let (q2, q3) = c.modulus();
        let back = characteristic_numbers(&q2, &q3).unwrap();
        assert_eq!(back, c, "round trip diverged for {:?}", c);
    }
}

#[test]
fn exact_and_float_membership_agree_on_census_moduli() {
    for c in enumerate_closed_strings(50) {
        let (q2, q3) = c.modulus();
        assert!(in_monodromic_domain_exact(&q2, &q3));
        let p = MonodromicPoint {
            q2: q2.numer().to_string().parse::<f64>().unwrap()
                / q2.denom().to_string().parse::<f64>().unwrap(),
            q3: q3.numer().to_string().parse::<f64>().unwrap()
                / q3.denom().to_string().parse::<f64>().unwrap(),
        };
        assert!(in_monodromic_domain(&p), "float membership rejects {:?}", c);
    }
}

#[test]
fn documented_rows_have_the_documented_moduli() {
    let rows: [(i64, i64, i64, (i64, i64), (i64, i64)); 6] = [
        (7, 1, -5, (1, 3), (4, 21)),
        (8, 1, -6, (1, 3), (5, 24)),
        (9, 1, -7, (1, 3), (2, 9)),
        (9, 2, -6, (10, 27), (4, 27)),
        (13, 3, -9, (5, 13), (2, 13)),
        (21, 5, -15, (25, 63), (10, 63)),
    ];
    let all = enumerate_closed_strings(21);
    for (n, l1, l2, q2, q3) in rows {
        let c = all
            .iter()
            .find(|c| c.n == n && c.l1 == l1 && c.l2 == l2)
            .unwrap_or_else(|| panic!("|{n},{l1},{l2}> missing from the census"));
        let (m2, m3) = c.modulus();
        assert_eq!(m2, rational(q2.0, q2.1), "q2 mismatch for |{n},{l1},{l2}>");
        assert_eq!(m3, rational(q3.0, q3.1), "q3 mismatch for |{n},{l1},{l2}>");
        assert!(knot_annotation(n, l1, l2).is_some());
    }
}

#[test]
fn census_growth_is_monotone_and_starts_at_seven() {
    let mut prev = 0;
    for bound in 1..=30 {
        let count = enumerate_closed_strings(bound).len();
        assert!(count >= prev);
        if bound < 7 {
            assert_eq!(count, 0, "no classes may exist below wave number 7");
        }
        prev = count;
    }
    assert!(prev > 4);
}

#[test]
fn profile_radius_inverts_through_its_quartic() {
    // r(q) solves r^4 - 4(1+2q) r^2 + 4 = 0, so q = (r^2 - 2)^2 / (8 r^2)
    // is an exact algebraic inverse.
    for k in 0..200 {
        let q = 1.0 + 1e-4 + 12.0 * k as f64 / 199.0;
        let r = r_of_q(q).unwrap();
        assert!(r > 0.0 && r < 2.0 - std::f64::consts::SQRT_2 + 1e-12);
        let q_back = (r * r - 2.0).powi(2) / (8.0 * r * r);
        assert!(
            (q_back - q).abs() < 1e-9 * q,
            "quartic inverse failed at q = {q}: {q_back}"
        );
    }
}

#[test]
fn curvature_level_is_a_decreasing_bijection_onto_its_interval() {
    let floor = 3.0 / (2.0 * 4.0_f64.cbrt());
    let mut prev = f64::INFINITY;
    for k in 0..400 {
        // geometric sweep from just above 1 to 1e4
        let q = 1.0 + 1e-3 * (16.0_f64).powf(k as f64 / 99.0);
        let c = c_of_q(q).unwrap();
        assert!(c > floor, "level dipped under its infimum at q = {q}");
        assert!(c < prev, "level not strictly decreasing at q = {q}");
        prev = c;
    }
    assert!(c_of_q(1.0 + 1e-9).unwrap() > 1e3);
    assert!((c_of_q(1e8).unwrap() - floor).abs() < 1e-7);
}

#[test]
fn constant_curvature_list_contains_the_documented_pairs() {
    let classes = constant_curvature_classes(12).unwrap();
    let mut seen = HashSet::new();
    for c in &classes {
        assert!(seen.insert((c.a, c.b)), "duplicate ratio {}/{}", c.a, c.b);
        assert_eq!(c.maslov, c.a - c.b);
        assert_eq!(c.tb, -c.a * c.b);
        let direct = c_of_q(c.a as f64 / c.b as f64).unwrap();
        assert!((c.c - direct).abs() <= f64::EPSILON * direct.abs());
    }
    assert!(seen.contains(&(5, 3)) && seen.contains(&(7, 6)));
    assert!(!seen.contains(&(6, 3)), "non-coprime pair leaked");
}
