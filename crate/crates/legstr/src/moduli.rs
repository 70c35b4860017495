//! Exact classification of closed strings: the two characteristic fractions
//! of a rational modulus, wave and linking numbers, enumeration by wave
//! number, and the constant-curvature series with its curvature level.
//!
//! Everything on the classification path is integer or rational arithmetic;
//! floating point enters only through the curvature level c(q).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::period_map::in_monodromic_domain_exact;

/// A closed-string class: reduced fractions h1/k1 = q2 + 2 q3 and
/// h2/k2 = q2 - q3, the wave number n = lcm(k1, k2), the two linking
/// numbers l1 = n h2/k2 and l2 = -n h1/k1, and the Maslov index l1 + l2.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CharacteristicNumbers {
    pub h1: i64,
    pub k1: i64,
    pub h2: i64,
    pub k2: i64,
    pub n: i64,
    pub l1: i64,
    pub l2: i64,
    pub maslov: i64,
}

impl CharacteristicNumbers {
    /// The modulus (q2, q3) back from the fractions, exactly.
    pub fn modulus(&self) -> (BigRational, BigRational) {
        let u = rational(self.h1, self.k1);
        let w = rational(self.h2, self.k2);
        let three = BigRational::from(BigInt::from(3));
        let two = BigRational::from(BigInt::from(2));
        ((&u + &two * &w) / &three, (&u - &w) / &three)
    }

    /// Ket-style display name |n, l1, l2>.
    pub fn label(&self) -> String {
        format!("|{},{},{}>", self.n, self.l1, self.l2)
    }
}

fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn to_i64(value: &BigInt, what: &str) -> Result<i64> {
    value
        .to_i64()
        .ok_or_else(|| Error::Domain(format!("{what} does not fit a 64-bit integer")))
}

/// Exact conversion of a rational modulus to its characteristic numbers.
pub fn characteristic_numbers(q2: &BigRational, q3: &BigRational) -> Result<CharacteristicNumbers> {
    if !in_monodromic_domain_exact(q2, q3) {
        return Err(Error::OutsideDomain(format!(
            "modulus ({q2}, {q3}) is not in the open target region"
        )));
    }
    let two = BigRational::from(BigInt::from(2));
    let u = q2 + &two * q3;
    let w = q2 - q3;
    let h1 = to_i64(u.numer(), "h1")?;
    let k1 = to_i64(u.denom(), "k1")?;
    let h2 = to_i64(w.numer(), "h2")?;
    let k2 = to_i64(w.denom(), "k2")?;
    let n = k1.lcm(&k2);
    let l1 = n / k2 * h2;
    let l2 = -(n / k1) * h1;
    Ok(CharacteristicNumbers {
        h1,
        k1,
        h2,
        k2,
        n,
        l1,
        l2,
        maslov: l1 + l2,
    })
}

/// Exact inverse of the fraction relations:
/// q2 = (h1/k1 + 2 h2/k2)/3, q3 = (h1/k1 - h2/k2)/3.
pub fn modulus_from_fractions(h1: i64, k1: i64, h2: i64, k2: i64) -> Result<(BigRational, BigRational)> {
    if h1 < 1 || k1 < 1 || h2 < 1 || k2 < 1 {
        return Err(Error::Domain(format!(
            "fractions must be positive, got {h1}/{k1}, {h2}/{k2}"
        )));
    }
    if h1.gcd(&k1) != 1 || h2.gcd(&k2) != 1 {
        return Err(Error::Domain(format!(
            "fractions must be reduced, got {h1}/{k1}, {h2}/{k2}"
        )));
    }
    let u = rational(h1, k1);
    let w = rational(h2, k2);
    let three = BigRational::from(BigInt::from(3));
    let two = BigRational::from(BigInt::from(2));
    let q2 = (&u + &two * &w) / &three;
    let q3 = (&u - &w) / &three;
    if !in_monodromic_domain_exact(&q2, &q3) {
        return Err(Error::OutsideDomain(format!(
            "fractions {h1}/{k1}, {h2}/{k2} land at ({q2}, {q3}) outside the region"
        )));
    }
    Ok((q2, q3))
}

/// Membership of (u, w) = (h1/k1, h2/k2) in the target region, cleared of
/// denominators. In these coordinates the ellipse condition collapses to
/// u^2 + uw + w^2 < 3/4 and the segment to 4u + 2w > 3; w > 0 is free.
fn fractions_admissible(h1: i64, k1: i64, h2: i64, k2: i64) -> bool {
    let (h1, k1, h2, k2) = (h1 as i128, k1 as i128, h2 as i128, k2 as i128);
    let quad = 4 * (h1 * h1 * k2 * k2 + h1 * h2 * k1 * k2 + h2 * h2 * k1 * k1);
    quad < 3 * k1 * k1 * k2 * k2 && 4 * h1 * k2 + 2 * h2 * k1 > 3 * k1 * k2
}

fn divisors(n: i64) -> Vec<i64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// All classes with wave number up to the bound, each exactly once, ordered
/// by (n, l1, l2). For each n only denominator pairs with lcm(k1, k2) = n
/// are scanned, so every reduced fraction pair appears at its own wave
/// number and never again.
pub fn enumerate_closed_strings(max_wave_number: i64) -> Vec<CharacteristicNumbers> {
    let mut out = Vec::new();
    for n in 1..=max_wave_number.max(0) {
        let divs = divisors(n);
        for &k1 in &divs {
            for &k2 in &divs {
                if k1.lcm(&k2) != n {
                    continue;
                }
                // u in (1/2, sqrt(3)/2), w in (0, 1/2): cheap necessary cuts
                // before the exact region test.
                for h1 in (k1 / 2 + 1)..k1 {
                    if 4 * h1 * h1 >= 3 * k1 * k1 || h1.gcd(&k1) != 1 {
                        continue;
                    }
                    for h2 in 1..(k2 + 1) / 2 {
                        if h2.gcd(&k2) != 1 || !fractions_admissible(h1, k1, h2, k2) {
                            continue;
                        }
                        let l1 = n / k2 * h2;
                        let l2 = -(n / k1) * h1;
                        out.push(CharacteristicNumbers {
                            h1,
                            k1,
                            h2,
                            k2,
                            n,
                            l1,
                            l2,
                            maslov: l1 + l2,
                        });
                    }
                }
            }
        }
    }
    out.sort_by_key(|c| (c.n, c.l1, c.l2));
    out
}

/// Knot types observed for the documented symmetric configurations; all
/// other classes are unlabelled.
pub fn knot_annotation(n: i64, l1: i64, l2: i64) -> Option<&'static str> {
    match (n, l1, l2) {
        (7, 1, -5) | (8, 1, -6) | (9, 1, -7) => Some("trivial"),
        (9, 2, -6) => Some("trefoil"),
        (13, 3, -9) => Some("8_19"),
        (21, 5, -15) => Some("T(7,5)"),
        _ => None,
    }
}

/// Profile radius of the constant-curvature family, strictly decreasing
/// from 2 - sqrt(2) at q = 1 down to 0 as q grows.
pub fn r_of_q(q: f64) -> Result<f64> {
    if !(q > 1.0) {
        return Err(Error::Domain(format!("constant-curvature ratio q = {q} must exceed 1")));
    }
    let s = (q * (1.0 + q)).sqrt();
    Ok((2.0 + 4.0 * q - 4.0 * s).max(0.0).sqrt())
}

/// Curvature level of the closed constant-curvature curve with ratio q > 1:
/// a strictly decreasing bijection onto (3/(2 cbrt 4), +inf); blows up as
/// q -> 1 and settles to the lower bound as q -> inf.
pub fn c_of_q(q: f64) -> Result<f64> {
    let r = r_of_q(q)?;
    let r4 = r.powi(4);
    let r8 = r4 * r4;
    let r12 = r8 * r4;
    let inner = 2.0 * (-64.0 + 528.0 * r4 + 132.0 * r8 - r12);
    let denom = inner.cbrt().powi(2);
    Ok(3.0 * (16.0 + 56.0 * r4 + r8) / (2.0 * denom))
}

/// A closed constant-curvature class: coprime a > b >= 1 with ratio q = a/b,
/// its curvature level, and the predicted torus-knot invariants (the curve
/// is a (-a, b) torus knot with Maslov index a - b and contact framing
/// invariant -ab).
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantCurvatureClass {
    pub a: i64,
    pub b: i64,
    pub c: f64,
    pub maslov: i64,
    pub tb: i64,
}

/// All coprime pairs a > b >= 1 with both entries bounded, ordered by
/// (b, a), each with its curvature level and predicted invariants.
pub fn constant_curvature_classes(bound: i64) -> Result<Vec<ConstantCurvatureClass>> {
    if bound < 2 {
        return Err(Error::Domain(format!(
            "constant-curvature enumeration needs a bound >= 2, got {bound}"
        )));
    }
    let mut out = Vec::new();
    for b in 1..=bound {
        for a in (b + 1)..=bound {
            if a.gcd(&b) != 1 {
                continue;
            }
            out.push(ConstantCurvatureClass {
                a,
                b,
                c: c_of_q(a as f64 / b as f64)?,
                maslov: a - b,
                tb: -a * b,
            });
        }
    }
    Ok(out)
}
