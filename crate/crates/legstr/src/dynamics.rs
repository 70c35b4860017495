//! Curvature dynamics of critical curves with periodic profile.
//!
//! A profile is pinned down by two characters `(m, ell)`: the squared
//! elliptic modulus and a scale. This module owns the admissible-character
//! domain (positive discriminant), the first integrals `m2`, `m3`, the
//! momentum spectrum, the matrix generator of the conservation law, and a
//! frame-ODE oracle used to verify that the momentum actually stays put.

use nalgebra::Matrix3;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::elliptic::{self, EllipticParameter};
use crate::error::{Error, Result};
use crate::ode;
use crate::space::CMat;

/// The cubic (m-2)(1+m)(2m-1) steering the discriminant sign.
fn x_cubic(m: f64) -> f64 {
    (m - 2.0) * (1.0 + m) * (2.0 * m - 1.0)
}

/// sqrt(1 - m + m^2); positive on all of (0,1).
fn r_factor(m: f64) -> f64 {
    (1.0 - m + m * m).sqrt()
}

/// Lower edge of the admissible domain: the positive root in `ell` of the
/// discriminant, `frak_l(m)^6 = 27 / ((m-2)(1+m)(2m-1) + 2(1-m+m^2)^{3/2})`.
/// Tends to (27/4)^{1/6} as m -> 0 and diverges as m -> 1.
pub fn frak_l(m: f64) -> Result<f64> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::Domain(format!("frak_l: m = {m} outside (0,1)")));
    }
    let den = x_cubic(m) + 2.0 * r_factor(m).powi(3);
    Ok((27.0 / den).powf(1.0 / 6.0))
}

/// Admissible characters: m in (0,1) and ell strictly above `frak_l(m)`,
/// which is exactly where the discriminant is positive and the momentum
/// spectrum stays simple.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Characters {
    m: f64,
    ell: f64,
}

impl Characters {
    pub fn new(m: f64, ell: f64) -> Result<Self> {
        let floor = frak_l(m)?;
        if !(ell.is_finite() && ell > floor) {
            return Err(Error::OutsideDomain(format!(
                "characters ({m}, {ell}): need ell > frak_l(m) = {floor:.6}"
            )));
        }
        Ok(Characters { m, ell })
    }

    pub fn m(self) -> f64 {
        self.m
    }

    pub fn ell(self) -> f64 {
        self.ell
    }

    /// Spectrum at these characters; the constructor already guaranteed a
    /// positive discriminant, so the eigenvalues are real and distinct.
    pub fn spectrum(self) -> Spectrum {
        discriminant_and_spectrum(self.m, self.ell).expect("characters were validated")
    }
}

/// Discriminant data and the ordered momentum eigenvalues.
///
/// `lambda` sums to zero. For `p > 0` the entries are strictly increasing.
/// `ptilde` is the unclamped normalized discriminant; `|ptilde| < 1` is
/// equivalent to `p > 0`, and when `|ptilde| >= 1` the stored eigenvalues
/// are the clamped-arcsine continuation (the collided boundary values).
#[derive(Clone, Copy, Debug)]
pub struct Spectrum {
    pub p: f64,
    pub ptilde: f64,
    pub lambda: [f64; 3],
}

/// Evaluate discriminant, normalized discriminant, and sorted spectrum.
/// Defined for every m in (0,1) and ell > 0, not only on the admissible
/// domain; downstream constructions require `p > 0` themselves.
pub fn discriminant_and_spectrum(m: f64, ell: f64) -> Result<Spectrum> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::Domain(format!("spectrum: m = {m} outside (0,1)")));
    }
    if !(ell > 0.0 && ell.is_finite()) {
        return Err(Error::Domain(format!("spectrum: ell = {ell} not positive")));
    }
    let l6 = ell.powi(6);
    let x = x_cubic(m);
    let p = 64.0 * (m * m * (m - 1.0) * (m - 1.0) * l6 * l6 + 2.0 * x * l6 - 27.0);
    let r = r_factor(m);
    let ptilde = (x * l6 - 27.0) / (2.0 * r.powi(3) * l6);
    let third = ptilde.clamp(-1.0, 1.0).asin() / 3.0;
    let rl2 = r * ell * ell;
    let lambda2 = -4.0 / 3.0 * rl2 * third.sin();
    let lambda3 = 2.0 / 3.0 * rl2 * third.sin() + 2.0 / 3.0_f64.sqrt() * rl2 * third.cos();
    let lambda1 = -lambda2 - lambda3;
    Ok(Spectrum {
        p,
        ptilde,
        lambda: [lambda1, lambda2, lambda3],
    })
}

/// Partial derivatives (d/dm, d/dell) of one eigenvalue branch, from
/// implicit differentiation of the characteristic cubic. `lambda` must be a
/// spectrum value at `(m, ell)`; the shared denominator vanishes only where
/// two branches collide, i.e. on the discriminant zero locus.
pub fn lambda_derivatives(m: f64, ell: f64, lambda: f64) -> (f64, f64) {
    let r2 = 1.0 - m + m * m;
    let l3 = ell.powi(3);
    let l4 = ell.powi(4);
    let den = 4.0 * r2 * l4 - 9.0 * lambda * lambda;
    let dm = 4.0 / 3.0
        * (2.0 * (1.0 + 2.0 * m - 2.0 * m * m) * l4 * ell * ell + 3.0 * (1.0 - 2.0 * m) * l4 * lambda)
        / den;
    let dl = -16.0 / 3.0 * (x_cubic(m) * l4 * ell + 3.0 * r2 * l3 * lambda) / den;
    (dm, dl)
}

/// Even periodic curvature profile `kappa(s) = (3/2) ell^2 ((m+1)/3
/// - m sn^2(ell s, m))` together with its least period and first integrals.
#[derive(Clone, Copy, Debug)]
pub struct CurvatureProfile {
    characters: Characters,
    param: EllipticParameter,
    omega: f64,
    m2: f64,
    m3: f64,
}

impl CurvatureProfile {
    pub fn new(characters: Characters) -> Result<Self> {
        let m = characters.m();
        let ell = characters.ell();
        let param = EllipticParameter::new(m)?;
        let omega = 2.0 * elliptic::ellip_k(param) / ell;
        let m2 = 8.0 / 3.0 * (1.0 - m + m * m) * ell.powi(4);
        let m3 = 8.0 / 27.0 * (x_cubic(m) * ell.powi(6) - 27.0);
        Ok(CurvatureProfile {
            characters,
            param,
            omega,
            m2,
            m3,
        })
    }

    pub fn characters(&self) -> Characters {
        self.characters
    }

    /// Least period 2K(m)/ell.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Quadratic first integral: kappa'' + 4 kappa^2 = (3/8) m2.
    pub fn m2(&self) -> f64 {
        self.m2
    }

    /// Cubic first integral: kappa'^2 + (8/3) kappa^3 - (3/4) m2 kappa
    /// + 9 (1 + m3/8) = 0.
    pub fn m3(&self) -> f64 {
        self.m3
    }

    pub fn kappa(&self, s: f64) -> f64 {
        let m = self.characters.m();
        let ell = self.characters.ell();
        let (sn, _, _) = elliptic::jacobi_sn_cn_dn(ell * s, self.param);
        1.5 * ell * ell * ((m + 1.0) / 3.0 - m * sn * sn)
    }

    /// Derivatives kappa, kappa', .., kappa^(order) at s. The first two come
    /// from closed forms; everything above is the differentiated quadratic
    /// first integral, kappa^(j+2) = -4 sum_i C(j,i) kappa^(i) kappa^(j-i),
    /// so any order is exact given the elliptic kernel.
    pub fn kappa_jet(&self, s: f64, order: usize) -> Vec<f64> {
        let m = self.characters.m();
        let ell = self.characters.ell();
        let (sn, cn, dn) = elliptic::jacobi_sn_cn_dn(ell * s, self.param);
        let mut d = vec![0.0; order + 1];
        d[0] = 1.5 * ell * ell * ((m + 1.0) / 3.0 - m * sn * sn);
        if order >= 1 {
            d[1] = -3.0 * m * ell.powi(3) * sn * cn * dn;
        }
        if order >= 2 {
            d[2] = 0.375 * self.m2 - 4.0 * d[0] * d[0];
        }
        for k in 3..=order {
            let j = k - 2;
            let mut acc = 0.0;
            let mut binom = 1.0;
            for i in 0..=j {
                acc += binom * d[i] * d[j - i];
                binom = binom * (j - i) as f64 / (i + 1) as f64;
            }
            d[k] = -4.0 * acc;
        }
        d
    }
}

/// A traceless matrix self-adjoint for the pseudo-Hermitian form, i.e. an
/// infinitesimal isometry. Both the pointwise generator and the conserved
/// momentum it produces live here; construction re-checks membership.
#[derive(Clone, Copy, Debug)]
pub struct MomentumMatrix {
    value: CMat,
}

impl MomentumMatrix {
    /// Tolerances are relative to the matrix norm: trace within 1e-12,
    /// form-adjointness within 1e-10.
    pub fn new(value: CMat) -> Result<Self> {
        let scale = 1.0 + value.norm();
        let trace = value.trace();
        if trace.norm() > 1e-12 * scale {
            return Err(Error::Verification(format!(
                "momentum candidate has trace {trace} at scale {scale:.3e}"
            )));
        }
        let h = crate::space::form_matrix();
        let defect = (value.adjoint() * h - h * value).norm();
        if defect > 1e-10 * scale {
            return Err(Error::Verification(format!(
                "momentum candidate breaks form-adjointness by {defect:.3e} at scale {scale:.3e}"
            )));
        }
        Ok(MomentumMatrix { value })
    }

    pub fn value(&self) -> &CMat {
        &self.value
    }
}

/// The conservation-law generator assembled from a curvature 2-jet
/// (kappa, kappa', kappa''). Its conjugate by the moving frame is constant
/// along the curve, and its eigenvalues are the momentum spectrum.
pub fn lambda_matrix(kappa_jet: &[f64]) -> Result<MomentumMatrix> {
    if kappa_jet.len() < 3 {
        return Err(Error::Domain(format!(
            "lambda_matrix: need a 2-jet, got {} entries",
            kappa_jet.len()
        )));
    }
    let (k, k1, k2) = (kappa_jet[0], kappa_jet[1], kappa_jet[2]);
    let c = Complex64::new;
    let value = Matrix3::new(
        c(2.0 / 3.0 * k, 0.0),
        c(2.0 / 3.0 * k1, 2.0),
        c(0.0, -(2.0 * k * k + 2.0 / 3.0 * k2)),
        c(0.0, 0.0),
        c(-4.0 / 3.0 * k, 0.0),
        c(2.0, 2.0 / 3.0 * k1),
        c(0.0, 2.0),
        c(0.0, 0.0),
        c(2.0 / 3.0 * k, 0.0),
    );
    MomentumMatrix::new(value)
}

/// Coefficient matrix of the frame equation B' = B * structure_matrix(a, b):
/// columns express the derivative of each frame leg in the frame itself.
pub fn structure_matrix(a: f64, b: f64) -> CMat {
    let c = Complex64::new;
    Matrix3::new(
        c(0.0, 0.0),
        c(-b, 0.0),
        c(a, 0.0),
        c(1.0, 0.0),
        c(0.0, 0.0),
        c(0.0, b),
        c(0.0, 0.0),
        c(0.0, 1.0),
        c(0.0, 0.0),
    )
}

/// Integrate the moving frame B' = B * structure_matrix(1, kappa(s)) from
/// B(0) = Id, reporting `samples + 1` equispaced frames on [0, s_end].
/// Determinant and form preservation are properties of the flow and are
/// left to the caller to measure.
pub fn integrate_wilczynski(
    profile: &CurvatureProfile,
    s_end: f64,
    samples: usize,
    rtol: f64,
    atol: f64,
) -> Result<Vec<(f64, CMat)>> {
    if samples == 0 || !s_end.is_finite() || s_end == 0.0 {
        return Err(Error::Domain(format!(
            "integrate_wilczynski: bad range (s_end = {s_end}, samples = {samples})"
        )));
    }
    let f = |s: f64, b: &CMat| b * structure_matrix(1.0, profile.kappa(s));
    let mut out = Vec::with_capacity(samples + 1);
    let mut frame = CMat::identity();
    out.push((0.0, frame));
    for k in 1..=samples {
        let s0 = s_end * (k - 1) as f64 / samples as f64;
        let s1 = s_end * k as f64 / samples as f64;
        frame = ode::integrate_adaptive(&f, s0, s1, frame, rtol, atol, |_, _| {})?;
        out.push((s1, frame));
    }
    Ok(out)
}

fn factorial(k: i64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=k {
        acc *= i;
    }
    acc
}

/// Multinomial coefficient (5n)! / (parts[0]! .. parts[4]!). A negative part
/// encodes a reciprocal gamma factor evaluated at a pole, which kills the
/// whole term.
fn gamma_ratio(n: i64, parts: [i64; 5]) -> BigInt {
    if parts.iter().any(|&p| p < 0) {
        return BigInt::zero();
    }
    debug_assert_eq!(parts.iter().sum::<i64>(), 5 * n);
    let mut den = BigInt::one();
    for &p in &parts {
        den *= factorial(p);
    }
    let (q, r) = factorial(5 * n).div_rem(&den);
    debug_assert!(r.is_zero());
    q
}

/// Exact positive integer weight appearing in the series bound for the
/// quintic energy terms. Evaluated two independent ways, as the seven-term
/// multinomial combination and as the closed form
/// 4 (5n)! (4n^4 + 76n^3 + 519n^2 + 1501n + 1540) / (n! ((n+1)!)^4),
/// which must agree exactly.
pub fn c_frak(n: u32) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::Domain("c_frak: n >= 1".into()));
    }
    let n = i64::from(n);
    let c1 = gamma_ratio(n, [n, n, n, n, n]);
    let c2 = gamma_ratio(n, [n - 1, n, n, n, n + 1]);
    let c3 = gamma_ratio(n, [n - 1, n - 1, n, n + 1, n + 1]);
    let c4 = gamma_ratio(n, [n - 2, n, n, n + 1, n + 1]);
    let c5 = gamma_ratio(n, [n - 2, n - 1, n + 1, n + 1, n + 1]);
    let c6 = gamma_ratio(n, [n - 3, n, n + 1, n + 1, n + 1]);
    let c7 = gamma_ratio(n, [n - 4, n + 1, n + 1, n + 1, n + 1]);
    let combo = BigInt::from(6160) * c1 - BigInt::from(13200) * c2
        + BigInt::from(5400) * c3
        + BigInt::from(3600) * c4
        - BigInt::from(1350) * c5
        - BigInt::from(675) * c6
        + BigInt::from(81) * c7;

    let poly = BigInt::from(4 * n.pow(4) + 76 * n.pow(3) + 519 * n * n + 1501 * n + 1540);
    let f1 = factorial(n + 1);
    let f1_sq = &f1 * &f1;
    let den = factorial(n) * &f1_sq * &f1_sq;
    let (closed, rem) = (BigInt::from(4) * factorial(5 * n) * poly).div_rem(&den);
    if !rem.is_zero() || closed != combo {
        return Err(Error::Verification(format!(
            "c_frak({n}): multinomial combination and closed form disagree"
        )));
    }
    Ok(combo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frak_l_reference_values() {
        assert!((frak_l(0.5).unwrap() - 1.6582).abs() < 2e-4);
        assert!((frak_l(1e-9).unwrap() - (27.0f64 / 4.0).powf(1.0 / 6.0)).abs() < 1e-6);
        // Table row (m, ell) = (0.894052, 2.78109) sits inside the domain.
        assert!(frak_l(0.894052).unwrap() < 2.78109);
        assert!(frak_l(0.0).is_err());
        assert!(frak_l(1.0).is_err());
    }

    #[test]
    fn characters_reject_shallow_ell() {
        assert!(Characters::new(0.5, 1.0).is_err());
        assert!(Characters::new(0.5, 1.7).is_ok());
        assert!(Characters::new(1.2, 3.0).is_err());
    }

    #[test]
    fn spectrum_shape_on_a_table_row() {
        let sp = discriminant_and_spectrum(0.894052, 2.78109).unwrap();
        assert!(sp.p > 0.0);
        assert!(sp.ptilde.abs() < 1.0);
        let [l1, l2, l3] = sp.lambda;
        assert!((l1 + l2 + l3).abs() < 1e-12 * (1.0 + l3.abs()));
        assert!(l1 < l2 && l2 < l3);
    }

    #[test]
    fn discriminant_vanishes_on_the_lower_edge() {
        for &m in &[0.2, 0.5, 0.8] {
            let ell = frak_l(m).unwrap();
            let sp = discriminant_and_spectrum(m, ell).unwrap();
            assert!(sp.p.abs() < 1e-8 * ell.powi(12), "m = {m}: p = {}", sp.p);
        }
    }

    #[test]
    fn kappa_extremes_match_closed_values() {
        let ch = Characters::new(0.6, 2.0).unwrap();
        let profile = CurvatureProfile::new(ch).unwrap();
        let ell = ch.ell();
        let m = ch.m();
        assert!((profile.kappa(0.0) - ell * ell * (1.0 + m) / 2.0).abs() < 1e-12 * ell * ell);
        let quarter = profile.omega() / 2.0;
        assert!(
            (profile.kappa(quarter) - ell * ell * (1.0 - 2.0 * m) / 2.0).abs()
                < 1e-12 * ell * ell
        );
    }

    #[test]
    fn omega_matches_table_rows() {
        for &(m, ell, omega) in &[
            (0.894052, 2.78109, 1.83449),
            (0.762709, 2.13126, 2.04567),
            (0.616723, 1.82908, 2.15197),
            (0.906698, 3.05894, 1.70697),
        ] {
            let profile = CurvatureProfile::new(Characters::new(m, ell).unwrap()).unwrap();
            assert!(
                (profile.omega() - omega).abs() < 1e-4,
                "omega({m}, {ell}) = {}",
                profile.omega()
            );
        }
    }

    #[test]
    fn generator_needs_a_full_2_jet() {
        assert!(lambda_matrix(&[1.0, 2.0]).is_err());
        assert!(lambda_matrix(&[1.0, 2.0, 3.0]).is_ok());
    }

    #[test]
    fn c_frak_small_values() {
        assert_eq!(c_frak(1).unwrap(), BigInt::from(109_200));
        assert!(c_frak(0).is_err());
    }

    #[test]
    fn c_frak_positive_through_50() {
        for n in 1..=50 {
            assert!(c_frak(n).unwrap() > BigInt::zero(), "n = {n}");
        }
    }
}
