//! Rotation numbers of the angular phases over one curvature period, as a
//! map from characters (m, ell) to the plane, together with its analytic
//! Jacobian, the admissible target region, and the numerical inverse.
//!
//! The only numerically delicate spot is the complement 1 - n of the middle
//! characteristic: at large ell it is a difference of two almost equal
//! numbers. It is rewritten through a third-angle sine difference whose
//! argument gap is known in closed form, so every downstream quantity keeps
//! full precision uniformly in ell.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::dynamics::{self, Characters, Spectrum};
use crate::elliptic::{self, EllipticParameter};
use crate::error::{Error, Result};
use crate::tol::Tolerances;

/// Rotation numbers of the three phases; the sum is an integer (zero in
/// this normalization), and on the admissible domain the last two fall in
/// (1/4, 1/2) and (0, 1/(2 sqrt 3)) respectively.
#[derive(Clone, Copy, Debug)]
pub struct PeriodValue {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

/// A rotation-number target (q2, q3).
#[derive(Clone, Copy, Debug)]
pub struct MonodromicPoint {
    pub q2: f64,
    pub q3: f64,
}

/// Partial derivatives of (theta2, theta3) with respect to (m, ell).
#[derive(Clone, Copy, Debug)]
pub struct Jacobian2x2 {
    pub dm_theta2: f64,
    pub dl_theta2: f64,
    pub dm_theta3: f64,
    pub dl_theta3: f64,
}

impl Jacobian2x2 {
    pub fn det(&self) -> f64 {
        self.dm_theta2 * self.dl_theta3 - self.dl_theta2 * self.dm_theta3
    }
}

fn x_cubic(m: f64) -> f64 {
    (m - 2.0) * (1.0 + m) * (2.0 * m - 1.0)
}

/// sin(asin(x)/3), the trigonometric kernel of the eigenvalue formulas.
fn f_third(x: f64) -> f64 {
    (x.clamp(-1.0, 1.0).asin() / 3.0).sin()
}

/// The positive gap f(p_inf) - f(ptilde) of the third-angle sine, where
/// p_inf is the large-ell limit of ptilde and the argument gap is exactly
/// p_inf - ptilde = 27 / (2 R^3 ell^6). A three-term Taylor step takes over
/// once that gap is far below the curvature scale of f, so the value keeps
/// full relative precision uniformly in ell. The two sines themselves ride
/// along for reuse.
struct SineGap {
    /// f(p_inf) - f(ptilde) > 0.
    gap: f64,
    /// f(ptilde) = sin(t).
    s: f64,
    /// f(p_inf) = sin(t_inf).
    s_inf: f64,
}

fn sine_gap(m: f64, ell: f64, ptilde: f64) -> SineGap {
    let r2 = 1.0 - m + m * m;
    let r3 = r2.sqrt() * r2;
    let delta = 27.0 / (2.0 * r3 * ell.powi(6));
    let pinf = (x_cubic(m) / (2.0 * r3)).clamp(-1.0, 1.0);
    let c2 = (1.0 - pinf * pinf).max(f64::MIN_POSITIVE);
    let s_inf = f_third(pinf);
    let s = f_third(ptilde);
    let gap = if delta <= 1e-3 * c2 {
        let c = c2.sqrt();
        let g = pinf.asin() / 3.0;
        let (sg, cg) = (g.sin(), g.cos());
        let g1 = 1.0 / (3.0 * c);
        let g2 = pinf / (3.0 * c2 * c);
        let g3 = (1.0 + 2.0 * pinf * pinf) / (3.0 * c2 * c2 * c);
        let f1 = cg * g1;
        let f2 = -sg * g1 * g1 + cg * g2;
        let f3 = -cg * g1 * g1 * g1 - 3.0 * sg * g1 * g2 + cg * g3;
        delta * (f1 - delta * (0.5 * f2 - delta * f3 / 6.0))
    } else {
        let direct = s_inf - s;
        if direct > 0.0 {
            direct
        } else {
            // The difference underflowed; first-order step keeps the sign.
            delta * (pinf.asin() / 3.0).cos() / (3.0 * c2.sqrt())
        }
    };
    SineGap { gap, s, s_inf }
}

/// The bracket 2(1-2m) ell^2 + 3 lambda_2 = 4 R ell^2 (f(p_inf) - f(ptilde))
/// without cancellation.
fn middle_bracket(m: f64, ell: f64, ptilde: f64) -> f64 {
    let r2 = 1.0 - m + m * m;
    4.0 * r2.sqrt() * ell * ell * sine_gap(m, ell, ptilde).gap
}

/// The denominator D_1 = 2(1+m) ell^2 + 3 lambda_1, which shrinks to zero
/// like -6/(m ell^4) at large ell while its two terms grow. The identity
/// sin(t_inf - pi/3) = -(1+m)/(2R) (same trisection angle t as in the
/// eigenvalues; it solves the same cubic and sits in the right range) turns
/// it into a sine difference carried by the stable gap:
///   D_1 = -4 R ell^2 (f(p_inf) - f(ptilde)) [1/2 + (sqrt3/2)(s + s_inf)/(c + c_inf)].
fn stable_d1(m: f64, ell: f64, ptilde: f64) -> f64 {
    let r2 = 1.0 - m + m * m;
    let g = sine_gap(m, ell, ptilde);
    let c = (1.0 - g.s * g.s).sqrt();
    let c_inf = (1.0 - g.s_inf * g.s_inf).sqrt();
    let bracket = 0.5 + 0.75_f64.sqrt() * (g.s + g.s_inf) / (c + c_inf);
    -4.0 * r2.sqrt() * ell * ell * g.gap * bracket
}

/// Everything the period map and the string parametrization share: the
/// spectrum, the three denominators D_j, characteristics n_j with their
/// complements (stabilized for the middle branch), and the complete
/// third-kind integrals.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ThetaParts {
    pub(crate) spectrum: Spectrum,
    pub(crate) d: [f64; 3],
    pub(crate) n: [f64; 3],
    pub(crate) one_minus_n: [f64; 3],
    pub(crate) pi: [f64; 3],
    pub(crate) theta: [f64; 3],
}

pub(crate) fn theta_parts(m: f64, ell: f64) -> Result<ThetaParts> {
    let spectrum = dynamics::discriminant_and_spectrum(m, ell)?;
    if spectrum.p <= 0.0 {
        return Err(Error::Domain(format!(
            "period map: discriminant not positive at ({m}, {ell})"
        )));
    }
    let param = EllipticParameter::new(m)?;
    let l2 = ell * ell;
    let mut d = [0.0; 3];
    let mut n = [0.0; 3];
    let mut one_minus_n = [0.0; 3];
    let mut pi = [0.0; 3];
    let mut theta = [0.0; 3];
    for j in 0..3 {
        d[j] = if j == 0 {
            stable_d1(m, ell, spectrum.ptilde)
        } else {
            2.0 * (1.0 + m) * l2 + 3.0 * spectrum.lambda[j]
        };
        n[j] = 6.0 * m * l2 / d[j];
        let bracket = match j {
            // D_1 - 6 m ell^2: two negative terms, no cancellation.
            0 => d[0] - 6.0 * m * l2,
            1 => middle_bracket(m, ell, spectrum.ptilde),
            _ => 2.0 * (1.0 - 2.0 * m) * l2 + 3.0 * spectrum.lambda[j],
        };
        one_minus_n[j] = bracket / d[j];
        pi[j] = elliptic::pi_complete_with_complement(n[j], one_minus_n[j], param);
        theta[j] = 6.0 * pi[j] / (std::f64::consts::PI * ell * d[j]);
    }
    Ok(ThetaParts {
        spectrum,
        d,
        n,
        one_minus_n,
        pi,
        theta,
    })
}

/// The period map at admissible characters.
pub fn theta(ch: Characters) -> Result<PeriodValue> {
    let parts = theta_parts(ch.m(), ch.ell())?;
    Ok(PeriodValue {
        theta1: parts.theta[0],
        theta2: parts.theta[1],
        theta3: parts.theta[2],
    })
}

/// Closed-form Jacobian of (theta2, theta3): each partial is a combination
/// a K(m) + b E(m) with rational-function coefficients in (m, ell, lambda).
pub fn theta_jacobian(ch: Characters) -> Result<Jacobian2x2> {
    let (m, ell) = (ch.m(), ch.ell());
    let parts = theta_parts(m, ell)?;
    let param = EllipticParameter::new(m)?;
    let kk = elliptic::ellip_k(param);
    let ee = elliptic::ellip_e(param);
    let r2 = 1.0 - m + m * m;
    let l2 = ell * ell;
    let l4 = l2 * l2;
    let pi_c = std::f64::consts::PI;
    let mut grad = [[0.0; 2]; 2];
    for (row, j) in [1usize, 2usize].iter().enumerate() {
        let lam = parts.spectrum.lambda[*j];
        let den = 4.0 * r2 * l4 - 9.0 * lam * lam;
        let phi11 = (9.0 * lam + 6.0 * (m - 1.0) * l2) / (pi_c * m * ell * den);
        let phi12 = (9.0 * lam + 6.0 * (2.0 * m - 1.0) * l2) / (pi_c * (m - 1.0) * m * ell * den);
        let phi21 = (18.0 * lam + 12.0 * (m - 2.0) * l2) / (pi_c * l2 * den);
        let phi22 = 36.0 / (pi_c * den);
        grad[row][0] = phi11 * kk + phi12 * ee;
        grad[row][1] = phi21 * kk + phi22 * ee;
    }
    Ok(Jacobian2x2 {
        dm_theta2: grad[0][0],
        dl_theta2: grad[0][1],
        dm_theta3: grad[1][0],
        dl_theta3: grad[1][1],
    })
}

/// Common limit of theta2 and theta3 on the lower edge of the admissible
/// domain, in closed form. Strictly decreasing, from 1/(2 sqrt 3) at m = 0
/// down to 1/4 at m = 1.
pub fn vartheta(m: f64) -> Result<f64> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::Domain(format!("vartheta: m = {m} outside (0,1)")));
    }
    let r2 = 1.0 - m + m * m;
    let r = r2.sqrt();
    // n = m + 1 - R and 1 - n = R - m, in forms stable at both endpoints.
    let n = 3.0 * m / (1.0 + m + r);
    let one_minus_n = (1.0 - m) / (r + m);
    let param = EllipticParameter::new(m)?;
    let pi_n = elliptic::pi_complete_with_complement(n, one_minus_n, param);
    // phi^2 = 2R^3 - X_m; both terms approach 2 as m -> 0, so below m = 1/2
    // switch to the equal form 27 m^2 (1-m)^2 / (2R^3 + X_m), whose
    // denominator is safe there (it cancels at the m -> 1 end instead).
    let phi2 = if m < 0.5 {
        27.0 * m * m * (1.0 - m) * (1.0 - m) / (2.0 * r * r2 + x_cubic(m))
    } else {
        2.0 * r * r2 - x_cubic(m)
    };
    Ok(3.0 * (1.0 - m) * m * pi_n / (std::f64::consts::PI * (m + 1.0 + r) * phi2.sqrt()))
}

/// Strict membership in the open target region
/// { x^2 + xy + y^2 < 1/4, x - y > 0, x + y > 1/2 }.
pub fn in_monodromic_domain(pt: &MonodromicPoint) -> bool {
    let (x, y) = (pt.q2, pt.q3);
    x * x + x * y + y * y < 0.25 && x - y > 0.0 && x + y > 0.5
}

/// Exact-arithmetic version of the membership test for rational targets.
pub fn in_monodromic_domain_exact(q2: &BigRational, q3: &BigRational) -> bool {
    let quarter = BigRational::new(BigInt::from(1), BigInt::from(4));
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let quad = q2 * q2 + q2 * q3 + q3 * q3;
    quad < quarter && q2 > q3 && q2 + q3 > half
}

/// The elliptical boundary arc between the two non-segment vertices,
/// parameterized over [0, 1]; t = 0 is the symmetric vertex
/// (1/(2 sqrt 3), 1/(2 sqrt 3)), t = 1 the vertex (1/2, 0), where the raw
/// expression degenerates to 0/0 and the limit value is substituted.
pub fn boundary_arc_sigma23(t: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("boundary arc: t = {t} outside [0,1]")));
    }
    if t == 1.0 {
        return Ok((0.5, 0.0));
    }
    let s3 = 3.0_f64.sqrt();
    let a = ((1.0 - 2.0 * t).asin() / 3.0).sin();
    let b = ((1.0 - 2.0 * t).asin() / 3.0).cos();
    let root = (1.0 - t).sqrt();
    let x = root / (s3 * (1.0 + 2.0 * a));
    let y = root / (3.0 * b + s3 * (1.0 - a));
    Ok((x, y))
}

/// Scale profile of the lower-edge reparametrization: (m, h) in the unit
/// square maps to characters (m, (1-h)^{-1/6} frak_l(m)).
fn reparam_ell(m: f64, h: f64) -> Result<f64> {
    Ok((1.0 - h).powf(-1.0 / 6.0) * dynamics::frak_l(m)?)
}

/// d frak_l / dm, from logarithmic differentiation of the closed form.
fn frak_l_prime(m: f64) -> Result<f64> {
    let fl = dynamics::frak_l(m)?;
    let r2 = 1.0 - m + m * m;
    let r = r2.sqrt();
    let den = x_cubic(m) + 2.0 * r * r2;
    let den_prime = 6.0 * m * m - 6.0 * m - 3.0 + 3.0 * r * (2.0 * m - 1.0);
    Ok(-fl / 6.0 * den_prime / den)
}

/// Period map through the unit-square reparametrization; h -> 0 approaches
/// the common edge value, h -> 1 the far end (1/2, 0).
pub fn modified_theta(m: f64, h: f64) -> Result<PeriodValue> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::Domain(format!("modified_theta: h = {h} outside (0,1)")));
    }
    let ell = reparam_ell(m, h)?;
    let parts = theta_parts(m, ell)?;
    Ok(PeriodValue {
        theta1: parts.theta[0],
        theta2: parts.theta[1],
        theta3: parts.theta[2],
    })
}

/// Residual of the square-coordinate system at (m, h) against a target.
fn square_residual(m: f64, h: f64, target: &MonodromicPoint) -> Result<[f64; 2]> {
    let v = modified_theta(m, h)?;
    Ok([v.theta2 - target.q2, v.theta3 - target.q3])
}

fn norm2(r: &[f64; 2]) -> f64 {
    r[0].hypot(r[1])
}

/// Invert the period map on the open target region with the default budget.
pub fn invert_theta(target: &MonodromicPoint, tol: f64) -> Result<Characters> {
    invert_theta_with(target, tol, crate::tol::shared())
}

/// Inversion worker: damped Newton in the unit-square coordinates with the
/// closed-form Jacobian, seeded from a coarse grid; falls back to nested
/// bisection riding the proven monotonicity of the two components. Targets
/// on or within `tols.boundary_margin` of the boundary are rejected.
pub fn invert_theta_with(
    target: &MonodromicPoint,
    tol: f64,
    tols: &Tolerances,
) -> Result<Characters> {
    let (x, y) = (target.q2, target.q3);
    let margin = tols.boundary_margin;
    let interior = 0.25 - (x * x + x * y + y * y) > margin
        && x - y > margin
        && x + y - 0.5 > margin;
    if !interior {
        return Err(Error::OutsideDomain(format!(
            "target ({x}, {y}) is outside the open region or within {margin:.1e} of its boundary"
        )));
    }

    // Coarse seed over the unit square.
    let mut best = (f64::INFINITY, 0.5, 0.5);
    for i in 0..24 {
        let m = (i as f64 + 0.5) / 24.0;
        for j in 0..24 {
            let h = (j as f64 + 0.5) / 24.0;
            if let Ok(r) = square_residual(m, h, target) {
                let score = norm2(&r);
                if score < best.0 {
                    best = (score, m, h);
                }
            }
        }
    }

    let (mut m, mut h) = (best.1, best.2);
    let mut residual = square_residual(m, h, target)?;
    for _ in 0..tols.newton_max_iter {
        if residual[0].abs().max(residual[1].abs()) <= tol {
            let ell = reparam_ell(m, h)?;
            return Characters::new(m, ell);
        }
        let ell = reparam_ell(m, h)?;
        let jac = theta_jacobian(Characters::new(m, ell)?)?;
        // Chain rule through (m, h) -> (m, ell).
        let dl_dm = (1.0 - h).powf(-1.0 / 6.0) * frak_l_prime(m)?;
        let dl_dh = (1.0 - h).powf(-7.0 / 6.0) / 6.0 * dynamics::frak_l(m)?;
        let a11 = jac.dm_theta2 + jac.dl_theta2 * dl_dm;
        let a12 = jac.dl_theta2 * dl_dh;
        let a21 = jac.dm_theta3 + jac.dl_theta3 * dl_dm;
        let a22 = jac.dl_theta3 * dl_dh;
        let det = a11 * a22 - a12 * a21;
        if det.abs() < 1e-300 || !det.is_finite() {
            break;
        }
        let dm = -(a22 * residual[0] - a12 * residual[1]) / det;
        let dh = -(-a21 * residual[0] + a11 * residual[1]) / det;
        // Damping: halve until the residual actually shrinks.
        let mut accepted = false;
        let mut step = 1.0;
        for _ in 0..40 {
            let m_try = (m + step * dm).clamp(1e-7, 1.0 - 1e-7);
            let h_try = (h + step * dh).clamp(1e-7, 1.0 - 1e-7);
            if let Ok(r_try) = square_residual(m_try, h_try, target) {
                if norm2(&r_try) < norm2(&residual) {
                    m = m_try;
                    h = h_try;
                    residual = r_try;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if residual[0].abs().max(residual[1].abs()) <= tol {
        let ell = reparam_ell(m, h)?;
        return Characters::new(m, ell);
    }

    bisection_fallback(target, tol, tols)
}

/// For fixed m, theta2 grows strictly along h; solve theta2 = q2 by
/// bisection (no solution signals m below the feasible range). The outer
/// level uses that theta3 along the theta2 level set decreases strictly
/// with m.
fn inner_h_for_theta2(m: f64, q2: f64, tol: f64) -> Result<Option<f64>> {
    let (mut lo, mut hi) = (1e-12, 1.0 - 1e-12);
    let at = |h: f64| -> Result<f64> { Ok(modified_theta(m, h)?.theta2 - q2) };
    if at(lo)? > 0.0 {
        return Ok(None);
    }
    if at(hi)? < 0.0 {
        return Ok(None);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if at(mid)? <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 || (at(mid)?).abs() < tol * 1e-3 {
            break;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

fn bisection_fallback(
    target: &MonodromicPoint,
    tol: f64,
    tols: &Tolerances,
) -> Result<Characters> {
    let (q2, q3) = (target.q2, target.q3);
    // g(m) = theta3 on the theta2 = q2 level curve, strictly decreasing;
    // m with no level point counts as "too small".
    let g = |m: f64| -> Result<Option<f64>> {
        match inner_h_for_theta2(m, q2, tol)? {
            None => Ok(None),
            Some(h) => Ok(Some(modified_theta(m, h)?.theta3)),
        }
    };
    let (mut lo, mut hi) = (1e-9, 1.0 - 1e-9);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let value = g(mid)?;
        match value {
            None => lo = mid,
            Some(v) if v > q3 => lo = mid,
            Some(_) => hi = mid,
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let m = 0.5 * (lo + hi);
    let h = inner_h_for_theta2(m, q2, tol)?.ok_or_else(|| {
        Error::Convergence(format!("no level point for theta2 = {q2} at m = {m}"))
    })?;
    let residual = square_residual(m, h, target)?;
    if residual[0].abs().max(residual[1].abs()) <= tol {
        Characters::new(m, reparam_ell(m, h)?)
    } else {
        Err(Error::Convergence(format!(
            "inversion stalled at ({m}, {h}) with residual ({}, {}) vs tol {tol}; \
             budget {} Newton iterations",
            residual[0], residual[1], tols.newton_max_iter
        )))
    }
}
