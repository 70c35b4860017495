//! Elliptic integrals and Jacobi functions in the squared-modulus parameter.
//!
//! Everything is built on the Carlson symmetric forms RF, RC, RD, RJ evaluated
//! by the duplication algorithm. The squared modulus `m` (never the modulus
//! `k`) is the parameter throughout the crate. Legendre forms:
//!
//! * K(m)  = RF(0, 1-m, 1)
//! * E(m)  = RF(0, 1-m, 1) - (m/3) RD(0, 1-m, 1)
//! * Pi(n, m) = RF(0, 1-m, 1) + (n/3) RJ(0, 1-m, 1, 1-n)
//! * Pi(n; phi | m) = s RF(c^2, 1-m s^2, 1) + (n/3) s^3 RJ(c^2, 1-m s^2, 1, 1-n s^2)
//!   with s = sin(phi), valid on |phi| <= pi/2; range extension beyond that is
//!   the caller's business (quasi-periodicity supplies it).
//!
//! The amplitude and sn/cn/dn come from a descending Gauss transformation for
//! sn on [0, K], with quarter-period folding; cn and dn are recovered as the
//! nonnegative roots they are on that interval.

use crate::error::{Error, Result};

/// Series-truncation thresholds of the Carlson duplication loops. With these
/// values the truncation error sits near 1e-16 relative, comfortably below
/// the 1e-14 contract of the kernels.
#[derive(Debug, Clone, Copy)]
pub struct KernelConfig {
    pub rf_errtol: f64,
    pub rc_errtol: f64,
    pub rd_errtol: f64,
    pub rj_errtol: f64,
    /// Below this squared modulus the sn ladder bottoms out on the small-m
    /// closed form (error O(m^2)).
    pub sn_small_m: f64,
}

pub const KERNEL: KernelConfig = KernelConfig {
    rf_errtol: 0.0025,
    rc_errtol: 0.0012,
    rd_errtol: 0.0015,
    rj_errtol: 0.0015,
    sn_small_m: 1e-12,
};

/// Squared modulus restricted to [0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticParameter(f64);

impl EllipticParameter {
    pub fn new(m: f64) -> Result<Self> {
        if !(m.is_finite() && (0.0..1.0).contains(&m)) {
            return Err(Error::Domain(format!("squared modulus m={m} outside [0,1)")));
        }
        Ok(EllipticParameter(m))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Characteristic of the third integral, any real strictly below 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicN(f64);

impl CharacteristicN {
    pub fn new(n: f64) -> Result<Self> {
        if !(n.is_finite() && n < 1.0) {
            return Err(Error::Domain(format!("characteristic n={n} must be < 1")));
        }
        Ok(CharacteristicN(n))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

// ---------------------------------------------------------------------------
// Carlson symmetric integrals, duplication algorithm.
// ---------------------------------------------------------------------------

fn rf_raw(mut x: f64, mut y: f64, mut z: f64) -> f64 {
    const C1: f64 = 1.0 / 24.0;
    const C2: f64 = 0.1;
    const C3: f64 = 3.0 / 44.0;
    const C4: f64 = 1.0 / 14.0;
    loop {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        let ave = (x + y + z) / 3.0;
        let dx = (ave - x) / ave;
        let dy = (ave - y) / ave;
        let dz = (ave - z) / ave;
        if dx.abs().max(dy.abs()).max(dz.abs()) < KERNEL.rf_errtol {
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            return (1.0 + (C1 * e2 - C2 - C3 * e3) * e2 + C4 * e3) / ave.sqrt();
        }
    }
}

fn rc_raw(mut x: f64, mut y: f64) -> f64 {
    const C1: f64 = 0.3;
    const C2: f64 = 1.0 / 7.0;
    const C3: f64 = 0.375;
    const C4: f64 = 9.0 / 22.0;
    loop {
        let lam = 2.0 * x.sqrt() * y.sqrt() + y;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        let ave = (x + 2.0 * y) / 3.0;
        let s = (y - ave) / ave;
        if s.abs() < KERNEL.rc_errtol {
            return (1.0 + s * s * (C1 + s * (C2 + s * (C3 + s * C4)))) / ave.sqrt();
        }
    }
}

fn rd_raw(mut x: f64, mut y: f64, mut z: f64) -> f64 {
    const C1: f64 = 3.0 / 14.0;
    const C2: f64 = 1.0 / 6.0;
    const C3: f64 = 9.0 / 22.0;
    const C4: f64 = 3.0 / 26.0;
    const C5: f64 = 0.25 * C3;
    const C6: f64 = 1.5 * C4;
    let mut sum = 0.0;
    let mut fac = 1.0;
    loop {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * (sy + sz) + sy * sz;
        sum += fac / (sz * (z + lam));
        fac *= 0.25;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        let ave = 0.2 * (x + y + 3.0 * z);
        let dx = (ave - x) / ave;
        let dy = (ave - y) / ave;
        let dz = (ave - z) / ave;
        if dx.abs().max(dy.abs()).max(dz.abs()) < KERNEL.rd_errtol {
            let ea = dx * dy;
            let eb = dz * dz;
            let ec = ea - eb;
            let ed = ea - 6.0 * eb;
            let ee = ed + ec + ec;
            return 3.0 * sum
                + fac
                    * (1.0
                        + ed * (-C1 + C5 * ed - C6 * dz * ee)
                        + dz * (C2 * ee + dz * (-C3 * ec + dz * C4 * ea)))
                    / (ave * ave.sqrt());
        }
    }
}

fn rj_raw(mut x: f64, mut y: f64, mut z: f64, mut p: f64) -> f64 {
    const C1: f64 = 3.0 / 14.0;
    const C2: f64 = 1.0 / 3.0;
    const C3: f64 = 3.0 / 22.0;
    const C4: f64 = 3.0 / 26.0;
    const C5: f64 = 0.75 * C3;
    const C6: f64 = 1.5 * C4;
    const C7: f64 = 0.5 * C2;
    const C8: f64 = C3 + C3;
    let mut sum = 0.0;
    let mut fac = 1.0;
    loop {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * (sy + sz) + sy * sz;
        let alpha = (p * (sx + sy + sz) + sx * sy * sz).powi(2);
        let beta = p * (p + lam).powi(2);
        sum += fac * rc_raw(alpha, beta);
        fac *= 0.25;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        p = 0.25 * (p + lam);
        let ave = 0.2 * (x + y + z + 2.0 * p);
        let dx = (ave - x) / ave;
        let dy = (ave - y) / ave;
        let dz = (ave - z) / ave;
        let dp = (ave - p) / ave;
        if dx.abs().max(dy.abs()).max(dz.abs()).max(dp.abs()) < KERNEL.rj_errtol {
            let ea = dx * (dy + dz) + dy * dz;
            let eb = dx * dy * dz;
            let ec = dp * dp;
            let ed = ea - 3.0 * ec;
            let ee = eb + 2.0 * dp * (ea - ec);
            return 3.0 * sum
                + fac
                    * (1.0
                        + ed * (-C1 + C5 * ed - C6 * ee)
                        + eb * (C7 + dp * (-C8 + dp * C4))
                        + dp * ea * (C2 - dp * C3)
                        - C2 * dp * ec)
                    / (ave * ave.sqrt());
        }
    }
}

fn nonneg(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(Error::Domain(format!("carlson argument {name}={v} must be >= 0")));
    }
    Ok(())
}

/// Symmetric integral of the first kind. At most one of x, y, z may vanish.
pub fn carlson_rf(x: f64, y: f64, z: f64) -> Result<f64> {
    nonneg("x", x)?;
    nonneg("y", y)?;
    nonneg("z", z)?;
    let zeros = [x, y, z].iter().filter(|v| **v == 0.0).count();
    if zeros > 1 {
        return Err(Error::Domain("RF needs at most one zero argument".into()));
    }
    Ok(rf_raw(x, y, z))
}

/// Degenerate symmetric integral RC(x, y) for y > 0.
pub fn carlson_rc(x: f64, y: f64) -> Result<f64> {
    nonneg("x", x)?;
    if !(y.is_finite() && y > 0.0) {
        return Err(Error::Domain(format!("RC argument y={y} must be > 0")));
    }
    Ok(rc_raw(x, y))
}

/// Degenerate third-kind integral RD(x, y, z) = RJ(x, y, z, z); z > 0 and at
/// most one of x, y zero.
pub fn carlson_rd(x: f64, y: f64, z: f64) -> Result<f64> {
    nonneg("x", x)?;
    nonneg("y", y)?;
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::Domain(format!("RD argument z={z} must be > 0")));
    }
    if x == 0.0 && y == 0.0 {
        return Err(Error::Domain("RD needs x + y > 0".into()));
    }
    Ok(rd_raw(x, y, z))
}

/// Symmetric integral of the third kind, real branch: p > 0, at most one of
/// x, y, z zero.
pub fn carlson_rj(x: f64, y: f64, z: f64, p: f64) -> Result<f64> {
    nonneg("x", x)?;
    nonneg("y", y)?;
    nonneg("z", z)?;
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::Domain(format!("RJ argument p={p} must be > 0 (real branch)")));
    }
    let zeros = [x, y, z].iter().filter(|v| **v == 0.0).count();
    if zeros > 1 {
        return Err(Error::Domain("RJ needs at most one zero argument".into()));
    }
    Ok(rj_raw(x, y, z, p))
}

// ---------------------------------------------------------------------------
// Legendre forms.
// ---------------------------------------------------------------------------

/// Complete integral of the first kind K(m).
pub fn ellip_k(m: EllipticParameter) -> f64 {
    rf_raw(0.0, 1.0 - m.get(), 1.0)
}

/// Complete integral of the second kind E(m).
pub fn ellip_e(m: EllipticParameter) -> f64 {
    let mm = m.get();
    rf_raw(0.0, 1.0 - mm, 1.0) - mm / 3.0 * rd_raw(0.0, 1.0 - mm, 1.0)
}

/// Complete integral of the third kind Pi(n, m), n < 1.
pub fn ellip_pi_complete(n: CharacteristicN, m: EllipticParameter) -> f64 {
    pi_complete_with_complement(n.get(), 1.0 - n.get(), m)
}

/// Same as [`ellip_pi_complete`] but with 1 - n supplied by the caller.
///
/// Near the upper boundary of the parameter region 1 - n underflows to zero
/// when formed naively from n; callers that know 1 - n to full precision pass
/// it here and the Carlson RJ receives an accurate fourth argument.
pub(crate) fn pi_complete_with_complement(n: f64, one_minus_n: f64, m: EllipticParameter) -> f64 {
    let mm = m.get();
    debug_assert!(one_minus_n > 0.0, "characteristic complement must be positive");
    if n < 0.0 {
        // Negative characteristic: RF and the RJ term nearly cancel as
        // n -> -inf (the value decays like pi / (2 sqrt(-n)) while both terms
        // stay order one). Fold onto the characteristic N = (m - n)/(1 - n)
        // in (m, 1), where every contribution is positive:
        //   Pi(n, m) = [ (m/N) K + (1 - m/N) Pi(N, m) ] / (1 - n),
        // with 1 - N = (1 - m)/(1 - n) and 1 - m/N = -n(1-m)/(m-n) formed
        // without subtraction.
        let big_n = (mm - n) / one_minus_n;
        let one_minus_big_n = (1.0 - mm) / one_minus_n;
        let weight = -n * (1.0 - mm) / (mm - n);
        let kk = rf_raw(0.0, 1.0 - mm, 1.0);
        let pi_big = pi_complete_with_complement(big_n, one_minus_big_n, m);
        return ((mm / big_n) * kk + weight * pi_big) / one_minus_n;
    }
    let rf = rf_raw(0.0, 1.0 - mm, 1.0);
    if n == 0.0 {
        return rf;
    }
    rf + n / 3.0 * rj_raw(0.0, 1.0 - mm, 1.0, one_minus_n)
}

/// Incomplete integral of the third kind Pi(n; phi | m) on |phi| <= pi/2.
pub fn ellip_pi_incomplete(n: CharacteristicN, phi: f64, m: EllipticParameter) -> Result<f64> {
    pi_incomplete_with_complement(n.get(), 1.0 - n.get(), phi, m)
}

pub(crate) fn pi_incomplete_with_complement(
    n: f64,
    one_minus_n: f64,
    phi: f64,
    m: EllipticParameter,
) -> Result<f64> {
    use std::f64::consts::FRAC_PI_2;
    if !phi.is_finite() || phi.abs() > FRAC_PI_2 + 1e-12 {
        return Err(Error::Domain(format!(
            "incomplete Pi amplitude phi={phi} outside [-pi/2, pi/2]; extend by quasi-periodicity at the call site"
        )));
    }
    let mm = m.get();
    let ph = phi.abs().min(FRAC_PI_2);
    let s = ph.sin();
    let cc = ph.cos().powi(2);
    let s2 = s * s;
    // Stable complements: 1 - m s^2 = (1-m) + m c^2, 1 - n s^2 = (1-n) + n c^2.
    let ym = (1.0 - mm) + mm * cc;
    let yn = one_minus_n + n * cc;
    let mut value = s * rf_raw(cc, ym, 1.0);
    if n != 0.0 && s != 0.0 {
        value += n / 3.0 * s * s2 * rj_raw(cc, ym, 1.0, yn);
    }
    Ok(if phi < 0.0 { -value } else { value })
}

// ---------------------------------------------------------------------------
// Parameter derivatives (closed forms used by the period-map Jacobian tests).
// ---------------------------------------------------------------------------

/// dK/dm = (E - (1-m) K) / (2 m (1-m)).
pub fn ellip_k_derivative(m: EllipticParameter) -> f64 {
    let mm = m.get();
    let k = ellip_k(m);
    let e = ellip_e(m);
    (e - (1.0 - mm) * k) / (2.0 * mm * (1.0 - mm))
}

/// dE/dm = (E - K) / (2 m).
pub fn ellip_e_derivative(m: EllipticParameter) -> f64 {
    let mm = m.get();
    (ellip_e(m) - ellip_k(m)) / (2.0 * mm)
}

/// (dPi/dn, dPi/dm) for the complete third integral.
///
/// The closed forms have removable singularities at n = 0 and n = m; callers
/// stay off those slices (the period map always does: its characteristics
/// never collide with the squared modulus).
pub fn ellip_pi_complete_derivatives(n: CharacteristicN, m: EllipticParameter) -> (f64, f64) {
    let nn = n.get();
    let mm = m.get();
    let k = ellip_k(m);
    let e = ellip_e(m);
    let pi = ellip_pi_complete(n, m);
    let dn = (nn * e + (mm - nn) * k + (nn * nn - mm) * pi)
        / (2.0 * (mm - nn) * (nn - 1.0) * nn);
    let dm = e / (2.0 * (mm - 1.0) * (nn - mm)) + pi / (2.0 * (nn - mm));
    (dn, dm)
}

// ---------------------------------------------------------------------------
// Jacobi amplitude and sn / cn / dn.
// ---------------------------------------------------------------------------

/// sn on the reduced interval [0, K(m)] by the descending Gauss ladder.
fn sn_core(u: f64, m: f64) -> f64 {
    let mut ladder = Vec::new();
    let mut mm = m;
    let mut uu = u;
    while mm > KERNEL.sn_small_m {
        let kp = (1.0 - mm).sqrt();
        let k1 = (1.0 - kp) / (1.0 + kp);
        ladder.push(k1);
        uu /= 1.0 + k1;
        mm = k1 * k1;
    }
    let (su, cu) = uu.sin_cos();
    let mut s = if mm == 0.0 { su } else { su - 0.25 * mm * (uu - su * cu) * cu };
    for &k1 in ladder.iter().rev() {
        s = (1.0 + k1) * s / (1.0 + k1 * s * s);
    }
    s
}

/// Jacobi sn, cn, dn at real argument; m in [0, 1).
pub fn jacobi_sn_cn_dn(u: f64, m: EllipticParameter) -> (f64, f64, f64) {
    let mm = m.get();
    if mm == 0.0 {
        let (s, c) = u.sin_cos();
        return (s, c, 1.0);
    }
    let k = ellip_k(m);
    let v = u.rem_euclid(4.0 * k);
    let (w, ssign, csign) = if v <= k {
        (v, 1.0, 1.0)
    } else if v <= 2.0 * k {
        (2.0 * k - v, 1.0, -1.0)
    } else if v <= 3.0 * k {
        (v - 2.0 * k, -1.0, -1.0)
    } else {
        (4.0 * k - v, -1.0, 1.0)
    };
    let s = sn_core(w, mm).clamp(0.0, 1.0);
    let c = (1.0 - s * s).max(0.0).sqrt();
    let d = (1.0 - mm * s * s).max(0.0).sqrt();
    (ssign * s, csign * c, d)
}

/// Jacobi amplitude am(u, m): the continuous increasing angle with
/// sn = sin(am), cn = cos(am); satisfies am(u + 2K) = am(u) + pi.
pub fn jacobi_am(u: f64, m: EllipticParameter) -> f64 {
    use std::f64::consts::PI;
    let mm = m.get();
    if mm == 0.0 {
        return u;
    }
    let k = ellip_k(m);
    let q = (u / (2.0 * k)).floor();
    let r = u - 2.0 * k * q;
    let (s, c, _) = jacobi_sn_cn_dn(r, m);
    q * PI + s.atan2(c)
}
