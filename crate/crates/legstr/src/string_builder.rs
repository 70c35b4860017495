//! Explicit parameterizations of the closed critical curves: the symmetric
//! configuration attached to a character pair, its monodromy and dual, the
//! Heisenberg chart, and the constant-curvature family on cyclides.
//!
//! The symmetric configuration is assembled from the momentum spectrum. Each
//! homogeneous component pairs one eigenvalue branch with one amplitude
//! factor sqrt(4 kappa + 3 lambda_j) and one unit phase e^{-i Phi_j}; the
//! component coefficients
//!
//!   r_1 = sqrt(6) / sqrt((l3 - l1)(l3 - l2)),   paired with lambda_3,
//!   r_2 = sqrt(6) / sqrt((l3 - l2)(l2 - l1)),   paired with lambda_2,
//!   r_3 = sqrt(6) / sqrt((l3 - l1)(l2 - l1)),   paired with lambda_1,
//!
//! are the unique weights (up to torus phases) for which the combination is
//! simultaneously a null line field and tangent to the contact distribution:
//! both bilinear identities reduce to the same telescoping sum of eigenvalue
//! differences. The first two amplitude factors are positive on the whole
//! admissible region; the third is negative and carries a fixed imaginary
//! square root, the continuous determination.
//!
//! Phases are exact: Phi_j(s) is the third-kind integral with characteristic
//! n_j extended from one quarter wave to the line by its additive
//! quasi-period, never by wrapping the amplitude. One wave advances Phi_j by
//! exactly -2 pi Theta_j, which is what closes the curve when the rotation
//! numbers are rational.

use nalgebra::Matrix3;
use num_complex::Complex64 as C;

use crate::dynamics::{Characters, CurvatureProfile, Spectrum};
use crate::elliptic::{self, EllipticParameter};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::moduli::CharacteristicNumbers;
use crate::period_map::{self, MonodromicPoint, ThetaParts};
use crate::quad;
use crate::space::{self, CMat, CVec};

/// How far from a lift's weighted norm the pseudo-Hermitian square may sit.
pub fn null_residual(z: &CVec) -> f64 {
    let n2 = z.iter().map(|x| x.norm_sqr()).sum::<f64>();
    if n2 == 0.0 {
        return f64::INFINITY;
    }
    space::form(z, z).norm() / n2
}

/// Normalized contact-tangency defect of a lift and its derivative.
pub fn legendrian_residual(z: &CVec, dz: &CVec) -> f64 {
    let nz = z.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let nd = dz.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if nz == 0.0 || nd == 0.0 {
        return f64::INFINITY;
    }
    space::form(z, dz).norm() / (nz * nd)
}

/// Magnitudes of the diagonalizing-frame components of a lift, scaled by its
/// norm. The second entry measures the distance from the first symmetry
/// axis; the curve construction keeps it strictly positive.
pub fn frame_component_magnitudes(z: &CVec) -> [f64; 3] {
    let w = space::matrix_u_inv() * z;
    let n = z.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    [w[0].norm() / n, w[1].norm() / n, w[2].norm() / n]
}

// ---------------------------------------------------------------------------
// Heisenberg chart
// ---------------------------------------------------------------------------

/// Chart map [z1, z2, z3] -> (Re(z2/z1), Im(z2/z1), Re(z3/z1)).
pub fn heisenberg_projection(z: &CVec) -> Result<[f64; 3]> {
    let threshold = crate::tol::shared().projection_singularity;
    let n = z.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if n == 0.0 || z[0].norm() < threshold * n {
        return Err(Error::Singularity(format!(
            "projection at the point at infinity: |z1|/|z| = {:.3e}",
            z[0].norm() / n
        )));
    }
    let w = z[1] / z[0];
    let u = z[2] / z[0];
    Ok([w.re, w.im, u.re])
}

/// Chart inverse (x, y, u) -> [1, x + iy, u + i(x^2 + y^2)/2]; the image is
/// a null line by construction.
pub fn heisenberg_lift(x: f64, y: f64, u: f64) -> CVec {
    CVec::new(
        C::new(1.0, 0.0),
        C::new(x, y),
        C::new(u, 0.5 * (x * x + y * y)),
    )
}

// ---------------------------------------------------------------------------
// Sampled curves
// ---------------------------------------------------------------------------

/// What a sampled curve is a sample of.
#[derive(Clone, Debug)]
pub enum SampleMeta {
    /// Symmetric configuration with characters (m, ell); `numbers` is set
    /// when the curve was built from a rational modulus and closes after
    /// `periods` curvature waves.
    Symmetric {
        m: f64,
        ell: f64,
        omega: f64,
        theta2: f64,
        theta3: f64,
        numbers: Option<CharacteristicNumbers>,
        periods: usize,
        dual: bool,
    },
    /// Constant-curvature solenoid with ratio a/b on the cyclide of radius r.
    ConstantCurvature {
        a: i64,
        b: i64,
        r: f64,
        c: f64,
        dual: bool,
    },
}

/// A discretized Legendrian curve: parameter values, homogeneous lifts, and
/// their Heisenberg-chart images, plus provenance.
#[derive(Clone, Debug)]
pub struct LegendrianCurveSample {
    pub params: Vec<f64>,
    pub lifts: Vec<CVec>,
    pub heisenberg: Vec<[f64; 3]>,
    pub meta: SampleMeta,
}

/// Multiply every lift by the order-four axis-exchange isometry and refresh
/// the chart images. Applying it twice more undoes it projectively.
pub fn dual_configuration(sample: &LegendrianCurveSample) -> Result<LegendrianCurveSample> {
    let l = space::matrix_l();
    let lifts: Vec<CVec> = sample.lifts.iter().map(|z| l * z).collect();
    let mut heisenberg = Vec::with_capacity(lifts.len());
    for z in &lifts {
        heisenberg.push(heisenberg_projection(z)?);
    }
    let meta = match &sample.meta {
        SampleMeta::Symmetric { m, ell, omega, theta2, theta3, numbers, periods, dual } => {
            SampleMeta::Symmetric {
                m: *m,
                ell: *ell,
                omega: *omega,
                theta2: *theta2,
                theta3: *theta3,
                numbers: numbers.clone(),
                periods: *periods,
                dual: !dual,
            }
        }
        SampleMeta::ConstantCurvature { a, b, r, c, dual } => SampleMeta::ConstantCurvature {
            a: *a,
            b: *b,
            r: *r,
            c: *c,
            dual: !dual,
        },
    };
    Ok(LegendrianCurveSample { params: sample.params.clone(), lifts, heisenberg, meta })
}

// ---------------------------------------------------------------------------
// The symmetric configuration
// ---------------------------------------------------------------------------

/// A symmetric-configuration curve with everything precomputed for pointwise
/// evaluation: spectrum, wave profile, third-kind constants, component
/// weights, and the lift normalization factor.
pub struct StringCurve {
    profile: CurvatureProfile,
    spectrum: Spectrum,
    parts: ThetaParts,
    param: EllipticParameter,
    /// Component weights r_1, r_2, r_3.
    r: [f64; 3],
    /// Global factor making det(G, G', G'') = i.
    scale: C,
}

/// Index of the eigenvalue branch carried by each homogeneous slot.
const SLOT_BRANCH: [usize; 3] = [2, 1, 0];

impl StringCurve {
    pub fn new(ch: Characters) -> Result<StringCurve> {
        let parts = period_map::theta_parts(ch.m(), ch.ell())?;
        let spectrum = parts.spectrum;
        let profile = CurvatureProfile::new(ch)?;
        let param = EllipticParameter::new(ch.m())?;
        let [l1, l2, l3] = spectrum.lambda;
        let d31 = l3 - l1;
        let d32 = l3 - l2;
        let d21 = l2 - l1;
        let r = [
            6.0_f64.sqrt() / (d31 * d32).sqrt(),
            6.0_f64.sqrt() / (d32 * d21).sqrt(),
            6.0_f64.sqrt() / (d31 * d21).sqrt(),
        ];
        let mut curve = StringCurve {
            profile,
            spectrum,
            parts,
            param,
            r,
            scale: C::new(1.0, 0.0),
        };
        // Determinant of the raw lift frame is constant in s (the frame
        // solves a traceless linear system), so one sample normalizes it.
        let jets = curve.lift_jet(0.0, 2);
        let det = Matrix3::from_columns(&[jets[0], jets[1], jets[2]]).determinant();
        if det.norm() == 0.0 {
            return Err(Error::Domain("degenerate lift frame".into()));
        }
        curve.scale = (C::i() / det).powf(1.0 / 3.0);
        Ok(curve)
    }

    pub fn characters(&self) -> Characters {
        self.profile.characters()
    }

    /// Least period of the curvature wave.
    pub fn omega(&self) -> f64 {
        self.profile.omega()
    }

    pub fn spectrum(&self) -> Spectrum {
        self.spectrum
    }

    /// Rotation numbers (Theta_1, Theta_2, Theta_3).
    pub fn rotation_numbers(&self) -> [f64; 3] {
        self.parts.theta
    }

    /// Unwound angular function Phi_j, j in 1..=3: zero at s = 0, advancing
    /// by exactly -2 pi Theta_j per curvature wave. Within one quarter wave
    /// it is the incomplete third-kind integral at the elliptic amplitude;
    /// whole half-waves contribute the complete integral twice.
    pub fn angular_phi(&self, j: usize, s: f64) -> f64 {
        assert!((1..=3).contains(&j), "angular index must be 1, 2, or 3");
        let b = j - 1;
        let ell = self.characters().ell();
        let am = elliptic::jacobi_am(ell * s, self.param);
        let half_waves = (am / std::f64::consts::PI).round();
        let rest = am - half_waves * std::f64::consts::PI;
        let inc = elliptic::pi_incomplete_with_complement(
            self.parts.n[b],
            self.parts.one_minus_n[b],
            rest,
            self.param,
        )
        .expect("amplitude reduced to a quarter wave");
        let extended = 2.0 * half_waves * self.parts.pi[b] + inc;
        -6.0 * extended / (ell * self.parts.d[b])
    }

    /// Homogeneous components before the global normalization.
    fn raw_components(&self, s: f64) -> CVec {
        let kappa = self.profile.kappa(s);
        let mut z = CVec::zeros();
        for slot in 0..3 {
            let b = SLOT_BRANCH[slot];
            let a = 4.0 * kappa + 3.0 * self.spectrum.lambda[b];
            let root = if b == 0 {
                C::new(0.0, (-a).max(0.0).sqrt())
            } else {
                C::new(a.max(0.0).sqrt(), 0.0)
            };
            let phase = C::from_polar(1.0, -self.angular_phi(b + 1, s));
            z[slot] = self.r[slot] * root * phase;
        }
        z
    }

    /// The normalized lift at s.
    pub fn lift(&self, s: f64) -> CVec {
        space::matrix_u() * self.raw_components(s) * self.scale
    }

    /// The lift and its first `order` derivatives at s, from exact series
    /// arithmetic on the wave profile: each component solves
    /// z' = z (A' + 12 i) / (2 A) with A = 4 kappa + 3 lambda, so jets of
    /// kappa produce jets of z with no differencing.
    pub fn lift_jet(&self, s: f64, order: usize) -> Vec<CVec> {
        let kj = self.profile.kappa_jet(s, order.max(1));
        let mut slot_jets: Vec<Jet> = Vec::with_capacity(3);
        for slot in 0..3 {
            let b = SLOT_BRANCH[slot];
            let derivs: Vec<C> = (0..=order.max(1))
                .map(|k| {
                    if k == 0 {
                        C::new(4.0 * kj[0] + 3.0 * self.spectrum.lambda[b], 0.0)
                    } else {
                        C::new(4.0 * kj[k], 0.0)
                    }
                })
                .collect();
            let a_jet = Jet::from_derivatives(&derivs);
            let a0 = a_jet.value().re;
            let root0 = if b == 0 {
                C::new(0.0, (-a0).sqrt())
            } else {
                C::new(a0.sqrt(), 0.0)
            };
            let sqrt_jet = a_jet.sqrt_with(root0);
            let dphi = a_jet.recip().scale(C::new(-6.0, 0.0));
            let phi_jet = dphi
                .formal_integral(C::new(self.angular_phi(b + 1, s), 0.0))
                .truncated(order.max(1));
            let phase_jet = phi_jet.scale(C::new(0.0, -1.0)).exp();
            slot_jets.push(
                sqrt_jet
                    .mul(&phase_jet)
                    .scale(C::new(self.r[slot], 0.0))
                    .truncated(order.max(1)),
            );
        }
        let u = space::matrix_u();
        (0..=order)
            .map(|k| {
                let z = CVec::new(
                    slot_jets[0].derivative(k),
                    slot_jets[1].derivative(k),
                    slot_jets[2].derivative(k),
                );
                u * z * self.scale
            })
            .collect()
    }

    /// Monodromy representative built from this curve's rotation numbers:
    /// conjugated torus element with angles (2 pi Theta_3, 2 pi Theta_2).
    pub fn monodromy(&self) -> CMat {
        monodromy_from_modulus(self.parts.theta[1], self.parts.theta[2])
    }

    /// Sample `periods` curvature waves at `samples_per_period` points each,
    /// half-open so a closed curve has no duplicate vertex.
    pub fn sample(
        &self,
        samples_per_period: usize,
        periods: usize,
        numbers: Option<CharacteristicNumbers>,
    ) -> Result<LegendrianCurveSample> {
        if samples_per_period == 0 || periods == 0 {
            return Err(Error::Domain(
                "sampling needs at least one point and one period".into(),
            ));
        }
        let omega = self.omega();
        let step = omega / samples_per_period as f64;
        let total = samples_per_period * periods;
        let params: Vec<f64> = (0..total).map(|i| i as f64 * step).collect();
        let lifts: Vec<CVec> = params.iter().map(|&s| self.lift(s)).collect();
        let mut heisenberg = Vec::with_capacity(total);
        for z in &lifts {
            heisenberg.push(heisenberg_projection(z)?);
        }
        let ch = self.characters();
        Ok(LegendrianCurveSample {
            params,
            lifts,
            heisenberg,
            meta: SampleMeta::Symmetric {
                m: ch.m(),
                ell: ch.ell(),
                omega,
                theta2: self.parts.theta[1],
                theta3: self.parts.theta[2],
                numbers,
                periods,
                dual: false,
            },
        })
    }
}

/// Unwound angular function for arbitrary characters; see
/// [`StringCurve::angular_phi`].
pub fn angular_phi(ch: Characters, j: usize, s: f64) -> Result<f64> {
    if !(1..=3).contains(&j) {
        return Err(Error::Domain(format!("angular index {j} not in 1..=3")));
    }
    Ok(StringCurve::new(ch)?.angular_phi(j, s))
}

/// Quadrature oracle for the angular function: adaptive integration of
/// -6 / (4 kappa + 3 lambda_j) from 0 to s.
pub fn angular_phi_quadrature(ch: Characters, j: usize, s: f64) -> Result<f64> {
    if !(1..=3).contains(&j) {
        return Err(Error::Domain(format!("angular index {j} not in 1..=3")));
    }
    let profile = CurvatureProfile::new(ch)?;
    let lambda = ch.spectrum().lambda[j - 1];
    let q = quad::integrate(
        |u| -6.0 / (4.0 * profile.kappa(u) + 3.0 * lambda),
        0.0,
        s,
        1e-13,
        1e-12,
    )?;
    Ok(q.value)
}

/// Closed form cross-checked against the quadrature oracle; fails with a
/// precision-loss error if the two routes disagree beyond 1e-8.
pub fn angular_phi_cross_checked(ch: Characters, j: usize, s: f64) -> Result<f64> {
    let closed = angular_phi(ch, j, s)?;
    let integrated = angular_phi_quadrature(ch, j, s)?;
    let gap = (closed - integrated).abs();
    if gap > crate::tol::shared().angular_crosscheck * (1.0 + closed.abs()) {
        return Err(Error::PrecisionLoss(format!(
            "angular function routes disagree by {gap:.3e} at j = {j}, s = {s}"
        )));
    }
    Ok(closed)
}

/// One open arc (a single curvature wave) for any admissible characters.
pub fn build_string(ch: Characters, samples_per_period: usize) -> Result<LegendrianCurveSample> {
    StringCurve::new(ch)?.sample(samples_per_period, 1, None)
}

/// Full pipeline from a rational modulus: recover the characters to 1e-11,
/// build the curve, and sample all its waves.
pub fn build_closed_string(
    numbers: &CharacteristicNumbers,
    samples_per_period: usize,
) -> Result<(StringCurve, LegendrianCurveSample)> {
    let (q2, q3) = numbers.modulus();
    let target = MonodromicPoint {
        q2: rational_to_f64(&q2),
        q3: rational_to_f64(&q3),
    };
    let ch = period_map::invert_theta(&target, 1e-11)?;
    let curve = StringCurve::new(ch)?;
    let sample = curve.sample(samples_per_period, numbers.n as usize, Some(numbers.clone()))?;
    Ok((curve, sample))
}

fn rational_to_f64(q: &num_rational::BigRational) -> f64 {
    let n: f64 = q.numer().to_string().parse().unwrap_or(f64::NAN);
    let d: f64 = q.denom().to_string().parse().unwrap_or(f64::NAN);
    n / d
}

// ---------------------------------------------------------------------------
// Monodromy
// ---------------------------------------------------------------------------

/// Monodromy representative for modulus (q2, q3): the torus element with
/// diagonal (e^{2 pi i q3}, e^{2 pi i q2}, e^{-2 pi i (q2+q3)}) in the
/// diagonalizing frame.
pub fn monodromy_from_modulus(q2: f64, q3: f64) -> CMat {
    use std::f64::consts::TAU;
    let d = CMat::from_diagonal(&CVec::new(
        C::from_polar(1.0, TAU * q3),
        C::from_polar(1.0, TAU * q2),
        C::from_polar(1.0, -TAU * (q2 + q3)),
    ));
    space::matrix_u() * d * space::matrix_u_inv()
}

/// The two commuting factors of the monodromy attached to the fractions
/// u = h1/k1 and w = h2/k2: a corner rotation block of order k1 and a
/// diagonal axis rotation of order k2. Their product is the monodromy of
/// the modulus with q2 = (u + 2w)/3, q3 = (u - w)/3.
pub fn monodromy_factors(u: f64, w: f64) -> (CMat, CMat) {
    use std::f64::consts::PI;
    let phase = C::from_polar(1.0, -PI * u / 3.0);
    let (s, c) = (PI * u).sin_cos();
    let mut first = CMat::zeros();
    first[(0, 0)] = phase * c;
    first[(2, 2)] = phase * c;
    first[(0, 2)] = phase * s;
    first[(2, 0)] = -phase * s;
    first[(1, 1)] = C::from_polar(1.0, 2.0 * PI * u / 3.0);
    let second = space::rot_oz(2.0 * PI * w);
    (first, second)
}

// ---------------------------------------------------------------------------
// Constant-curvature solenoids
// ---------------------------------------------------------------------------

/// Elliptical profile of the cyclide of radius r, traced by the angle theta.
pub fn cyclide_profile(r: f64, theta: f64) -> [f64; 3] {
    let r2 = r * r;
    let r4 = r2 * r2;
    let (s, c) = theta.sin_cos();
    let den = 4.0 + r4 + (4.0 - r4) * c;
    [
        2.0 * r * (2.0 + r2 + (2.0 - r2) * c) / den,
        2.0 * r * (2.0 - r2) * s / den,
        (r4 - 4.0) * s / den,
    ]
}

/// The closed constant-curvature Legendrian with ratio q = a/b > 1: the
/// cyclide profile of radius r(q) composed with an axis rotation of rate
/// q, closing after b turns of the profile.
pub struct ConstantCurvatureCurve {
    pub a: i64,
    pub b: i64,
    pub r: f64,
    pub c: f64,
}

impl ConstantCurvatureCurve {
    pub fn new(a: i64, b: i64) -> Result<ConstantCurvatureCurve> {
        use num_integer::Integer;
        if b < 1 || a <= b {
            return Err(Error::Domain(format!(
                "constant-curvature ratio needs a > b >= 1, got {a}/{b}"
            )));
        }
        if a.gcd(&b) != 1 {
            return Err(Error::Domain(format!("ratio {a}/{b} is not reduced")));
        }
        let q = a as f64 / b as f64;
        Ok(ConstantCurvatureCurve {
            a,
            b,
            r: crate::moduli::r_of_q(q)?,
            c: crate::moduli::c_of_q(q)?,
        })
    }

    /// Chart position at parameter t: profile point rotated by (a/b) t.
    pub fn heisenberg(&self, t: f64) -> [f64; 3] {
        let p = cyclide_profile(self.r, t);
        let psi = self.a as f64 / self.b as f64 * t;
        let (s, c) = psi.sin_cos();
        [c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]]
    }

    pub fn lift(&self, t: f64) -> CVec {
        let p = self.heisenberg(t);
        heisenberg_lift(p[0], p[1], p[2])
    }

    /// Lift and derivatives from series arithmetic on the chart formulas.
    pub fn lift_jet(&self, t: f64, order: usize) -> Vec<CVec> {
        let tj = Jet::variable(t, order);
        let rot = tj.scale(C::new(0.0, 1.0)).exp();
        let (ct, st) = (rot.re(), rot.im());
        let r2 = self.r * self.r;
        let r4 = r2 * r2;
        let den = ct
            .scale(C::new(4.0 - r4, 0.0))
            .add(&Jet::constant(C::new(4.0 + r4, 0.0), order));
        let inv = den.recip();
        let x = ct
            .scale(C::new(2.0 - r2, 0.0))
            .add(&Jet::constant(C::new(2.0 + r2, 0.0), order))
            .scale(C::new(2.0 * self.r, 0.0))
            .mul(&inv)
            .truncated(order);
        let y = st
            .scale(C::new(2.0 * self.r * (2.0 - r2), 0.0))
            .mul(&inv)
            .truncated(order);
        let z = st
            .scale(C::new(r4 - 4.0, 0.0))
            .mul(&inv)
            .truncated(order);
        let q = self.a as f64 / self.b as f64;
        let spin = tj.scale(C::new(0.0, q)).exp();
        let (cp, sp) = (spin.re(), spin.im());
        let big_x = cp.mul(&x).sub(&sp.mul(&y)).truncated(order);
        let big_y = sp.mul(&x).add(&cp.mul(&y)).truncated(order);
        let w = big_x.add(&big_y.scale(C::i()));
        let half_sq = big_x
            .mul(&big_x)
            .add(&big_y.mul(&big_y))
            .scale(C::new(0.0, 0.5))
            .truncated(order);
        let third = z.add(&half_sq);
        (0..=order)
            .map(|k| {
                CVec::new(
                    if k == 0 { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) },
                    w.derivative(k),
                    third.derivative(k),
                )
            })
            .collect()
    }

    /// Sample the whole closed curve: b turns of the profile, half-open.
    pub fn sample(&self, samples_per_turn: usize) -> Result<LegendrianCurveSample> {
        use std::f64::consts::TAU;
        if samples_per_turn == 0 {
            return Err(Error::Domain("sampling needs at least one point per turn".into()));
        }
        let total = samples_per_turn * self.b as usize;
        let step = TAU / samples_per_turn as f64;
        let params: Vec<f64> = (0..total).map(|i| i as f64 * step).collect();
        let heisenberg: Vec<[f64; 3]> = params.iter().map(|&t| self.heisenberg(t)).collect();
        let lifts: Vec<CVec> = heisenberg
            .iter()
            .map(|p| heisenberg_lift(p[0], p[1], p[2]))
            .collect();
        Ok(LegendrianCurveSample {
            params,
            lifts,
            heisenberg,
            meta: SampleMeta::ConstantCurvature {
                a: self.a,
                b: self.b,
                r: self.r,
                c: self.c,
                dual: false,
            },
        })
    }
}

/// Convenience wrapper: build and sample the ratio a/b solenoid.
pub fn constant_curvature_curve(
    a: i64,
    b: i64,
    samples_per_turn: usize,
) -> Result<LegendrianCurveSample> {
    ConstantCurvatureCurve::new(a, b)?.sample(samples_per_turn)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::projective_distance;

    fn anchor() -> StringCurve {
        StringCurve::new(Characters::new(0.894052, 2.78109).unwrap()).unwrap()
    }

    #[test]
    fn angular_functions_vanish_at_zero_and_jump_by_rotation_numbers() {
        let curve = anchor();
        let theta = curve.rotation_numbers();
        let omega = curve.omega();
        for j in 1..=3 {
            assert_eq!(curve.angular_phi(j, 0.0), 0.0);
            let jump = curve.angular_phi(j, omega);
            assert!(
                (jump + std::f64::consts::TAU * theta[j - 1]).abs() < 1e-9,
                "wave advance of Phi_{j} is {jump}, want {}",
                -std::f64::consts::TAU * theta[j - 1]
            );
            for &s in &[0.3, 1.7, 4.4] {
                let a = curve.angular_phi(j, s + omega) - curve.angular_phi(j, s);
                assert!((a + std::f64::consts::TAU * theta[j - 1]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn lifts_are_null_and_legendrian() {
        let curve = anchor();
        let omega = curve.omega();
        for k in 0..40 {
            let s = omega * k as f64 / 13.0;
            let jets = curve.lift_jet(s, 1);
            assert!(null_residual(&jets[0]) < 1e-10, "null residual at s = {s}");
            assert!(
                legendrian_residual(&jets[0], &jets[1]) < 1e-8,
                "contact residual at s = {s}"
            );
        }
    }

    #[test]
    fn lift_frame_determinant_is_normalized_everywhere() {
        let curve = anchor();
        for k in 0..7 {
            let s = curve.omega() * (0.13 + k as f64 / 7.0);
            let jets = curve.lift_jet(s, 2);
            let det = Matrix3::from_columns(&[jets[0], jets[1], jets[2]]).determinant();
            assert!(
                (det - C::i()).norm() < 1e-9,
                "det at s = {s} is {det} instead of i"
            );
        }
    }

    #[test]
    fn jets_match_divided_differences() {
        let curve = anchor();
        let s = 0.37 * curve.omega();
        let h = 1e-4;
        let jets = curve.lift_jet(s, 2);
        let plus = curve.lift(s + h);
        let minus = curve.lift(s - h);
        let center = curve.lift(s);
        for i in 0..3 {
            let fd1 = (plus[i] - minus[i]) / (2.0 * h);
            assert!((fd1 - jets[1][i]).norm() < 1e-6 * (1.0 + jets[1][i].norm()));
            let fd2 = (plus[i] - 2.0 * center[i] + minus[i]) / (h * h);
            assert!((fd2 - jets[2][i]).norm() < 1e-4 * (1.0 + jets[2][i].norm()));
        }
    }

    #[test]
    fn chart_round_trips() {
        let origin = CVec::new(C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0));
        assert_eq!(heisenberg_projection(&origin).unwrap(), [0.0, 0.0, 0.0]);
        let t = 2.0;
        let cycle = CVec::new(C::new(1.0, 0.0), C::new(t, 0.0), C::new(0.0, t * t / 2.0));
        let p = heisenberg_projection(&cycle).unwrap();
        assert!((p[0] - t).abs() < 1e-15 && p[1].abs() < 1e-15 && p[2].abs() < 1e-15);
        let back = heisenberg_projection(&heisenberg_lift(0.3, -0.7, 1.1)).unwrap();
        assert!((back[0] - 0.3).abs() < 1e-14);
        assert!((back[1] + 0.7).abs() < 1e-14);
        assert!((back[2] - 1.1).abs() < 1e-14);
        let infinity = CVec::new(C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0));
        assert!(heisenberg_projection(&infinity).is_err());
    }

    #[test]
    fn lift_images_are_null() {
        let z = heisenberg_lift(0.4, -1.2, 0.9);
        assert!(null_residual(&z) < 1e-16);
    }

    #[test]
    fn monodromy_factors_compose_and_match_the_axis_rotation() {
        use std::f64::consts::PI;
        for (u, w) in [(5.0 / 7.0, 1.0 / 7.0), (2.0 / 3.0, 2.0 / 9.0)] {
            let q2 = (u + 2.0 * w) / 3.0;
            let q3 = (u - w) / 3.0;
            let whole = monodromy_from_modulus(q2, q3);
            let (first, second) = monodromy_factors(u, w);
            let mut diff: f64 = 0.0;
            let prod = first * second;
            for i in 0..3 {
                for j in 0..3 {
                    diff = diff.max((prod[(i, j)] - whole[(i, j)]).norm());
                }
            }
            assert!(diff < 1e-12, "factorization defect {diff} at u = {u}");
            let rot = space::rot_oz(2.0 * PI * w);
            let mut axis_diff: f64 = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    axis_diff = axis_diff.max((second[(i, j)] - rot[(i, j)]).norm());
                }
            }
            assert!(axis_diff < 1e-15);
        }
    }

    #[test]
    fn monodromy_has_projective_order_n() {
        let whole = monodromy_from_modulus(1.0 / 3.0, 4.0 / 21.0);
        let mut acc = CMat::identity();
        for k in 1..=7 {
            acc *= whole;
            let d = space::projective_matrix_distance(&acc, &CMat::identity());
            if k < 7 {
                assert!(d > 0.1, "power {k} too close to the identity");
            } else {
                assert!(d < 1e-9, "power 7 misses the identity by {d}");
            }
        }
    }

    #[test]
    fn four_duals_return_the_original() {
        let curve = anchor();
        let sample = curve.sample(16, 1, None).unwrap();
        let once = dual_configuration(&sample).unwrap();
        match once.meta {
            SampleMeta::Symmetric { dual, .. } => assert!(dual),
            _ => panic!("metadata variant changed"),
        }
        let twice = dual_configuration(&once).unwrap();
        // The exchange isometry has order four, so two duals are a half
        // turn, not the identity.
        assert!(projective_distance(&sample.lifts[3], &twice.lifts[3]) > 0.1);
        let four = dual_configuration(&dual_configuration(&twice).unwrap()).unwrap();
        for (a, b) in sample.lifts.iter().zip(&four.lifts) {
            assert!(projective_distance(a, b) < 1e-12);
        }
    }

    #[test]
    fn solenoid_profile_closes_and_lifts_are_null() {
        use std::f64::consts::TAU;
        let curve = ConstantCurvatureCurve::new(5, 3).unwrap();
        for k in 0..9 {
            let t = 0.7 * k as f64;
            let p0 = curve.heisenberg(t);
            let p1 = curve.heisenberg(t + TAU * curve.b as f64);
            for i in 0..3 {
                assert!((p0[i] - p1[i]).abs() < 1e-10);
            }
            assert!(null_residual(&curve.lift(t)) < 1e-15);
        }
        assert!(ConstantCurvatureCurve::new(3, 3).is_err());
        assert!(ConstantCurvatureCurve::new(6, 3).is_err());
    }

    #[test]
    fn solenoid_lifts_are_legendrian_only_at_the_matched_radius() {
        let curve = ConstantCurvatureCurve::new(5, 3).unwrap();
        for k in 0..25 {
            let t = 0.11 + 0.9 * k as f64;
            let jets = curve.lift_jet(t, 1);
            assert!(
                legendrian_residual(&jets[0], &jets[1]) < 1e-12,
                "contact residual at t = {t}"
            );
        }
        // A detuned radius must break tangency: same profile, wrong spin.
        let detuned = ConstantCurvatureCurve { a: 5, b: 3, r: 0.9 * curve.r, c: curve.c };
        let jets = detuned.lift_jet(0.4, 1);
        assert!(legendrian_residual(&jets[0], &jets[1]) > 1e-3);
    }

    #[test]
    fn solenoid_jets_match_divided_differences() {
        let curve = ConstantCurvatureCurve::new(7, 6).unwrap();
        let t = 1.234;
        let h = 1e-4;
        let jets = curve.lift_jet(t, 2);
        let plus = curve.lift(t + h);
        let minus = curve.lift(t - h);
        let center = curve.lift(t);
        for i in 0..3 {
            let fd1 = (plus[i] - minus[i]) / (2.0 * h);
            assert!((fd1 - jets[1][i]).norm() < 1e-6 * (1.0 + jets[1][i].norm()));
            let fd2 = (plus[i] - 2.0 * center[i] + minus[i]) / (h * h);
            assert!((fd2 - jets[2][i]).norm() < 1e-4 * (1.0 + jets[2][i].norm()));
        }
    }
}
