//! Differential invariants recomputed from curve jets, independently of how
//! the curve was constructed: normalized lifts, the two Fubini densities and
//! the strain density, total strain, the stress density whose vanishing
//! characterizes critical curves, and the reparametrization law.
//!
//! The verification logic never differentiates sampled polylines. Jets come
//! either from the closed-form recursions of the construction modules or, as
//! a fallback used only to validate the jet machinery itself, from high-order
//! central finite-difference stencils on exact curve positions.

use num_complex::Complex64 as C;

use crate::dynamics::Characters;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::quad;
use crate::space::{form, CVec};
use crate::string_builder::{
    ConstantCurvatureCurve, LegendrianCurveSample, SampleMeta, StringCurve,
};

/// Highest derivative order a jet source must provide.
pub const MAX_JET_ORDER: usize = 7;

/// Half-width of the finite-difference stencils; 13 symmetric nodes give at
/// least sixth-order accuracy for every derivative up to [`MAX_JET_ORDER`].
const STENCIL_HALF: usize = 6;

/// Provenance of a jet source, with the step for differenced ones.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AccuracyClass {
    Analytic,
    FiniteDifference { step: f64 },
}

/// A curve presented through its jets: a callable producing the lift and its
/// derivatives at any parameter value, to order at most [`MAX_JET_ORDER`].
pub struct CurveJet {
    eval: Box<dyn Fn(f64, usize) -> Vec<CVec> + Send + Sync>,
    accuracy: AccuracyClass,
}

impl CurveJet {
    /// Wrap closed-form jets.
    pub fn analytic<F>(f: F) -> CurveJet
    where
        F: Fn(f64, usize) -> Vec<CVec> + Send + Sync + 'static,
    {
        CurveJet { eval: Box::new(f), accuracy: AccuracyClass::Analytic }
    }

    /// Jets of the symmetric configuration, from its series recursion.
    pub fn from_string(curve: StringCurve) -> CurveJet {
        CurveJet::analytic(move |s, order| curve.lift_jet(s, order))
    }

    /// Jets of a constant-curvature solenoid.
    pub fn from_solenoid(curve: ConstantCurvatureCurve) -> CurveJet {
        CurveJet::analytic(move |t, order| curve.lift_jet(t, order))
    }

    /// Differenced jets from exact positions: 13-node central stencils of
    /// width `step`, weights from the divided-difference recursion.
    pub fn finite_difference<F>(f: F, step: f64) -> CurveJet
    where
        F: Fn(f64) -> CVec + Send + Sync + 'static,
    {
        let eval = move |t: f64, order: usize| -> Vec<CVec> {
            let nodes: Vec<f64> = (0..=2 * STENCIL_HALF)
                .map(|i| (i as f64 - STENCIL_HALF as f64) * step)
                .collect();
            let values: Vec<CVec> = nodes.iter().map(|&d| f(t + d)).collect();
            let w = difference_weights(0.0, &nodes, order);
            (0..=order)
                .map(|d| {
                    let mut acc = CVec::zeros();
                    for (j, v) in values.iter().enumerate() {
                        acc += v * C::new(w[d][j], 0.0);
                    }
                    acc
                })
                .collect()
        };
        CurveJet { eval: Box::new(eval), accuracy: AccuracyClass::FiniteDifference { step } }
    }

    pub fn accuracy(&self) -> AccuracyClass {
        self.accuracy
    }

    /// The lift and its first `order` derivatives at `t`.
    pub fn eval(&self, t: f64, order: usize) -> Result<Vec<CVec>> {
        if order > MAX_JET_ORDER {
            return Err(Error::Domain(format!(
                "jet order {order} exceeds the supported maximum {MAX_JET_ORDER}"
            )));
        }
        let jets = (self.eval)(t, order);
        debug_assert_eq!(jets.len(), order + 1);
        Ok(jets)
    }
}

/// Finite-difference weights for derivatives `0..=max_order` at `x0` on the
/// given nodes (Fornberg's recursion); `weights[d][j]` multiplies the sample
/// at `nodes[j]` in the approximation of the d-th derivative.
fn difference_weights(x0: f64, nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let m = max_order;
    let mut w = vec![vec![0.0_f64; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    w[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    w[k][i] = c1 * (k as f64 * w[k - 1][i - 1] - c5 * w[k][i - 1]) / c2;
                }
                w[0][i] = -c1 * c5 * w[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                w[k][j] = (c4 * w[k][j] - k as f64 * w[k - 1][j]) / c3;
            }
            w[0][j] = c4 * w[0][j] / c3;
        }
        c1 = c2;
    }
    w
}

/// Rescale a raw jet so the frame determinant det(G, G', G'') equals i, with
/// the scale's argument fixed in (-pi/3, pi/3] to resolve the cube-root
/// ambiguity. Input of order K yields output of order K - 2, because the
/// pointwise scale is itself a function of the parameter and its jet is read
/// off the determinant jet.
pub fn normalize_lift(raw: &[CVec]) -> Result<Vec<CVec>> {
    if raw.len() < 3 {
        return Err(Error::Domain(
            "normalization needs the lift jet to order at least 2".into(),
        ));
    }
    let order = raw.len() - 1;
    let out_order = order - 2;
    let comp: Vec<Jet> = (0..3)
        .map(|i| {
            let d: Vec<C> = raw.iter().map(|v| v[i]).collect();
            Jet::from_derivatives(&d)
        })
        .collect();
    let d1: Vec<Jet> = comp.iter().map(|g| g.formal_derivative()).collect();
    let d2: Vec<Jet> = d1.iter().map(|g| g.formal_derivative()).collect();
    let minor = |r: usize, s: usize| d1[r].mul(&d2[s]).sub(&d1[s].mul(&d2[r]));
    let det = comp[0]
        .mul(&minor(1, 2))
        .sub(&comp[1].mul(&minor(0, 2)))
        .add(&comp[2].mul(&minor(0, 1)))
        .truncated(out_order);
    let d0 = det.value();
    if d0.norm() < 1e-12 {
        return Err(Error::DegenerateTangent(format!(
            "frame determinant {:.3e} below the genericity threshold",
            d0.norm()
        )));
    }
    let w = det.recip().scale(C::i());
    // Principal cube root: argument lands in (-pi/3, pi/3].
    let f = w.cbrt_with(w.value().powf(1.0 / 3.0));
    let scaled: Vec<Jet> = comp
        .iter()
        .map(|g| f.mul(&g.truncated(out_order)).truncated(out_order))
        .collect();
    Ok((0..=out_order)
        .map(|k| CVec::new(scaled[0].derivative(k), scaled[1].derivative(k), scaled[2].derivative(k)))
        .collect())
}

/// Normalized jet of a curve at `t` to the requested order (the source is
/// asked for two extra derivatives).
pub fn normalized_jet(jet: &CurveJet, t: f64, order: usize) -> Result<Vec<CVec>> {
    normalize_lift(&jet.eval(t, order + 2)?)
}

/// The two Fubini densities and the strain density at one point.
#[derive(Clone, Copy, Debug)]
pub struct FubiniData {
    /// Cubic density; zero exactly at sextactic points.
    pub a: f64,
    /// Quadratic density; the curvature when the parameter is natural.
    pub b: f64,
    /// Strain density, the real cube root of |a|.
    pub s_density: f64,
}

/// Densities from a normalized jet of order at least 3.
pub fn fubini_densities(normalized: &[CVec]) -> Result<FubiniData> {
    if normalized.len() < 4 {
        return Err(Error::Domain(
            "Fubini densities need the normalized jet to order 3".into(),
        ));
    }
    let a = form(&normalized[3], &normalized[2]).im;
    let b = 0.5 * form(&normalized[2], &normalized[2]).re;
    Ok(FubiniData { a, b, s_density: a.abs().cbrt() })
}

/// Densities of a jet source at `t`.
pub fn fubini_at(jet: &CurveJet, t: f64) -> Result<FubiniData> {
    fubini_densities(&normalized_jet(jet, t, 3)?)
}

/// The stress density from jets of the two Fubini densities along the curve
/// parameter: `a_jet` must carry derivatives to order 5 and `b_jet` to
/// order 3. A parameterized Legendrian curve is critical for the strain
/// exactly where this vanishes.
pub fn stress_density(a_jet: &[f64], b_jet: &[f64]) -> f64 {
    assert!(
        a_jet.len() >= 6 && b_jet.len() >= 4,
        "stress density needs a to order 5 and b to order 3"
    );
    let (a, a1, a2, a3, a4, a5) = (a_jet[0], a_jet[1], a_jet[2], a_jet[3], a_jet[4], a_jet[5]);
    let (b, b1, b2, b3) = (b_jet[0], b_jet[1], b_jet[2], b_jet[3]);
    4400.0 / 81.0 * a * a1.powi(3) * a2
        + a.powi(2)
            * (-400.0 / 27.0 * b * a1.powi(3)
                - 200.0 / 9.0 * a1 * a2 * a2
                - 400.0 / 27.0 * a1 * a1 * a3)
        + a.powi(3)
            * (25.0 / 3.0 * a1 * a1 * b1
                + 50.0 / 3.0 * b * a1 * a2
                + 50.0 / 9.0 * a2 * a3
                + 25.0 / 9.0 * a1 * a4)
        + a.powi(4)
            * (-16.0 / 3.0 * b * b * a1
                - 5.0 * b1 * a2
                - 3.0 * a1 * b2
                - 10.0 / 3.0 * b * a3
                - a5 / 3.0)
        + a.powi(5) * (8.0 * b * b1 + b3)
        - 6160.0 / 243.0 * a1.powi(5)
}

/// Jets of the measured densities along the parameter, by differencing
/// pointwise density values on a 13-node stencil: `a` to order 5, `b` to
/// order 3. Used to feed [`stress_density`] without assuming closed forms.
pub fn measured_density_jets(jet: &CurveJet, t: f64, step: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let nodes: Vec<f64> = (0..=2 * STENCIL_HALF)
        .map(|i| (i as f64 - STENCIL_HALF as f64) * step)
        .collect();
    let mut av = Vec::with_capacity(nodes.len());
    let mut bv = Vec::with_capacity(nodes.len());
    for &d in &nodes {
        let f = fubini_at(jet, t + d)?;
        av.push(f.a);
        bv.push(f.b);
    }
    let w = difference_weights(0.0, &nodes, 5);
    let a_jet: Vec<f64> = (0..=5)
        .map(|d| nodes.iter().enumerate().map(|(j, _)| w[d][j] * av[j]).sum())
        .collect();
    let b_jet: Vec<f64> = (0..=3)
        .map(|d| nodes.iter().enumerate().map(|(j, _)| w[d][j] * bv[j]).sum())
        .collect();
    Ok((a_jet, b_jet))
}

/// Total strain of a sampled closed curve: the integral of the strain
/// density over one full closed period, by adaptive quadrature on densities
/// recomputed from jets (never on the stored polyline).
pub fn total_strain(sample: &LegendrianCurveSample) -> Result<f64> {
    let (jet, end) = strain_jet_source(sample)?;
    let q = quad::integrate(
        |t| fubini_at(&jet, t).map(|f| f.s_density).unwrap_or(f64::NAN),
        0.0,
        end,
        1e-10,
        1e-10,
    )?;
    Ok(q.value)
}

fn strain_jet_source(sample: &LegendrianCurveSample) -> Result<(CurveJet, f64)> {
    match &sample.meta {
        SampleMeta::Symmetric { m, ell, omega, periods, .. } => {
            let curve = StringCurve::new(Characters::new(*m, *ell)?)?;
            Ok((CurveJet::from_string(curve), *periods as f64 * *omega))
        }
        SampleMeta::ConstantCurvature { a, b, .. } => {
            let curve = ConstantCurvatureCurve::new(*a, *b)?;
            Ok((
                CurveJet::from_solenoid(curve),
                std::f64::consts::TAU * *b as f64,
            ))
        }
    }
}

/// Worst pointwise violation of the density transformation law over a test
/// window.
#[derive(Clone, Copy, Debug)]
pub struct ReparamReport {
    pub max_a_residual: f64,
    pub max_b_residual: f64,
}

/// Check the transformation law of the densities under a change of
/// parameter: with u = h(t) and straight densities a, b at u, the
/// reparametrized curve must measure
///
///   a_tilde(t) = h'(t)^3 a(h(t)),
///   b_tilde(t) = h'(t)^2 b(h(t)) + S(h),   S(h) = h'''/h' - (3/2)(h''/h')^2.
///
/// `h` returns the jet [h, h', ..] at a point to a requested order (5 is
/// asked for) and must be increasing on the window.
pub fn fubini_reparam_check(
    jet: &CurveJet,
    h: &dyn Fn(f64, usize) -> Vec<f64>,
    window: &[f64],
) -> Result<ReparamReport> {
    let mut report = ReparamReport { max_a_residual: 0.0, max_b_residual: 0.0 };
    for &t in window {
        let hj = h(t, 5);
        assert!(hj.len() >= 6, "reparametrization jet must reach order 5");
        if !(hj[1] > 0.0) {
            return Err(Error::Domain(format!(
                "reparametrization must be increasing; h'({t}) = {}",
                hj[1]
            )));
        }
        let u = hj[0];
        let h_jet = Jet::from_derivatives(&hj.iter().map(|&x| C::new(x, 0.0)).collect::<Vec<_>>());
        // Jets of the composed curve at t, by series composition.
        let raw = jet.eval(u, 5)?;
        let composed: Vec<CVec> = {
            let comp: Vec<Jet> = (0..3)
                .map(|i| {
                    let d: Vec<C> = raw.iter().map(|v| v[i]).collect();
                    Jet::from_derivatives(&d).compose(&h_jet)
                })
                .collect();
            (0..=5)
                .map(|k| CVec::new(comp[0].derivative(k), comp[1].derivative(k), comp[2].derivative(k)))
                .collect()
        };
        let direct = fubini_densities(&normalize_lift(&composed)?)?;
        let straight = fubini_at(jet, u)?;
        let schwarzian = hj[3] / hj[1] - 1.5 * (hj[2] / hj[1]).powi(2);
        let a_law = hj[1].powi(3) * straight.a;
        let b_law = hj[1].powi(2) * straight.b + schwarzian;
        report.max_a_residual = report.max_a_residual.max((direct.a - a_law).abs());
        report.max_b_residual = report.max_b_residual.max((direct.b - b_law).abs());
    }
    Ok(report)
}
