//! Adaptive Gauss-Kronrod quadrature (7-15 pair).
//!
//! Used as the independent oracle for the special functions and the period
//! integrals, and as the production integrator for the total strain. The
//! panel error estimate is the raw |K15 - G7| difference, which overestimates
//! the true error by orders of magnitude on smooth integrands; that bias is
//! deliberate, the oracle must not flatter the closed forms it checks.

use crate::error::{Error, Result};

/// Kronrod abscissae on [0, 1] side of the symmetric rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_33,
    0.949_107_912_342_758_524_526_189_684_047_85,
    0.864_864_423_359_769_072_789_712_788_640_93,
    0.741_531_185_599_394_439_863_864_773_280_79,
    0.586_087_235_467_691_130_294_144_838_258_73,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_24,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Weights of the embedded 7-point Gauss rule (odd Kronrod indices).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of |K15 - G7| over accepted panels; a pessimistic error bound.
    pub error_estimate: f64,
    pub panels: usize,
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        kronrod += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kronrod * h, (kronrod - gauss).abs() * h.abs())
}

/// Integrate `f` over `[a, b]` by adaptive bisection until every panel's
/// error estimate is below its share of `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("quadrature endpoints must be finite".into()));
    }
    if a == b {
        return Ok(Quadrature { value: 0.0, error_estimate: 0.0, panels: 0 });
    }
    const MAX_PANELS: usize = 4096;

    // First pass to size the tolerance against the integral itself.
    let (rough, _) = panel(&f, a, b);
    let mut stack = vec![(a, b)];
    let mut value = 0.0;
    let mut err = 0.0;
    let mut panels = 0usize;
    let span = (b - a).abs();

    while let Some((lo, hi)) = stack.pop() {
        let (v, e) = panel(&f, lo, hi);
        let budget = abs_tol.max(rel_tol * rough.abs()).max(f64::MIN_POSITIVE);
        let local = budget * ((hi - lo).abs() / span).max(1e-300);
        if e <= local || (hi - lo).abs() < 1e-15 * span {
            value += v;
            err += e;
            panels += 1;
            if panels > MAX_PANELS {
                return Err(Error::Convergence(format!(
                    "quadrature exceeded {MAX_PANELS} panels (err so far {err:.3e})"
                )));
            }
        } else {
            let mid = 0.5 * (lo + hi);
            if !(lo < mid && mid < hi) {
                // Interval no longer splittable in f64; accept what we have.
                value += v;
                err += e;
                panels += 1;
                continue;
            }
            stack.push((lo, mid));
            stack.push((mid, hi));
            if stack.len() > MAX_PANELS {
                return Err(Error::Convergence("quadrature subdivision stack overflow".into()));
            }
        }
    }
    Ok(Quadrature { value, error_estimate: err, panels })
}
