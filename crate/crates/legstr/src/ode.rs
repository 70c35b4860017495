//! Dormand-Prince 5(4) with adaptive step, specialized to 3x3 complex
//! matrix states. Projection-free: invariants of the flow (determinant,
//! pseudo-unitarity) are never enforced, only measured by the callers.

use crate::error::{Error, Result};
use crate::space::CMat;

fn mat_norm(m: &CMat) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += m[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

/// Butcher tableau of Dormand-Prince 5(4).
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
/// 5th-order weights equal the last A row; these are the embedded 4th-order ones.
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate dY/ds = f(s, Y) from (s0, y0) to s1, calling `observe` at every
/// accepted step (including the initial state). Step size adapts to meet
/// `rtol`/`atol` per step; the first-same-as-last evaluation is reused.
pub fn integrate_adaptive<F, O>(
    f: F,
    s0: f64,
    s1: f64,
    y0: CMat,
    rtol: f64,
    atol: f64,
    mut observe: O,
) -> Result<CMat>
where
    F: Fn(f64, &CMat) -> CMat,
    O: FnMut(f64, &CMat),
{
    if s1 == s0 {
        observe(s0, &y0);
        return Ok(y0);
    }
    let dir = (s1 - s0).signum();
    let span = (s1 - s0).abs();
    let mut s = s0;
    let mut y = y0;
    let mut h = (span / 64.0).min(0.1) * dir;
    let mut k1 = f(s, &y);
    observe(s, &y);
    let mut steps = 0usize;
    const MAX_STEPS: usize = 2_000_000;

    while (s1 - s) * dir > 0.0 {
        if (s + h - s1) * dir > 0.0 {
            h = s1 - s;
        }
        let k2 = f(s + C[0] * h, &(y + k1.scale(A[0][0] * h)));
        let k3 = f(s + C[1] * h, &(y + k1.scale(A[1][0] * h) + k2.scale(A[1][1] * h)));
        let k4 = f(
            s + C[2] * h,
            &(y + k1.scale(A[2][0] * h) + k2.scale(A[2][1] * h) + k3.scale(A[2][2] * h)),
        );
        let k5 = f(
            s + C[3] * h,
            &(y + k1.scale(A[3][0] * h)
                + k2.scale(A[3][1] * h)
                + k3.scale(A[3][2] * h)
                + k4.scale(A[3][3] * h)),
        );
        let k6 = f(
            s + C[4] * h,
            &(y + k1.scale(A[4][0] * h)
                + k2.scale(A[4][1] * h)
                + k3.scale(A[4][2] * h)
                + k4.scale(A[4][3] * h)
                + k5.scale(A[4][4] * h)),
        );
        let y5 = y
            + k1.scale(A[5][0] * h)
            + k3.scale(A[5][2] * h)
            + k4.scale(A[5][3] * h)
            + k5.scale(A[5][4] * h)
            + k6.scale(A[5][5] * h);
        let k7 = f(s + h, &y5);
        let y4 = y
            + k1.scale(B4[0] * h)
            + k3.scale(B4[2] * h)
            + k4.scale(B4[3] * h)
            + k5.scale(B4[4] * h)
            + k6.scale(B4[5] * h)
            + k7.scale(B4[6] * h);
        let scale = atol + rtol * mat_norm(&y).max(mat_norm(&y5));
        let err = mat_norm(&(y5 - y4)) / scale;

        if err <= 1.0 {
            s += h;
            y = y5;
            k1 = k7; // first-same-as-last
            observe(s, &y);
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h.abs() < 1e-14 * span {
            return Err(Error::Convergence("ODE step size underflow".into()));
        }
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::Convergence("ODE exceeded step budget".into()));
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn scalar_exponential_in_matrix_clothing() {
        // Y' = D Y with constant diagonal D; exact solution is exp(D s).
        let gen = CMat::from_diagonal(&nalgebra::Vector3::new(
            Complex64::i(),
            Complex64::i() * 2.0,
            -Complex64::i(),
        ));
        let y = integrate_adaptive(
            |_s, y| gen * y,
            0.0,
            3.0,
            CMat::identity(),
            1e-12,
            1e-14,
            |_, _| {},
        )
        .unwrap();
        let want = CMat::from_diagonal(&nalgebra::Vector3::new(
            (Complex64::i() * 3.0).exp(),
            (Complex64::i() * 6.0).exp(),
            (-Complex64::i() * 3.0).exp(),
        ));
        assert!(mat_norm(&(y - want)) < 1e-10);
    }
}
