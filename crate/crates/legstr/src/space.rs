//! The ambient model: a Hermitian form of signature (2,1) on C^3, the
//! hyperquadric of its null lines, and the fixed isometries used throughout.
//!
//! Coordinates are chosen so the form is anti-diagonal in the first and third
//! slots: <z, w> = i (conj(z1) w3 - conj(z3) w1) + conj(z2) w2. The matrix
//! `U` conjugates diagonal torus elements into this basis; `L` is the order-4
//! isometry exchanging the two reference axes.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64 as C;

pub type CVec = Vector3<C>;
pub type CMat = Matrix3<C>;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Matrix of the Hermitian form: <z, w> = z^* H w.
pub fn form_matrix() -> CMat {
    CMat::new(
        c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0),
        c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0),
        c(0.0, -1.0), c(0.0, 0.0), c(0.0, 0.0),
    )
}

/// <z, w> = i (conj(z1) w3 - conj(z3) w1) + conj(z2) w2.
pub fn form(z: &CVec, w: &CVec) -> C {
    C::i() * (z[0].conj() * w[2] - z[2].conj() * w[0]) + z[1].conj() * w[1]
}

/// Change of basis diagonalizing the form to diag(-1, 1, 1).
pub fn matrix_u() -> CMat {
    let s = 1.0 / 2.0_f64.sqrt();
    CMat::new(
        c(s, 0.0), c(0.0, 0.0), c(0.0, s),
        c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0),
        c(0.0, s), c(0.0, 0.0), c(s, 0.0),
    )
}

pub fn matrix_u_inv() -> CMat {
    let s = 1.0 / 2.0_f64.sqrt();
    CMat::new(
        c(s, 0.0), c(0.0, 0.0), c(0.0, -s),
        c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0),
        c(0.0, -s), c(0.0, 0.0), c(s, 0.0),
    )
}

/// The order-4 isometry exchanging the two distinguished axes; conjugation
/// sends the torus rotation R(phi, psi) to R(phi, -(phi + psi)).
pub fn matrix_l() -> CMat {
    let s = 1.0 / 2.0_f64.sqrt();
    CMat::new(
        c(0.5, 0.0), c(0.0, -s), c(0.0, -0.5),
        c(0.0, -s), c(0.0, 0.0), c(s, 0.0),
        c(0.0, 0.5), c(-s, 0.0), c(0.5, 0.0),
    )
}

/// Torus isometry U diag(e^{i phi}, e^{i psi}, e^{-i(phi+psi)}) U^{-1}.
pub fn torus_rotation(phi: f64, psi: f64) -> CMat {
    let d = CMat::from_diagonal(&CVec::new(
        (C::i() * phi).exp(),
        (C::i() * psi).exp(),
        (-C::i() * (phi + psi)).exp(),
    ));
    matrix_u() * d * matrix_u_inv()
}

/// Rotation by `angle` about the Oz axis of the Heisenberg chart, as a
/// unimodular isometry (diagonal in these coordinates).
pub fn rot_oz(angle: f64) -> CMat {
    CMat::from_diagonal(&CVec::new(
        (-C::i() * angle / 3.0).exp(),
        (C::i() * 2.0 * angle / 3.0).exp(),
        (-C::i() * angle / 3.0).exp(),
    ))
}

/// Fubini-Study distance between the lines spanned by z and w:
/// sin of the principal angle, in [0, 1].
pub fn projective_distance(z: &CVec, w: &CVec) -> f64 {
    let nz = z.dot(&z.map(|x| x.conj())).re.sqrt();
    let nw = w.dot(&w.map(|x| x.conj())).re.sqrt();
    if nz == 0.0 || nw == 0.0 {
        return 1.0;
    }
    // Standard positive-definite pairing, not the signature form. The sine
    // of the principal angle is the norm of the component of w orthogonal
    // to z; computing it that way stays accurate for nearly equal lines,
    // where 1 - cos^2 would lose half the digits.
    let zu = z / C::new(nz, 0.0);
    let wu = w / C::new(nw, 0.0);
    let mut inner = C::new(0.0, 0.0);
    for k in 0..3 {
        inner += zu[k].conj() * wu[k];
    }
    let perp = wu - zu * inner;
    perp.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt().min(1.0)
}

/// Relative deviation of A from B up to a global phase: min over phase of
/// ||A - e^{i t} B|| / ||B||.
pub fn projective_matrix_distance(a: &CMat, b: &CMat) -> f64 {
    // Optimal phase aligns <B, A> = sum conj(B_ij) A_ij.
    let mut inner = C::new(0.0, 0.0);
    let mut nb = 0.0;
    let mut na = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            inner += b[(i, j)].conj() * a[(i, j)];
            nb += b[(i, j)].norm_sqr();
            na += a[(i, j)].norm_sqr();
        }
    }
    let nb = nb.sqrt();
    let na = na.sqrt();
    if nb == 0.0 {
        return na;
    }
    let phase = if inner.norm() == 0.0 { C::new(1.0, 0.0) } else { inner / inner.norm() };
    let mut diff = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            diff += (a[(i, j)] - phase * b[(i, j)]).norm_sqr();
        }
    }
    diff.sqrt() / nb
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat_norm(m: &CMat) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += m[(i, j)].norm_sqr();
            }
        }
        s.sqrt()
    }

    #[test]
    fn u_diagonalizes_form() {
        let u = matrix_u();
        let g = u.adjoint() * form_matrix() * u;
        let want = CMat::from_diagonal(&CVec::new(c(-1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)));
        assert!(mat_norm(&(g - want)) < 1e-14);
        assert!(mat_norm(&(matrix_u() * matrix_u_inv() - CMat::identity())) < 1e-14);
    }

    #[test]
    fn l_has_order_four_and_is_an_isometry() {
        let l = matrix_l();
        let l4 = l * l * l * l;
        assert!(mat_norm(&(l4 - CMat::identity())) < 1e-14);
        let h = form_matrix();
        assert!(mat_norm(&(l.adjoint() * h * l - h)) < 1e-14);
    }

    #[test]
    fn l_conjugates_torus_rotations() {
        let (phi, psi) = (0.73, -1.21);
        let l = matrix_l();
        let lhs = l * torus_rotation(phi, psi) * l.try_inverse().unwrap();
        let rhs = torus_rotation(phi, -(phi + psi));
        assert!(mat_norm(&(lhs - rhs)) < 1e-12);
    }

    #[test]
    fn oz_rotation_is_a_torus_element() {
        let psi = 0.9;
        // diag(a, b, a) with a = e^{-i psi/3}, b = e^{2 i psi/3} commutes
        // with U-conjugation: it equals U diag(b, a... ) in some order; we
        // only check it is an isometry of the form with det 1.
        let r = rot_oz(psi);
        let h = form_matrix();
        assert!(mat_norm(&(r.adjoint() * h * r - h)) < 1e-14);
        assert!((r.determinant() - c(1.0, 0.0)).norm() < 1e-14);
        // And it rotates the Heisenberg chart: z2/z1 gains e^{i psi}.
        let z = CVec::new(c(1.0, 0.0), c(0.3, 0.4), c(0.1, -0.2));
        let rz = r * z;
        let before = z[1] / z[0];
        let after = rz[1] / rz[0];
        assert!((after - before * (C::i() * psi).exp()).norm() < 1e-14);
        assert!((rz[2] / rz[0] - z[2] / z[0]).norm() < 1e-14);
    }

    #[test]
    fn projective_distance_ignores_scale() {
        let z = CVec::new(c(1.0, 0.0), c(0.3, 0.4), c(0.1, -0.2));
        let w = z.map(|x| x * c(0.0, 2.5));
        assert!(projective_distance(&z, &w) < 1e-14);
        let v = CVec::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        assert!(projective_distance(&z, &v) > 0.5);
    }
}
