//! Truncated Taylor series ("jets") over complex coefficients.
//!
//! A jet stores the coefficients c_k = f^(k)(t0)/k! of a function at a base
//! point. Arithmetic is exact series arithmetic truncated at the jet order,
//! so derivatives obtained from jets never involve finite differencing. Jets
//! of a real variable represent real functions when all coefficients have
//! zero imaginary part; conjugation conjugates coefficients, which is valid
//! precisely because the variable is real.

use num_complex::Complex64 as C;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    /// Taylor coefficients, c[k] = f^(k)/k!; length = order + 1.
    pub c: Vec<C>,
}

impl Jet {
    pub fn constant(value: C, order: usize) -> Jet {
        let mut c = vec![C::new(0.0, 0.0); order + 1];
        c[0] = value;
        Jet { c }
    }

    /// The identity jet t -> t0 + (t - t0).
    pub fn variable(t0: f64, order: usize) -> Jet {
        let mut j = Jet::constant(C::new(t0, 0.0), order);
        if order >= 1 {
            j.c[1] = C::new(1.0, 0.0);
        }
        j
    }

    pub fn from_coeffs(c: Vec<C>) -> Jet {
        assert!(!c.is_empty());
        Jet { c }
    }

    /// Build a jet from raw derivative values f, f', f'', ...
    pub fn from_derivatives(d: &[C]) -> Jet {
        let mut c = Vec::with_capacity(d.len());
        let mut fact = 1.0;
        for (k, dk) in d.iter().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            c.push(dk / fact);
        }
        Jet { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> C {
        self.c[0]
    }

    /// k-th derivative value, k! * c_k.
    pub fn derivative(&self, k: usize) -> C {
        if k > self.order() {
            return C::new(0.0, 0.0);
        }
        let mut fact = 1.0;
        for i in 2..=k {
            fact *= i as f64;
        }
        self.c[k] * fact
    }

    pub fn truncated(&self, order: usize) -> Jet {
        let mut c = self.c.clone();
        c.truncate(order + 1);
        c.resize(order + 1, C::new(0.0, 0.0));
        Jet { c }
    }

    pub fn add(&self, rhs: &Jet) -> Jet {
        let n = self.c.len().max(rhs.c.len());
        let mut c = vec![C::new(0.0, 0.0); n];
        for (k, ck) in c.iter_mut().enumerate() {
            if k < self.c.len() {
                *ck += self.c[k];
            }
            if k < rhs.c.len() {
                *ck += rhs.c[k];
            }
        }
        Jet { c }
    }

    pub fn sub(&self, rhs: &Jet) -> Jet {
        self.add(&rhs.scale(C::new(-1.0, 0.0)))
    }

    pub fn scale(&self, a: C) -> Jet {
        Jet { c: self.c.iter().map(|x| x * a).collect() }
    }

    pub fn mul(&self, rhs: &Jet) -> Jet {
        let n = self.c.len().max(rhs.c.len());
        let mut c = vec![C::new(0.0, 0.0); n];
        for i in 0..self.c.len() {
            for j in 0..rhs.c.len() {
                if i + j < n {
                    c[i + j] += self.c[i] * rhs.c[j];
                }
            }
        }
        Jet { c }
    }

    /// Series reciprocal; requires a nonzero constant term.
    pub fn recip(&self) -> Jet {
        let n = self.c.len();
        let a0 = self.c[0];
        assert!(a0.norm() > 0.0, "jet reciprocal at a zero");
        let mut c = vec![C::new(0.0, 0.0); n];
        c[0] = a0.inv();
        for k in 1..n {
            let mut s = C::new(0.0, 0.0);
            for j in 1..=k {
                s += self.c[j] * c[k - j];
            }
            c[k] = -s / a0;
        }
        Jet { c }
    }

    pub fn div(&self, rhs: &Jet) -> Jet {
        self.mul(&rhs.recip()).truncated(self.c.len().max(rhs.c.len()) - 1)
    }

    /// Square root with an explicitly chosen branch for the constant term.
    pub fn sqrt_with(&self, root0: C) -> Jet {
        let n = self.c.len();
        debug_assert!((root0 * root0 - self.c[0]).norm() <= 1e-9 * (1.0 + self.c[0].norm()));
        let mut c = vec![C::new(0.0, 0.0); n];
        c[0] = root0;
        for k in 1..n {
            let mut s = C::new(0.0, 0.0);
            for j in 1..k {
                s += c[j] * c[k - j];
            }
            c[k] = (self.c[k] - s) / (2.0 * root0);
        }
        Jet { c }
    }

    pub fn sqrt(&self) -> Jet {
        self.sqrt_with(self.c[0].sqrt())
    }

    pub fn exp(&self) -> Jet {
        let n = self.c.len();
        let mut c = vec![C::new(0.0, 0.0); n];
        c[0] = self.c[0].exp();
        for k in 1..n {
            let mut s = C::new(0.0, 0.0);
            for j in 1..=k {
                s += (j as f64) * self.c[j] * c[k - j];
            }
            c[k] = s / (k as f64);
        }
        Jet { c }
    }

    /// Principal-branch logarithm of a jet with nonzero constant term.
    pub fn ln(&self) -> Jet {
        let n = self.c.len();
        let mut c = vec![C::new(0.0, 0.0); n];
        c[0] = self.c[0].ln();
        // l' = a'/a  =>  k l_k = (a'/a * integral shift) convolution form:
        // a' = sum (j+1) a_{j+1} t^j ; l' = a'/a ; l_k = (a'/a)_{k-1} / k.
        let da = self.formal_derivative();
        let ratio = da.div(&self.truncated(n.saturating_sub(2).max(0)));
        for k in 1..n {
            c[k] = ratio.c.get(k - 1).copied().unwrap_or_default() / (k as f64);
        }
        Jet { c }
    }

    /// Cube root with branch chosen so the constant term is `root0`.
    pub fn cbrt_with(&self, root0: C) -> Jet {
        let n = self.c.len();
        debug_assert!(
            (root0.powu(3) - self.c[0]).norm() <= 1e-8 * (1.0 + self.c[0].norm()),
            "cbrt branch does not cube back"
        );
        // b = root0 * exp(ln(a/a0)/3)
        let a0 = self.c[0];
        let rel = self.scale(a0.inv());
        let l = rel.ln();
        let third = l.scale(C::new(1.0 / 3.0, 0.0));
        third.exp().scale(root0).truncated(n - 1)
    }

    /// Derivative as a jet one order lower (formal, in the jet variable).
    pub fn formal_derivative(&self) -> Jet {
        if self.c.len() == 1 {
            return Jet::constant(C::new(0.0, 0.0), 0);
        }
        let mut c = Vec::with_capacity(self.c.len() - 1);
        for k in 1..self.c.len() {
            c.push(self.c[k] * (k as f64));
        }
        Jet { c }
    }

    /// Antiderivative with given constant term; one order higher.
    pub fn formal_integral(&self, c0: C) -> Jet {
        let mut c = Vec::with_capacity(self.c.len() + 1);
        c.push(c0);
        for k in 0..self.c.len() {
            c.push(self.c[k] / ((k + 1) as f64));
        }
        Jet { c }
    }

    /// Coefficient-wise conjugate; the jet of conj(f) for a real variable.
    pub fn conj(&self) -> Jet {
        Jet { c: self.c.iter().map(|x| x.conj()).collect() }
    }

    pub fn re(&self) -> Jet {
        self.add(&self.conj()).scale(C::new(0.5, 0.0))
    }

    pub fn im(&self) -> Jet {
        self.sub(&self.conj()).scale(C::new(0.0, -0.5))
    }

    /// Composition self(g(t)) around g's base point; `g.c[0]` must equal the
    /// base point of `self`'s expansion variable, i.e. the caller expands
    /// `self` at g(t0) and passes the *offset* jet g - g(t0) implicitly:
    /// here we require nothing and use Horner on (g - g0).
    pub fn compose(&self, g: &Jet) -> Jet {
        let order = g.order();
        let mut shifted = g.clone();
        shifted.c[0] = C::new(0.0, 0.0);
        // Horner: result = (((c_n * s + c_{n-1}) * s + ...) * s + c_0)
        let mut acc = Jet::constant(*self.c.last().unwrap(), order);
        for k in (0..self.c.len() - 1).rev() {
            acc = acc.mul(&shifted).truncated(order);
            acc.c[0] += self.c[k];
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C, b: C, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn exp_matches_closed_form() {
        // jet of exp(2t) at t0 = 0.3
        let t = Jet::variable(0.3, 6);
        let e = t.scale(C::new(2.0, 0.0)).exp();
        for k in 0..=6 {
            let expected = C::new(2.0_f64.powi(k as i32) * (0.6_f64).exp(), 0.0);
            assert!(close(e.derivative(k), expected, 1e-12 * expected.norm()));
        }
    }

    #[test]
    fn reciprocal_and_product() {
        let t = Jet::variable(0.7, 8);
        let one = t.mul(&t.recip());
        assert!(close(one.c[0], C::new(1.0, 0.0), 1e-14));
        for k in 1..=8 {
            assert!(one.c[k].norm() < 1e-13, "k={k}: {:?}", one.c[k]);
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let t = Jet::variable(0.2, 7);
        let f = t.mul(&t).add(&Jet::constant(C::new(1.5, 0.0), 7)); // t^2 + 1.5
        let r = f.sqrt();
        let back = r.mul(&r).truncated(7);
        for k in 0..=7 {
            assert!(close(back.c[k], f.c[k], 1e-13));
        }
    }

    #[test]
    fn cbrt_branches() {
        let f = Jet::constant(C::new(-8.0, 0.0), 4)
            .add(&Jet::variable(0.0, 4).scale(C::new(1.0, 0.5)));
        let root0 = C::new(-2.0, 0.0); // real branch of cbrt(-8)
        let r = f.cbrt_with(root0);
        let back = r.mul(&r).mul(&r).truncated(4);
        for k in 0..=4 {
            assert!(close(back.c[k], f.c[k], 1e-12), "k={k}");
        }
    }

    #[test]
    fn composition_chain_rule() {
        // f(u) = u^2 at u0 = g(0.5), g(t) = sin t
        let t = Jet::variable(0.5, 5);
        let g = {
            // sin t jet via exp(it)
            let it = t.scale(C::new(0.0, 1.0));
            it.exp().im()
        };
        let u0 = g.c[0];
        let f = {
            let u = Jet::variable(0.0, 5); // placeholder, coefficients of u^2 at u0
            let mut j = u;
            j.c[0] = u0;
            j.mul(&j.clone())
        };
        let comp = f.compose(&g);
        // d/dt sin^2 t = sin 2t ; second derivative = 2 cos 2t
        let s = 0.5_f64;
        assert!(close(comp.derivative(0), C::new(s.sin().powi(2), 0.0), 1e-13));
        assert!(close(comp.derivative(1), C::new((2.0 * s).sin(), 0.0), 1e-12));
        assert!(close(comp.derivative(2), C::new(2.0 * (2.0 * s).cos(), 0.0), 1e-11));
    }

    #[test]
    fn ln_inverts_exp() {
        let t = Jet::variable(0.1, 6);
        let f = t.scale(C::new(1.3, -0.2)).add(&Jet::constant(C::new(2.0, 1.0), 6));
        let back = f.ln().exp();
        for k in 0..=6 {
            assert!(close(back.c[k], f.c[k], 1e-12), "k={k}");
        }
    }
}
