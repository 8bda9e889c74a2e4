//! Truncated Taylor arithmetic: c[k] = f^{(k)}(x₀)/k! for k ≤ 5.
//!
//! Evaluating a log-density expression on the jet x₀ + t yields ℓ and its first
//! five derivatives exactly up to rounding, without finite-difference steps.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub const JET_ORDER: usize = 5;
const N: usize = JET_ORDER + 1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub c: [f64; N],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = v;
        Jet { c }
    }

    /// The independent variable at `x0`.
    pub fn variable(x0: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = x0;
        c[1] = 1.0;
        Jet { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// f, f′, …, f⁽⁵⁾ at x₀.
    pub fn derivatives(&self) -> [f64; N] {
        let mut out = self.c;
        let mut fact = 1.0;
        for (k, v) in out.iter_mut().enumerate().skip(1) {
            fact *= k as f64;
            *v *= fact;
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }

    pub fn exp(&self) -> Self {
        let mut e = [0.0; N];
        e[0] = self.c[0].exp();
        for k in 1..N {
            e[k] = (1..=k).map(|j| j as f64 * self.c[j] * e[k - j]).sum::<f64>() / k as f64;
        }
        Jet { c: e }
    }

    pub fn ln(&self) -> Self {
        let a = &self.c;
        let mut l = [0.0; N];
        l[0] = a[0].ln();
        for k in 1..N {
            let s: f64 = (1..k).map(|j| j as f64 * l[j] * a[k - j]).sum();
            l[k] = (a[k] - s / k as f64) / a[0];
        }
        Jet { c: l }
    }

    /// self^p for real p via y′a = p·a′y; needs a₀ > 0 unless p is a small integer.
    pub fn powf(&self, p: f64) -> Self {
        if p.fract() == 0.0 && p.abs() <= 16.0 {
            return self.powi(p as i32);
        }
        let a = &self.c;
        let mut y = [0.0; N];
        y[0] = a[0].powf(p);
        for k in 1..N {
            let s: f64 = (1..=k).map(|j| ((p + 1.0) * j as f64 - k as f64) * a[j] * y[k - j]).sum();
            y[k] = s / (k as f64 * a[0]);
        }
        Jet { c: y }
    }

    pub fn powi(&self, n: i32) -> Self {
        let mut base = if n < 0 { Jet::constant(1.0) / *self } else { *self };
        let mut e = n.unsigned_abs();
        let mut acc = Jet::constant(1.0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn sqrt(&self) -> Self {
        self.powf(0.5)
    }

    /// (sin, cos) or, with `hyperbolic`, (sinh, cosh).
    fn sin_cos_impl(&self, hyperbolic: bool) -> (Self, Self) {
        let a = &self.c;
        let (mut s, mut c) = ([0.0; N], [0.0; N]);
        if hyperbolic {
            s[0] = a[0].sinh();
            c[0] = a[0].cosh();
        } else {
            (s[0], c[0]) = a[0].sin_cos();
        }
        let sign = if hyperbolic { 1.0 } else { -1.0 };
        for k in 1..N {
            let (mut ds, mut dc) = (0.0, 0.0);
            for j in 1..=k {
                ds += j as f64 * a[j] * c[k - j];
                dc += j as f64 * a[j] * s[k - j];
            }
            s[k] = ds / k as f64;
            c[k] = sign * dc / k as f64;
        }
        (Jet { c: s }, Jet { c })
    }

    pub fn sin(&self) -> Self {
        self.sin_cos_impl(false).0
    }

    pub fn cos(&self) -> Self {
        self.sin_cos_impl(false).1
    }

    pub fn sinh(&self) -> Self {
        self.sin_cos_impl(true).0
    }

    pub fn cosh(&self) -> Self {
        self.sin_cos_impl(true).1
    }

    pub fn tanh(&self) -> Self {
        let (s, c) = self.sin_cos_impl(true);
        s / c
    }

    /// atan via atan′ = a′/(1 + a²).
    pub fn atan(&self) -> Self {
        let ratio = self.derivative() / (Jet::constant(1.0) + *self * *self);
        let mut out = [0.0; N];
        out[0] = self.c[0].atan();
        for k in 1..N {
            out[k] = ratio.c[k - 1] / k as f64;
        }
        Jet { c: out }
    }

    /// |a|, valid away from a₀ = 0.
    pub fn abs(&self) -> Self {
        if self.c[0] < 0.0 {
            -*self
        } else {
            *self
        }
    }

    /// d/dt of the truncated series (top coefficient becomes zero).
    fn derivative(&self) -> Self {
        let mut d = [0.0; N];
        for k in 1..N {
            d[k - 1] = k as f64 * self.c[k];
        }
        Jet { c: d }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, o: Jet) -> Jet {
        for (a, b) in self.c.iter_mut().zip(o.c) {
            *a += b;
        }
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, o: Jet) -> Jet {
        for (a, b) in self.c.iter_mut().zip(o.c) {
            *a -= b;
        }
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for a in self.c.iter_mut() {
            *a = -*a;
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut c = [0.0; N];
        for (k, ck) in c.iter_mut().enumerate() {
            *ck = (0..=k).map(|j| self.c[j] * o.c[k - j]).sum();
        }
        Jet { c }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let mut q = [0.0; N];
        for k in 0..N {
            let s: f64 = (0..k).map(|j| q[j] * o.c[k - j]).sum();
            q[k] = (self.c[k] - s) / o.c[0];
        }
        Jet { c: q }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: &[f64; N], b: &[f64; N], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
    }

    #[test]
    fn exp_and_ln_derivatives() {
        let x = Jet::variable(0.7);
        let e = x.exp().derivatives();
        assert!(close(&e, &[0.7f64.exp(); N], 1e-14));
        // d^k ln x = (−1)^{k−1}(k−1)!/x^k
        let l = x.ln().derivatives();
        let expected = [0.7f64.ln(), 1.0 / 0.7, -1.0 / 0.49, 2.0 / 0.343, -6.0 / 0.2401, 24.0 / 0.16807];
        assert!(close(&l, &expected, 1e-13));
    }

    #[test]
    fn trig_and_hyperbolic() {
        let x = Jet::variable(0.3);
        let s = x.sin().derivatives();
        let (sv, cv) = 0.3f64.sin_cos();
        assert!(close(&s, &[sv, cv, -sv, -cv, sv, cv], 1e-14));
        let t = x.tanh().derivatives();
        let th = 0.3f64.tanh();
        let sech2 = 1.0 - th * th;
        assert!((t[1] - sech2).abs() < 1e-14);
        assert!((t[2] + 2.0 * th * sech2).abs() < 1e-14);
        let a = x.atan().derivatives();
        assert!((a[1] - 1.0 / 1.09).abs() < 1e-14);
        assert!((a[2] + 0.6 / 1.09f64.powi(2)).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn powers_agree(x0 in 0.2f64..3.0, p in -3.0f64..3.0) {
            let x = Jet::variable(x0);
            let via_exp = (x.ln() * Jet::constant(p)).exp();
            prop_assert!(close(&x.powf(p).c, &via_exp.c, 1e-11));
            let n = (p * 2.0).round() as i32;
            let via_exp = (x.ln() * Jet::constant(n as f64)).exp();
            prop_assert!(close(&x.powi(n).c, &via_exp.c, 1e-11));
        }

        #[test]
        fn quotient_inverts_product(a in prop::array::uniform6(-2.0f64..2.0), b0 in 0.5f64..2.0, b in prop::array::uniform5(-2.0f64..2.0)) {
            let a = Jet { c: a };
            let b = Jet { c: [b0, b[0], b[1], b[2], b[3], b[4]] };
            prop_assert!(close(&((a * b) / b).c, &a.c, 1e-9));
        }
    }
}
