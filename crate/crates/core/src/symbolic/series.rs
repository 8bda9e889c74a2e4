use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;

use super::{SymPoly, Symbol};

/// Order cap used for every asymptotic object: ε³ = n^{-3/2}.
pub const DEFAULT_CAP: usize = 3;

/// Truncated power series in ε = n^{-1/2} with polynomial coefficients.
///
/// Coefficients above `cap` are discarded by every operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSeries {
    cap: usize,
    coeffs: Vec<SymPoly>,
}

impl GradedSeries {
    pub fn zero(cap: usize) -> Self {
        GradedSeries { cap, coeffs: vec![SymPoly::zero(); cap + 1] }
    }

    pub fn constant(p: SymPoly, cap: usize) -> Self {
        GradedSeries::monomial(p, 0, cap)
    }

    /// `p · ε^k` (zero if k exceeds the cap).
    pub fn monomial(p: SymPoly, k: usize, cap: usize) -> Self {
        let mut s = GradedSeries::zero(cap);
        if k <= cap {
            s.coeffs[k] = p;
        }
        s
    }

    /// Builds from explicit coefficients; entries beyond `cap` are dropped.
    pub fn from_coeffs(coeffs: Vec<SymPoly>, cap: usize) -> Self {
        let mut s = GradedSeries::zero(cap);
        for (k, c) in coeffs.into_iter().enumerate().take(cap + 1) {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn coeff(&self, k: usize) -> &SymPoly {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[SymPoly] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(SymPoly::is_zero)
    }

    pub fn add_ref(&self, other: &GradedSeries) -> GradedSeries {
        assert_eq!(self.cap, other.cap, "series caps differ");
        GradedSeries {
            cap: self.cap,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub_ref(&self, other: &GradedSeries) -> GradedSeries {
        assert_eq!(self.cap, other.cap, "series caps differ");
        GradedSeries {
            cap: self.cap,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add_assign_ref(&mut self, other: &GradedSeries) {
        assert_eq!(self.cap, other.cap, "series caps differ");
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            a.add_assign_ref(b);
        }
    }

    /// Truncated Cauchy product.
    pub fn mul_ref(&self, other: &GradedSeries) -> GradedSeries {
        assert_eq!(self.cap, other.cap, "series caps differ");
        let mut out = GradedSeries::zero(self.cap);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(self.cap + 1 - i) {
                if !b.is_zero() {
                    out.coeffs[i + j].add_assign_ref(&a.mul_ref(b));
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> GradedSeries {
        let mut out = GradedSeries::constant(SymPoly::one(), self.cap);
        for _ in 0..e {
            out = out.mul_ref(self);
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> GradedSeries {
        self.map(|p| p.scale(c))
    }

    pub fn mul_poly(&self, p: &SymPoly) -> GradedSeries {
        self.map(|q| q.mul_ref(p))
    }

    /// Multiplies by ε^k.
    pub fn shift(&self, k: usize) -> GradedSeries {
        let mut out = GradedSeries::zero(self.cap);
        for i in 0..=self.cap {
            if i + k <= self.cap {
                out.coeffs[i + k] = self.coeffs[i].clone();
            }
        }
        out
    }

    /// Re-caps the series, dropping or zero-padding coefficients.
    pub fn with_cap(&self, cap: usize) -> GradedSeries {
        GradedSeries::from_coeffs(self.coeffs.clone(), cap)
    }

    pub fn map(&self, f: impl Fn(&SymPoly) -> SymPoly) -> GradedSeries {
        GradedSeries { cap: self.cap, coeffs: self.coeffs.iter().map(f).collect() }
    }

    /// Evaluates Σ c_k ε^k at a numeric ε with numeric symbol values.
    pub fn eval_f64(&self, eps: f64, value: impl Fn(Symbol) -> Option<f64> + Copy) -> Option<f64> {
        let mut total = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            total += c.eval_f64(value)? * eps.powi(k as i32);
        }
        Some(total)
    }
}

impl fmt::Display for GradedSeries {
    /// One line per nonzero order: `e^k: <poly>`; the zero series prints `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                writeln!(f)?;
            }
            first = false;
            write!(f, "e^{k}: {c}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Homomorphic image of `p` with symbols replaced by series; unmapped symbols
/// are kept as ε⁰ constants.
pub fn substitute(p: &SymPoly, sigma: &BTreeMap<Symbol, GradedSeries>, cap: usize) -> GradedSeries {
    let mut cache: BTreeMap<(Symbol, u32), GradedSeries> = BTreeMap::new();
    let mut out = GradedSeries::zero(cap);
    for (m, c) in p.terms() {
        let mut acc = GradedSeries::constant(SymPoly::one(), cap);
        let mut kept = Vec::new();
        for &(s, e) in m.factors() {
            match sigma.get(&s) {
                Some(series) => {
                    let pw = cache.entry((s, e)).or_insert_with(|| series.with_cap(cap).pow(e));
                    acc = acc.mul_ref(pw);
                }
                None => kept.push((s, e)),
            }
        }
        let factor = SymPoly::term(c.clone(), super::Monomial::from_pairs(kept));
        out.add_assign_ref(&acc.mul_poly(&factor));
    }
    out
}
