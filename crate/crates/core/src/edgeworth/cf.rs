//! Cornish–Fisher inversion of the Edgeworth CDF expansion.
//!
//! With δ = εA + ε²B + ε³C, G_n(z + δ) = u = Φ(z) becomes, after dividing by φ(z),
//!   Σ_{k≥1} (−1)^{k−1} He_{k−1}(z) δ^k/k!
//!     + Σ_j ε^j p_j(z + δ) Σ_k (−1)^k He_k(z) δ^k/k! = 0.
//! The ε^m coefficient is linear in the m-th unknown with coefficient 1, so each
//! term is minus the ε^m residual computed with that term set to zero.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;

use super::polys::hermite;
use crate::symbolic::{substitute, GradedSeries, SymPoly, Symbol, DEFAULT_CAP};

/// A, B, C as polynomials in z.
#[derive(Clone, Debug, PartialEq)]
pub struct CornishFisherCoefficients {
    pub a: SymPoly,
    pub b: SymPoly,
    pub c: SymPoly,
}

impl CornishFisherCoefficients {
    pub fn as_array(&self) -> [&SymPoly; 3] {
        [&self.a, &self.b, &self.c]
    }
}

impl fmt::Display for CornishFisherCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A: {}\nB: {}\nC: {}", self.a, self.b, self.c)
    }
}

fn factorial(k: usize) -> i64 {
    (1..=k as i64).product()
}

/// The ε-series of the left-hand side above for a given δ.
fn residual(p: &[SymPoly; 3], delta: &GradedSeries) -> GradedSeries {
    let cap = DEFAULT_CAP;
    let z = Symbol::z();
    let mut powers = vec![GradedSeries::constant(SymPoly::one(), cap)];
    for k in 1..=cap {
        powers.push(powers[k - 1].mul_ref(delta));
    }
    let weighted = |k: usize, he: usize, sign: i64| {
        let c = BigRational::new(sign.into(), factorial(k).into());
        powers[k].mul_poly(&hermite(he, z)).scale(&c)
    };
    let mut total = GradedSeries::zero(cap);
    for k in 1..=cap {
        let sign = if (k - 1) % 2 == 0 { 1 } else { -1 };
        total.add_assign_ref(&weighted(k, k - 1, sign));
    }
    let mut phi_ratio = GradedSeries::zero(cap);
    for k in 0..=cap {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        phi_ratio.add_assign_ref(&weighted(k, k, sign));
    }
    let shifted = GradedSeries::constant(SymPoly::var(z), cap).add_ref(delta);
    let sigma = BTreeMap::from([(Symbol::x(), shifted)]);
    for (j, pj) in p.iter().enumerate() {
        let term = substitute(pj, &sigma, cap).mul_ref(&phi_ratio).shift(j + 1);
        total.add_assign_ref(&term);
    }
    total
}

/// Solves for A, B, C order by order from p₁..p₃ (polynomials in x).
pub fn cornish_fisher(p: &[SymPoly; 3]) -> CornishFisherCoefficients {
    let mut found: Vec<SymPoly> = Vec::new();
    for order in 1..=DEFAULT_CAP {
        let mut coeffs = vec![SymPoly::zero()];
        coeffs.extend(found.iter().cloned());
        let delta = GradedSeries::from_coeffs(coeffs, DEFAULT_CAP);
        let r = residual(p, &delta);
        debug_assert!((0..order).all(|k| r.coeff(k).is_zero()));
        found.push(-r.coeff(order).clone());
    }
    let [a, b, c]: [SymPoly; 3] = found.try_into().expect("three orders");
    CornishFisherCoefficients { a, b, c }
}

/// Residual of the defining equation after substituting the solution (zero through ε³).
pub fn cornish_fisher_residual(p: &[SymPoly; 3], cf: &CornishFisherCoefficients) -> GradedSeries {
    let delta = GradedSeries::from_coeffs(vec![SymPoly::zero(), cf.a.clone(), cf.b.clone(), cf.c.clone()], DEFAULT_CAP);
    residual(p, &delta)
}
