//! Numeric instantiation of the expansion for one η vector and sample size.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::Serialize;

use super::cumulants::SLOTS;
use super::polys::numeric_coefficients;
use super::{Derivation, EdgeworthError};
use crate::numeric::normal;
use crate::symbolic::{SymPoly, Symbol};

pub const MAX_ORDER: usize = 3;

/// Value of the CDF expansion; `clamped` records that the raw value left [0, 1].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CdfValue {
    pub value: f64,
    pub raw: f64,
    pub clamped: bool,
}

/// η₂..η₆ substituted exactly into the symbolic objects, converted to f64 once.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansionModel {
    /// η₂, η₃, η₄, η₅, η₆.
    pub eta: [f64; 5],
    pub n: usize,
    /// k₁₂, k₁₃, k₂₁, k₂₂, k₃₁, k₃₂, k₄₁, k₅₁.
    pub kappa: [f64; 8],
    /// p₁..p₃ coefficients in ascending powers of x.
    pub p: [Vec<f64>; 3],
    /// A, B, C coefficients in ascending powers of z.
    pub cf: [Vec<f64>; 3],
}

/// Exact substitution η_j ↦ the binary value of the f64.
pub fn eta_values(eta: &[f64; 5]) -> Result<BTreeMap<Symbol, SymPoly>, EdgeworthError> {
    let mut map = BTreeMap::new();
    for (j, &v) in eta.iter().enumerate() {
        let r = BigRational::from_float(v).ok_or(EdgeworthError::NonFinite(v))?;
        map.insert(Symbol::eta(j as u8 + 2), SymPoly::constant(r));
    }
    Ok(map)
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

impl ExpansionModel {
    pub fn new(d: &Derivation, eta: [f64; 5], n: usize) -> Result<Self, EdgeworthError> {
        if n == 0 {
            return Err(EdgeworthError::SampleSize);
        }
        let values = eta_values(&eta)?;
        let numeric = |p: &SymPoly| {
            let v = p.substitute(&values);
            v.as_constant()
                .map(|c| num_traits::ToPrimitive::to_f64(&c).expect("finite"))
                .unwrap_or_else(|| {
                    assert!(v.is_zero(), "{v} is not numeric");
                    0.0
                })
        };
        let mut kappa = [0.0; 8];
        for (slot, &((i, j), _)) in kappa.iter_mut().zip(SLOTS.iter()) {
            *slot = numeric(d.cumulants.k(i, j));
        }
        let p = d.polys.p.each_ref().map(|pj| numeric_coefficients(pj, Symbol::x(), &values));
        let cf = d.cf.as_array().map(|c| numeric_coefficients(c, Symbol::z(), &values));
        Ok(ExpansionModel { eta, n, kappa, p, cf })
    }

    fn eps(&self) -> f64 {
        (self.n as f64).powf(-0.5)
    }

    /// p_j(x) for j = 1..=3.
    pub fn p_at(&self, j: usize, x: f64) -> f64 {
        horner(&self.p[j - 1], x)
    }

    /// Φ(x) + Σ_{j≤order} n^{-j/2} p_j(x)φ(x), clamped to [0, 1].
    pub fn cdf_eval(&self, x: f64, order: usize) -> Result<CdfValue, EdgeworthError> {
        if order > MAX_ORDER {
            return Err(EdgeworthError::Order(order));
        }
        let eps = self.eps();
        let phi = normal::pdf(x);
        let mut raw = normal::cdf(x);
        for j in 1..=order {
            raw += eps.powi(j as i32) * self.p_at(j, x) * phi;
        }
        let value = raw.clamp(0.0, 1.0);
        Ok(CdfValue { value, raw, clamped: value != raw })
    }

    /// z_u + Σ_{j≤order} n^{-j/2}·{A, B, C}_j(z_u).
    pub fn quantile_eval(&self, u: f64, order: usize) -> Result<f64, EdgeworthError> {
        if order > MAX_ORDER {
            return Err(EdgeworthError::Order(order));
        }
        let z = normal::quantile(u).ok_or(EdgeworthError::Domain(u))?;
        let eps = self.eps();
        let mut q = z;
        for j in 1..=order {
            q += eps.powi(j as i32) * horner(&self.cf[j - 1], z);
        }
        Ok(q)
    }
}
