//! Characteristic-function polynomials r_j(it) and Edgeworth polynomials p_j(x).
//!
//! With κ's of the cumulant structure, log χ(t) = −t²/2 + Σ_j ε^j K_j(it), so
//! χ(t) = e^{−t²/2}(1 + Σ_j ε^j r_j(it)) with r_j read off exp(Σ ε^j K_j).
//! Inversion sends (it)^k e^{−t²/2} to He_k(x)φ(x) in the density, whose
//! antiderivative is −He_{k−1}(x)φ(x); so c·(it)^k contributes −c·He_{k−1}(x) to p_j.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use super::cumulants::{CumulantSet, SLOTS};
use super::EdgeworthError;
use crate::symbolic::{GradedSeries, Monomial, SymPoly, Symbol, DEFAULT_CAP};

/// r₁..r₃ in (it) with symbolic coefficients k_{ij}.
pub fn r_polynomials_generic() -> [SymPoly; 3] {
    let it = Symbol::it();
    let mut exponent = GradedSeries::zero(DEFAULT_CAP);
    for &((i, j), order) in SLOTS.iter() {
        if (i, j) == (2, 1) {
            continue;
        }
        let fact: i64 = (1..=i as i64).product();
        let term = SymPoly::var(Symbol::k(i, j)).mul_ref(&SymPoly::var_pow(it, i as u32)).scale(&BigRational::new(1.into(), fact.into()));
        exponent.add_assign_ref(&GradedSeries::monomial(term, order, DEFAULT_CAP));
    }
    // exp(K) − 1 with K = O(ε): K + K²/2 + K³/6 at cap 3.
    let k2 = exponent.mul_ref(&exponent);
    let k3 = k2.mul_ref(&exponent);
    let e = exponent
        .add_ref(&k2.scale(&BigRational::new(1.into(), 2.into())))
        .add_ref(&k3.scale(&BigRational::new(1.into(), 6.into())));
    [e.coeff(1).clone(), e.coeff(2).clone(), e.coeff(3).clone()]
}

/// r₁..r₃ with the cumulant coefficients substituted.
pub fn r_polynomials(c: &CumulantSet) -> [SymPoly; 3] {
    let map = c.k_substitution();
    r_polynomials_generic().map(|r| r.substitute(&map))
}

/// Probabilists' Hermite polynomial He_m(x): He_{m+1} = x He_m − m He_{m−1}.
pub fn hermite(m: usize, var: Symbol) -> SymPoly {
    let x = SymPoly::var(var);
    let (mut prev, mut cur) = (SymPoly::zero(), SymPoly::one());
    for k in 0..m {
        let next = x.mul_ref(&cur) - prev.scale(&BigRational::from_integer((k as i64).into()));
        prev = cur;
        cur = next;
    }
    cur
}

/// Maps c·(it)^k ↦ −c·He_{k−1}(x) term by term.
pub fn hermite_transform(r: &SymPoly) -> Result<SymPoly, EdgeworthError> {
    let mut out = SymPoly::zero();
    for (mono, c) in r.terms() {
        let (rest, k) = mono.without(Symbol::it());
        if k == 0 {
            return Err(EdgeworthError::ConstantTerm(r.to_string()));
        }
        let coeff = SymPoly::term(-c.clone(), rest);
        out.add_assign_ref(&coeff.mul_ref(&hermite(k as usize - 1, Symbol::x())));
    }
    Ok(out)
}

/// r₁..r₃ in (it) and p₁..p₃ in x, over the η basis.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeworthPolynomials {
    pub r: [SymPoly; 3],
    pub p: [SymPoly; 3],
}

pub fn edgeworth_polynomials(c: &CumulantSet) -> Result<EdgeworthPolynomials, EdgeworthError> {
    let r = r_polynomials(c);
    let p = [hermite_transform(&r[0])?, hermite_transform(&r[1])?, hermite_transform(&r[2])?];
    Ok(EdgeworthPolynomials { r, p })
}

/// Coefficients of `p` in powers of `var`, each required to be a constant after `values`.
pub fn numeric_coefficients(p: &SymPoly, var: Symbol, values: &BTreeMap<Symbol, SymPoly>) -> Vec<f64> {
    p.substitute(values)
        .coefficients_in(var)
        .iter()
        .map(|c| {
            let v = c.as_constant().unwrap_or_else(|| {
                assert!(c.is_zero(), "coefficient {c} is not numeric");
                BigRational::zero()
            });
            num_traits::ToPrimitive::to_f64(&v).expect("finite coefficient")
        })
        .collect()
}

/// Monomial (it)^k.
pub fn it_pow(k: u32) -> Monomial {
    Monomial::var(Symbol::it(), k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edgeworth::derivation;
    use crate::symbolic::{parse_poly, rat};
    use proptest::prelude::*;

    #[test]
    fn hermite_low_orders() {
        let x = Symbol::x();
        assert_eq!(hermite(0, x), SymPoly::one());
        assert_eq!(hermite(1, x), parse_poly("x").unwrap());
        assert_eq!(hermite(3, x), parse_poly("x^3 - 3*x").unwrap());
        assert_eq!(hermite(4, x), parse_poly("x^4 - 6*x^2 + 3").unwrap());
    }

    #[test]
    fn r1_generic_form() {
        let [r1, r2, r3] = r_polynomials_generic();
        assert_eq!(r1, parse_poly("k12*it + 1/6*k31*it^3").unwrap());
        assert_eq!(r2.coefficient(&it_pow(6).mul(&Monomial::var(Symbol::k(3, 1), 2))), rat(1, 72));
        assert_eq!(r3.coefficient(&it_pow(9).mul(&Monomial::var(Symbol::k(3, 1), 3))), rat(1, 1296));
    }

    #[test]
    fn p1_from_cumulants() {
        assert_eq!(derivation().polys.p[0], parse_poly("-1/12*eta3*(x^2 + 2)").unwrap());
    }

    #[test]
    fn constant_term_rejected() {
        assert!(hermite_transform(&parse_poly("1 + it").unwrap()).is_err());
    }

    fn eval_x(p: &SymPoly, x: f64, k: &BTreeMap<Symbol, f64>) -> f64 {
        p.eval_f64(|s| if s == Symbol::x() { Some(x) } else { k.get(&s).copied() }).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        /// (1/2π)∫ e^{−itx} r(it) e^{−t²/2} dt equals d/dx[p(x)φ(x)] = (p′ − x p)φ.
        #[test]
        fn inversion_matches_fourier_integral(
            ks in prop::array::uniform7(-1.5f64..1.5),
            x in -3.0f64..3.0,
        ) {
            let slots = [(1, 2), (1, 3), (2, 2), (3, 1), (3, 2), (4, 1), (5, 1)];
            let kv: BTreeMap<Symbol, f64> = slots.iter().zip(ks).map(|(&(i, j), v)| (Symbol::k(i, j), v)).collect();
            for r in r_polynomials_generic() {
                let p = hermite_transform(&r).unwrap();
                // r(it) = Σ_m c_m (it)^m; Re[e^{−itx} i^m] cycles cos, sin, −cos, −sin.
                let coeffs: Vec<f64> = r
                    .coefficients_in(Symbol::it())
                    .iter()
                    .map(|c| c.eval_f64(|s| kv.get(&s).copied()).unwrap())
                    .collect();
                let (h, steps) = (0.005, 4800);
                let mut integral = 0.0;
                for s in 0..=steps {
                    let t = -12.0 + s as f64 * h;
                    let w = if s == 0 || s == steps { 0.5 } else { 1.0 };
                    let (sn, cs) = (t * x).sin_cos();
                    let mut re = 0.0;
                    for (m, c) in coeffs.iter().enumerate() {
                        let phase = match m % 4 { 0 => cs, 1 => sn, 2 => -cs, _ => -sn };
                        re += c * t.powi(m as i32) * phase;
                    }
                    integral += w * re * (-0.5 * t * t).exp();
                }
                integral *= h / (2.0 * std::f64::consts::PI);
                let dp = {
                    let d = 1e-5;
                    (eval_x(&p, x + d, &kv) - eval_x(&p, x - d, &kv)) / (2.0 * d)
                };
                let phi = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
                let expected = (dp - x * eval_x(&p, x, &kv)) * phi;
                prop_assert!((integral - expected).abs() < 1e-6 * (1.0 + expected.abs()), "{integral} vs {expected}");
            }
        }
    }
}
