//! Cumulants, Edgeworth polynomials and Cornish–Fisher coefficients of √n θ̂_n.

pub mod cf;
pub mod cumulants;
pub mod model;
pub mod polys;

use std::sync::OnceLock;

pub use cf::{cornish_fisher, cornish_fisher_residual, CornishFisherCoefficients};
pub use cumulants::{cumulants, sn_moments, sn_standardized, CumulantSet};
pub use model::{CdfValue, ExpansionModel, MAX_ORDER};
pub use polys::{edgeworth_polynomials, hermite, hermite_transform, r_polynomials, r_polynomials_generic, EdgeworthPolynomials};

use crate::mle::{assemble_sn, derived_solution, AnsatzSolution};
use crate::moments::MomentError;
use crate::symbolic::GradedSeries;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EdgeworthError {
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error("cumulant structure violated: {0}")]
    Structure(String),
    #[error("auxiliary moment survived into the cumulants: {0}")]
    SurvivingMu(String),
    #[error("r-polynomial has a constant term: {0}")]
    ConstantTerm(String),
    #[error("probability {0} is outside (0, 1)")]
    Domain(f64),
    #[error("expansion order {0} exceeds 3")]
    Order(usize),
    #[error("sample size must be at least 1")]
    SampleSize,
    #[error("eta value {0} is not finite")]
    NonFinite(f64),
}

/// Every symbolic object of the pipeline, from the B's to A, B, C.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub solution: AnsatzSolution,
    /// S_n with a₂ kept symbolic.
    pub sn: GradedSeries,
    /// E S_n^k, k = 1..=5.
    pub moments: [GradedSeries; 5],
    pub cumulants: CumulantSet,
    pub polys: EdgeworthPolynomials,
    pub cf: CornishFisherCoefficients,
}

impl Derivation {
    pub fn compute() -> Result<Self, EdgeworthError> {
        let solution = derived_solution().clone();
        let sn = assemble_sn(&solution);
        let moments = sn_moments()?;
        let cumulants = cumulants(&moments)?;
        let polys = edgeworth_polynomials(&cumulants)?;
        let cf = cornish_fisher(&polys.p);
        Ok(Derivation { solution, sn, moments, cumulants, polys, cf })
    }
}

/// The derivation computed once per process.
pub fn try_derivation() -> Result<&'static Derivation, EdgeworthError> {
    static CELL: OnceLock<Result<Derivation, EdgeworthError>> = OnceLock::new();
    CELL.get_or_init(Derivation::compute).as_ref().map_err(Clone::clone)
}

/// [`try_derivation`], panicking on an internal derivation fault.
pub fn derivation() -> &'static Derivation {
    try_derivation().expect("symbolic derivation")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::a_substitution;
    use crate::symbolic::{SymPoly, Symbol};
    use std::collections::BTreeMap;

    fn gaussian() -> BTreeMap<Symbol, SymPoly> {
        [(2, 2), (3, 0), (4, 3), (5, 0), (6, 0)].iter().map(|&(j, v)| (Symbol::eta(j), SymPoly::int(v))).collect()
    }

    #[test]
    fn gaussian_collapse_is_exact() {
        let d = derivation();
        let g = gaussian();
        for (i, j) in [(1, 2), (1, 3), (2, 2), (3, 1), (3, 2), (4, 1), (5, 1)] {
            assert!(d.cumulants.k(i, j).substitute(&g).is_zero(), "k{i}{j}");
        }
        for p in d.polys.p.iter().chain(d.cf.as_array()) {
            assert!(p.substitute(&g).is_zero());
        }
    }

    #[test]
    fn symmetric_parity() {
        let d = derivation();
        let odd: BTreeMap<Symbol, SymPoly> = [3, 5, 6].iter().map(|&j| (Symbol::eta(j), SymPoly::zero())).collect();
        assert!(d.polys.p[0].substitute(&odd).is_zero());
        assert!(d.polys.p[2].substitute(&odd).is_zero());
        assert!(d.cf.a.substitute(&odd).is_zero());
        assert!(d.cf.c.substitute(&odd).is_zero());
        let p2 = d.polys.p[1].substitute(&odd);
        let b = d.cf.b.substitute(&odd);
        for (m, _) in p2.terms().chain(b.terms()) {
            let deg = m.exponent(Symbol::x()) + m.exponent(Symbol::z());
            assert_eq!(deg % 2, 1, "{m}");
        }
    }

    #[test]
    fn polynomial_degrees() {
        let d = derivation();
        let degs: Vec<u32> = d.polys.p.iter().map(|p| p.degree_in(Symbol::x())).collect();
        assert_eq!(degs, vec![2, 5, 8]);
        let cf: Vec<u32> = d.cf.as_array().iter().map(|p| p.degree_in(Symbol::z())).collect();
        assert_eq!(cf, vec![2, 3, 4]);
    }

    #[test]
    fn sn_uses_eta_basis_only() {
        let sn = sn_standardized();
        for c in sn.coeffs() {
            assert!(!c.contains(|s| s.as_a().is_some() || s.is_a2_inv()));
        }
        assert!(a_substitution().contains_key(&Symbol::a(5)));
    }
}
