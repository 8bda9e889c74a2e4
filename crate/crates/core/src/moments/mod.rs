//! Expectation calculus for normalized i.i.d. sums over the η moment basis.

pub mod formulas;
pub mod psi;
pub mod w;
pub mod xi;

use crate::symbolic::PsiMonomial;

pub use formulas::{verify_general_formula, verify_general_formulas, FormulaReport, GeneralFormula, OrderDiff};
pub use psi::{expect_psi_poly, ibp_reduce, irreducible_monomials, psi_expectation};
pub use w::{a_substitution, a_value, w_expand, w_moment};
pub use xi::{
    expect_series, expect_xi_poly, xi_expectation, xi_expectation_with, BlockMoments, EtaBlocks, XiMonomial,
    MAX_XI_DEGREE,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MomentError {
    #[error("E{0} does not reduce to the eta basis")]
    NonReducible(PsiMonomial),
    #[error("integration by parts needs a factor psi_i with i >= 2, got {0}")]
    IbpNotApplicable(PsiMonomial),
    #[error("xi degree {degree} exceeds the supported bound {max}")]
    DegreeOverflow { degree: usize, max: usize },
}
