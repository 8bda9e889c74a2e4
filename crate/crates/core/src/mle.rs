//! Perturbation expansion of the location MLE θ̂_n as a series in ε = n^{-1/2}.
//!
//! With ρ = −log f, the score L_n′(θ) = n⁻¹ Σ ρ′(X_i − θ) is Taylor expanded
//! about θ = 0; its θ^k coefficient is (−1)^k/k! · (ε ξ_{k+1} + a_{k+1}).
//! The ansatz θ̂_n = εB₁ + ε²B₂ + ε³B₃ + ε⁴B₄ is substituted and each ε^k
//! coefficient is set to zero in turn, which is linear in B_k with
//! coefficient −a₂.

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::symbolic::{GradedSeries, SymPoly, Symbol, DEFAULT_CAP};

/// ε-order at which the score is expanded; B₄ lives in the ε⁴ slot.
pub const SCORE_CAP: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DerivationError {
    #[error("order {order}: equation is not linear in B{order}")]
    NonLinear { order: usize },
    #[error("order {order}: coefficient of B{order} is {coeff}, expected -a2")]
    UnexpectedCoefficient { order: usize, coeff: String },
    #[error("order {order}: lower-order residual did not vanish: {residual}")]
    LowerOrderResidual { order: usize, residual: String },
    #[error("xi5 appears in B{order}")]
    Xi5Present { order: usize },
}

/// θ-polynomial coefficients of L_n′(θ), index k holding the θ^k slot.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreSeries {
    pub slots: Vec<GradedSeries>,
}

impl ScoreSeries {
    /// L_n′ evaluated at a series θ, truncated at the score cap.
    pub fn evaluate(&self, theta: &GradedSeries) -> GradedSeries {
        let mut out = GradedSeries::zero(SCORE_CAP);
        let mut power = GradedSeries::constant(SymPoly::one(), SCORE_CAP);
        for slot in &self.slots {
            out.add_assign_ref(&slot.mul_ref(&power));
            power = power.mul_ref(theta);
        }
        out
    }
}

/// The four ansatz coefficients in {ξ₁..ξ₄, a₂..a₅, a₂⁻¹}.
#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzSolution {
    pub b: [SymPoly; 4],
}

impl AnsatzSolution {
    /// θ̂_n = Σ ε^k B_k as a series at the score cap.
    pub fn theta(&self) -> GradedSeries {
        theta_series(&self.b)
    }
}

fn theta_series(bs: &[SymPoly]) -> GradedSeries {
    let mut coeffs = vec![SymPoly::zero()];
    coeffs.extend(bs.iter().cloned());
    GradedSeries::from_coeffs(coeffs, SCORE_CAP)
}

fn factorial(k: usize) -> i64 {
    (1..=k as i64).product()
}

pub fn build_score_series() -> ScoreSeries {
    let slots = (0..=4usize)
        .map(|k| {
            let j = (k + 1) as u8;
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let c = BigRational::new(sign.into(), factorial(k).into());
            let constant = if j == 1 { SymPoly::zero() } else { SymPoly::var(Symbol::a(j)) };
            GradedSeries::from_coeffs(vec![constant, SymPoly::var(Symbol::xi(j))], SCORE_CAP).scale(&c)
        })
        .collect();
    ScoreSeries { slots }
}

/// Sequentially zeroes the ε¹..ε⁴ coefficients of L_n′(θ̂_n).
pub fn solve_order_by_order(score: &ScoreSeries) -> Result<AnsatzSolution, DerivationError> {
    let mut solved: Vec<SymPoly> = Vec::new();
    for order in 1..=SCORE_CAP {
        let unknown = Symbol::b(order as u8);
        let mut trial = solved.clone();
        trial.push(SymPoly::var(unknown));
        let value = score.evaluate(&theta_series(&trial));
        for lower in 0..order {
            if !value.coeff(lower).is_zero() {
                return Err(DerivationError::LowerOrderResidual { order, residual: value.coeff(lower).to_string() });
            }
        }
        let eq = value.coeff(order);
        if eq.degree_in(unknown) != 1 {
            return Err(DerivationError::NonLinear { order });
        }
        let alpha = eq.coeff_of(unknown, 1);
        if alpha != -SymPoly::var(Symbol::a(2)) {
            return Err(DerivationError::UnexpectedCoefficient { order, coeff: alpha.to_string() });
        }
        let beta = eq.coeff_of(unknown, 0);
        let bk = beta.mul_ref(&SymPoly::var(Symbol::a2_inv()));
        if bk.contains(|s| *s == Symbol::xi(5)) {
            return Err(DerivationError::Xi5Present { order });
        }
        solved.push(bk);
    }
    let b: [SymPoly; 4] = solved.try_into().expect("four orders");
    Ok(AnsatzSolution { b })
}

/// S_n = √n θ̂_n = B₁ + εB₂ + ε²B₃ + ε³B₄ (a₂ kept symbolic).
pub fn assemble_sn(sol: &AnsatzSolution) -> GradedSeries {
    GradedSeries::from_coeffs(sol.b.to_vec(), DEFAULT_CAP)
}

/// L_n′(θ̂_n) with the solution substituted; zero through ε⁴ for a valid solution.
pub fn residual_check(sol: &AnsatzSolution) -> GradedSeries {
    build_score_series().evaluate(&sol.theta())
}

/// Substitution a₂ ↦ 1, a₂⁻¹ ↦ 1 (Fisher information normalized).
pub fn unit_information() -> BTreeMap<Symbol, SymPoly> {
    BTreeMap::from([(Symbol::a(2), SymPoly::one()), (Symbol::a2_inv(), SymPoly::one())])
}

/// The B's solved once from the canonical score series.
pub fn derived_solution() -> &'static AnsatzSolution {
    static SOL: std::sync::OnceLock<AnsatzSolution> = std::sync::OnceLock::new();
    SOL.get_or_init(|| solve_order_by_order(&build_score_series()).expect("score series solves order by order"))
}
