//! Moments and cumulants of S_n = √n θ̂_n over the η basis.

use std::fmt;

use num_rational::BigRational;

use super::EdgeworthError;
use crate::mle::{assemble_sn, derived_solution};
use crate::moments::{a_substitution, expect_series};
use crate::symbolic::{GradedSeries, SymPoly, Symbol};

/// S_n with a₂ = 1 and a₃..a₅ replaced by their η expressions.
pub fn sn_standardized() -> GradedSeries {
    assemble_sn(derived_solution()).map(|c| c.substitute(a_substitution()))
}

/// E[S_n^k] for k = 1..=5, truncated at ε³.
pub fn sn_moments() -> Result<[GradedSeries; 5], EdgeworthError> {
    let sn = sn_standardized();
    let mut out = Vec::with_capacity(5);
    let mut power = sn.clone();
    for k in 1..=5 {
        if k > 1 {
            power = power.mul_ref(&sn);
        }
        out.push(expect_series(&power)?);
    }
    Ok(out.try_into().expect("five moments"))
}

/// ε-order of each coefficient slot k_{ij}: κ_i = Σ_j k_{ij} ε^{order}.
pub const SLOTS: [((u8, u8), usize); 8] = [
    ((1, 2), 1),
    ((1, 3), 3),
    ((2, 1), 0),
    ((2, 2), 2),
    ((3, 1), 1),
    ((3, 2), 3),
    ((4, 1), 2),
    ((5, 1), 3),
];

/// κ₁..κ₅ as graded series.
#[derive(Clone, Debug, PartialEq)]
pub struct CumulantSet {
    pub kappa: [GradedSeries; 5],
}

impl CumulantSet {
    /// Coefficient k_{ij} (the ε-slot of κ_i fixed by the cumulant structure).
    pub fn k(&self, i: u8, j: u8) -> &SymPoly {
        let order = SLOTS.iter().find(|(s, _)| *s == (i, j)).map(|(_, o)| *o).expect("cumulant slot");
        self.kappa[i as usize - 1].coeff(order)
    }

    /// Substitution k_{ij} ↦ value for every slot except k₂₁ (fixed at 1).
    pub fn k_substitution(&self) -> std::collections::BTreeMap<Symbol, SymPoly> {
        SLOTS.iter().map(|&((i, j), _)| (Symbol::k(i, j), self.k(i, j).clone())).collect()
    }

    /// Structure check: κ_i vanishes outside its slots, k₂₁ = 1, and no μ survives.
    pub fn check(&self) -> Result<(), EdgeworthError> {
        for (i, kappa) in self.kappa.iter().enumerate() {
            let i = i as u8 + 1;
            for (order, c) in kappa.coeffs().iter().enumerate() {
                let allowed = SLOTS.iter().any(|&((a, _), o)| a == i && o == order);
                if !allowed && !c.is_zero() {
                    return Err(EdgeworthError::Structure(format!("kappa{i} has e^{order} term {c}")));
                }
                if c.contains(|s| s.as_mu().is_some()) {
                    return Err(EdgeworthError::SurvivingMu(format!("kappa{i} e^{order}: {c}")));
                }
            }
        }
        if *self.k(2, 1) != SymPoly::one() {
            return Err(EdgeworthError::Structure(format!("k21 = {}, expected 1", self.k(2, 1))));
        }
        Ok(())
    }
}

impl fmt::Display for CumulantSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, k) in self.kappa.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            writeln!(f, "kappa{}:", i + 1)?;
            write!(f, "{k}")?;
        }
        Ok(())
    }
}

/// Cumulants from raw moments; central moments give κ₄ = μ₄ − 3κ₂², κ₅ = μ₅ − 10κ₂κ₃.
pub fn cumulants(m: &[GradedSeries; 5]) -> Result<CumulantSet, EdgeworthError> {
    let c = |v: i64| BigRational::from_integer(v.into());
    let [m1, m2, m3, m4, m5] = m;
    let m1_2 = m1.mul_ref(m1);
    let m1_3 = m1_2.mul_ref(m1);
    let m1_4 = m1_3.mul_ref(m1);
    let m1_5 = m1_4.mul_ref(m1);
    let k1 = m1.clone();
    let k2 = m2.sub_ref(&m1_2);
    let k3 = m3.sub_ref(&m2.mul_ref(m1).scale(&c(3))).add_ref(&m1_3.scale(&c(2)));
    let central4 = m4
        .sub_ref(&m3.mul_ref(m1).scale(&c(4)))
        .add_ref(&m2.mul_ref(&m1_2).scale(&c(6)))
        .sub_ref(&m1_4.scale(&c(3)));
    let central5 = m5
        .sub_ref(&m4.mul_ref(m1).scale(&c(5)))
        .add_ref(&m3.mul_ref(&m1_2).scale(&c(10)))
        .sub_ref(&m2.mul_ref(&m1_3).scale(&c(10)))
        .add_ref(&m1_5.scale(&c(4)));
    let k4 = central4.sub_ref(&k2.mul_ref(&k2).scale(&c(3)));
    let k5 = central5.sub_ref(&k2.mul_ref(&k3).scale(&c(10)));
    let set = CumulantSet { kappa: [k1, k2, k3, k4, k5] };
    set.check()?;
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edgeworth::derivation;
    use crate::symbolic::parse_series;

    #[test]
    fn first_two_moments() {
        let d = derivation();
        assert_eq!(
            d.moments[0],
            parse_series(
                "e^1: eta3/4\ne^3: 1/9*eta4*eta3 + 1/16*eta5 - 1/4*eta3 + 5/24*eta3*eta2 - 11/64*eta3^3 - 3/8*eta6",
                3
            )
            .unwrap()
        );
        assert_eq!(d.moments[1], parse_series("e^0: 1\ne^2: -1/16*eta3^2 - 1/3*eta4 + eta2 - 1", 3).unwrap());
    }

    #[test]
    fn kappa_structure_and_leading_terms() {
        let d = derivation();
        assert_eq!(d.cumulants.k(3, 1).to_string(), "1/2*eta3");
        assert_eq!(*d.cumulants.k(4, 1), crate::symbolic::parse_poly("-3 - 5/3*eta4 + 4*eta2").unwrap());
        assert!(d.cumulants.check().is_ok());
    }

    #[test]
    fn kappa3_from_leading_moments() {
        // 5η₃/4 − 3·(η₃/4)·1 = η₃/2
        let d = derivation();
        let lead = |k: usize, o: usize| d.moments[k].coeff(o).clone();
        let k31 = lead(2, 1) - lead(1, 0).mul_ref(&lead(0, 1)).scale(&BigRational::from_integer(3.into()));
        assert_eq!(k31, *d.cumulants.k(3, 1));
    }

    #[test]
    fn structure_violation_is_reported() {
        let mut bad = derivation().cumulants.clone();
        bad.kappa[3] = GradedSeries::constant(SymPoly::one(), 3);
        assert!(matches!(bad.check(), Err(EdgeworthError::Structure(_))));
    }
}
