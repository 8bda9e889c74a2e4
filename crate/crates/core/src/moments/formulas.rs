//! Closed-form general expectations as printed, instantiated at a given k and
//! compared order by order with the block-profile engine.
//!
//! Each display covers only some orders (its trailing "+⋯" drops the rest);
//! only covered orders are compared. Multinomials `{n; p₁,…,p_r, 2,…,2}` fill
//! the remaining slots with 2's and vanish when that is impossible, and
//! 1/(−m)! = 0, so out-of-range terms disappear on their own.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::w::w_moment;
use super::xi::{xi_expectation, XiMonomial};
use crate::symbolic::{SymPoly, DEFAULT_CAP};

/// The printed general formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneralFormula {
    /// E(ξ₁^{2k})
    Xi1Even,
    /// E(ξ₁^{2k+1})
    Xi1Odd,
    /// E(ξ₁^{2k} ξ_j), j = 2..4
    Xi1EvenXiJ(u8),
    /// E(ξ₁^{2k+1} ξ₂)
    Xi1OddXi2,
    /// E(ξ₁^{2k} ξ₂²)
    Xi1EvenXi2Sq,
    /// E(ξ₁^{2k} ξ₂ ξ₃)
    Xi1EvenXi2Xi3,
    /// E(ξ₁^{2k+1} ξ₂ ξ₃)
    Xi1OddXi2Xi3,
    /// E(ξ₁^{2k+1} ξ₂²)
    Xi1OddXi2Sq,
    /// E(ξ₁^{2k+1} ξ₂³)
    Xi1OddXi2Cube,
    /// E(ξ₁^{2k} ξ₂³)
    Xi1EvenXi2Cube,
    /// E(ξ₁^{2k} ξ₂⁴)
    Xi1EvenXi2Fourth,
}

impl GeneralFormula {
    pub const ALL: [GeneralFormula; 13] = [
        GeneralFormula::Xi1Even,
        GeneralFormula::Xi1Odd,
        GeneralFormula::Xi1EvenXiJ(2),
        GeneralFormula::Xi1EvenXiJ(3),
        GeneralFormula::Xi1EvenXiJ(4),
        GeneralFormula::Xi1OddXi2,
        GeneralFormula::Xi1EvenXi2Sq,
        GeneralFormula::Xi1EvenXi2Xi3,
        GeneralFormula::Xi1OddXi2Xi3,
        GeneralFormula::Xi1OddXi2Sq,
        GeneralFormula::Xi1OddXi2Cube,
        GeneralFormula::Xi1EvenXi2Cube,
        GeneralFormula::Xi1EvenXi2Fourth,
    ];

    /// The ξ-monomial the formula describes at a given k.
    pub fn monomial(self, k: usize) -> XiMonomial {
        use GeneralFormula::*;
        let (e1, rest): (usize, [u8; 4]) = match self {
            Xi1Even => (2 * k, [0; 4]),
            Xi1Odd => (2 * k + 1, [0; 4]),
            Xi1EvenXiJ(j) => {
                let mut r = [0; 4];
                r[j as usize - 2] = 1;
                (2 * k, r)
            }
            Xi1OddXi2 => (2 * k + 1, [1, 0, 0, 0]),
            Xi1EvenXi2Sq => (2 * k, [2, 0, 0, 0]),
            Xi1EvenXi2Xi3 => (2 * k, [1, 1, 0, 0]),
            Xi1OddXi2Xi3 => (2 * k + 1, [1, 1, 0, 0]),
            Xi1OddXi2Sq => (2 * k + 1, [2, 0, 0, 0]),
            Xi1OddXi2Cube => (2 * k + 1, [3, 0, 0, 0]),
            Xi1EvenXi2Cube => (2 * k, [3, 0, 0, 0]),
            Xi1EvenXi2Fourth => (2 * k, [4, 0, 0, 0]),
        };
        XiMonomial::new([e1 as u8, rest[0], rest[1], rest[2], rest[3]])
    }

    /// The printed expression at `k`, one entry per ε-order the display covers.
    pub fn printed(self, k: usize) -> Vec<(usize, SymPoly)> {
        use GeneralFormula::*;
        let k = k as i64;
        let n_even = 2 * k;
        let n_odd = 2 * k + 1;
        let m = |idx: &[u8]| w_moment(idx);
        let m2 = |e: i64| pow_or_one(&m(&[1, 1]), e);
        let half = BigRational::new(1.into(), 2.into());
        match self {
            Xi1Even => vec![
                (0, t(mc(n_even, &[]) * inv_fact(k), &[m2(k)])),
                (
                    2,
                    t(-mc(n_even, &[]) * binom(k, 2) * inv_fact(k), &[m2(k)])
                        + t(mc(n_even, &[4]) * inv_fact(k - 2), &[m(&[1, 1, 1, 1]), m2(k - 2)])
                        + t(mc(n_even, &[3, 3]) * &half * inv_fact(k - 3), &[m(&[1, 1, 1]).pow(2), m2(k - 3)]),
                ),
            ],
            Xi1Odd => vec![
                (1, -t(mc(n_odd, &[3]) * inv_fact(k - 1), &[m2(k - 1), m(&[1, 1, 1])])),
                (
                    3,
                    -(t(-binom(k, 2) * mc(n_odd, &[3]) * inv_fact(k - 1), &[m2(k - 1), m(&[1, 1, 1])])
                        + t(mc(n_odd, &[5]) * inv_fact(k - 2), &[m2(k - 2), m(&[1; 5])])
                        + t(mc(n_odd, &[4, 3]) * inv_fact(k - 3), &[m2(k - 3), m(&[1; 4]), m(&[1; 3])])),
                ),
            ],
            Xi1EvenXiJ(j) => {
                let e1j = m(&[1, j]);
                let e11j = m(&[1, 1, j]);
                vec![
                    (
                        1,
                        -(t(mc(n_even, &[]) * inv_fact(k - 1), &[e11j.clone(), m2(k - 1)])
                            + t(mc(n_even, &[1, 3]) * inv_fact(k - 2), &[m(&[1; 3]), e1j.clone(), m2(k - 2)])),
                    ),
                    (
                        3,
                        -(t(-binom(k, 2) * inv_fact(k - 1) * mc(n_even, &[]), &[e11j.clone(), m2(k - 1)])
                            + t(-binom(k, 2) * inv_fact(k - 2) * mc(n_even, &[1, 3]), &[m(&[1; 3]), e1j.clone(), m2(k - 2)])
                            + t(mc(n_even, &[5, 1]) * inv_fact(k - 3), &[m(&[1; 5]), e1j.clone(), m2(k - 3)])
                            + t(mc(n_even, &[4]) * inv_fact(k - 3), &[m(&[1; 4]), e11j.clone(), m2(k - 3)])
                            + t(mc(n_even, &[3, 3]) * inv_fact(k - 3), &[m(&[1; 3]), m(&[1, 1, 1, j]), m2(k - 3)])
                            + t(mc(n_even, &[4]) * inv_fact(k - 2), &[m(&[1, 1, 1, 1, j]), m2(k - 2)])),
                    ),
                ]
            }
            Xi1OddXi2 => {
                let e12 = m(&[1, 2]);
                vec![
                    (0, t(double_factorial(n_odd), &[m2(k), e12.clone()])),
                    (
                        2,
                        t(-binom(k + 1, 2) * inv_fact(k) * mc(n_odd, &[1]), &[e12.clone(), m2(k)])
                            + t(inv_fact(k - 2) * mc(n_odd, &[4, 1]), &[m(&[1; 4]), e12.clone(), m2(k - 2)])
                            + t(&half * inv_fact(k - 3) * mc(n_odd, &[3, 3, 1]), &[m(&[1; 3]).pow(2), e12.clone(), m2(k - 3)])
                            + t(inv_fact(k - 1) * mc(n_odd, &[3]), &[m(&[1, 1, 1, 2]), m2(k - 1)])
                            + t(inv_fact(k - 2) * mc(n_odd, &[3]), &[m(&[1; 3]), m(&[1, 1, 2]), m2(k - 2)]),
                    ),
                ]
            }
            Xi1EvenXi2Sq => {
                let e12 = m(&[1, 2]);
                let e22 = m(&[2, 2]);
                let two = BigRational::from_integer(2.into());
                vec![
                    (
                        0,
                        t(mc(n_even, &[]) * inv_fact(k), &[m2(k), e22.clone()])
                            + t(mc(n_even, &[1, 1]) * inv_fact(k - 1), &[m2(k - 1), e12.pow(2)]),
                    ),
                    (
                        2,
                        t(mc(n_even, &[4]) * inv_fact(k - 2), &[m(&[1; 4]), m2(k - 2), e22.clone()])
                            + t(mc(n_even, &[3, 3]) * &half * inv_fact(k - 3), &[m(&[1; 3]).pow(2), m2(k - 3), e22.clone()])
                            + t(mc(n_even, &[4, 1, 1]) * inv_fact(k - 3), &[m(&[1; 4]), e12.pow(2), m2(k - 3)])
                            + t(mc(n_even, &[1, 3]) * inv_fact(k - 2), &[m(&[1; 3]), m(&[1, 2, 2]), m2(k - 2)])
                            + t(mc(n_even, &[1, 3]) * &two * inv_fact(k - 2), &[m(&[1; 3]), m(&[1, 1, 2]), e12.clone(), m2(k - 2)])
                            + t(mc(n_even, &[1, 3]) * &two * inv_fact(k - 2), &[m(&[1, 1, 1, 2]), e12.clone(), m2(k - 2)])
                            + t(-mc(n_even, &[]) * binom(k + 1, 2) * inv_fact(k), &[m2(k), e22.clone()])
                            + t(mc(n_even, &[]) * &two * &half * inv_fact(k - 2), &[m(&[1, 1, 2]).pow(2), m2(k - 2)])
                            + t(-mc(n_even, &[1, 1]) * binom(k + 1, 2) * inv_fact(k - 1), &[m2(k - 1), e12.pow(2)])
                            + t(mc(n_even, &[]) * inv_fact(k - 1), &[m(&[1, 1, 2, 2]), m2(k - 1)]),
                    ),
                ]
            }
            Xi1EvenXi2Xi3 => vec![(
                0,
                t(mc(n_even, &[]) * inv_fact(k), &[m2(k), m(&[2, 3])])
                    + t(inv_fact(k - 1) * mc(n_even, &[1, 1]), &[m(&[1, 2]), m(&[1, 3])]),
            )],
            Xi1OddXi2Xi3 => vec![(
                1,
                -(t(mc(n_odd, &[3]) * inv_fact(k - 1), &[m(&[1; 3]), m(&[2, 3]), m2(k - 1)])
                    + t(mc(n_odd, &[1, 1, 3]) * inv_fact(k - 2), &[m(&[1; 3]), m(&[1, 2]), m(&[1, 3]), m2(k - 2)])
                    + t(mc(n_odd, &[1]) * inv_fact(k - 1), &[m(&[1, 1, 2]), m(&[1, 3]), m2(k - 1)])
                    + t(mc(n_odd, &[1]) * inv_fact(k - 1), &[m(&[1, 2]), m(&[1, 1, 3]), m2(k - 1)])
                    + t(mc(n_odd, &[1]) * inv_fact(k), &[m(&[1, 2, 3]), m2(k)])),
            )],
            Xi1OddXi2Sq => {
                let two = BigRational::from_integer(2.into());
                vec![(
                    1,
                    -(t(mc(n_odd, &[3]) * inv_fact(k - 1), &[m(&[1; 3]), m(&[2, 2]), m2(k - 1)])
                        + t(mc(n_odd, &[1, 1, 3]) * inv_fact(k - 2), &[m(&[1; 3]), m(&[1, 2]).pow(2), m2(k - 2)])
                        + t(mc(n_odd, &[1]) * inv_fact(k), &[m(&[1, 2, 2]), m2(k)])
                        + t(mc(n_odd, &[1]) * two * inv_fact(k - 1), &[m(&[1, 1, 2]), m(&[1, 2]), m2(k - 1)])),
                )]
            }
            Xi1OddXi2Cube => {
                let three = BigRational::from_integer(3.into());
                let six = BigRational::from_integer(6.into());
                vec![(
                    0,
                    t(mc(n_odd, &[1]) * three * inv_fact(k), &[m(&[1, 2]), m(&[2, 2]), m2(k)])
                        + t(mc(n_odd, &[1, 1, 1]) * six * inv_fact(3) * inv_fact(k - 1), &[m(&[1, 2]).pow(3), m2(k - 1)]),
                )]
            }
            Xi1EvenXi2Cube => {
                let three = BigRational::from_integer(3.into());
                let e12 = m(&[1, 2]);
                vec![(
                    1,
                    -(t(mc(n_even, &[1, 3]) * &three * inv_fact(k - 2), &[m(&[1; 3]), m(&[2, 2]), e12.clone(), m2(k - 2)])
                        + t(inv_fact(k) * mc(n_even, &[]), &[m(&[2, 2, 2]), m2(k)])
                        + t(mc(n_even, &[]) * &three * inv_fact(k - 1), &[m(&[1, 1, 2]), m(&[2, 2]), m2(k - 1)])
                        + t(inv_fact(k - 3) * mc(n_even, &[1, 1, 1, 3]), &[m(&[1; 3]), e12.pow(3), m2(k - 3)])
                        + t(mc(n_even, &[1, 1]) * &three * inv_fact(k - 1), &[m2(k - 1), m(&[1, 2, 2]), e12.clone()])
                        + t(mc(n_even, &[1, 1]) * &three * inv_fact(k - 2), &[m2(k - 2), m(&[1, 1, 2]), e12.pow(2)])),
                )]
            }
            Xi1EvenXi2Fourth => {
                let e12 = m(&[1, 2]);
                let e22 = m(&[2, 2]);
                vec![(
                    0,
                    t(mc(n_even, &[]) * BigRational::from_integer(3.into()) * inv_fact(k), &[e22.pow(2), m2(k)])
                        + t(mc(n_even, &[1, 1]) * BigRational::from_integer(6.into()) * inv_fact(k - 1), &[m2(k - 1), e22.clone(), e12.pow(2)])
                        + t(mc(n_even, &[1, 1, 1, 1]) * inv_fact(k - 2), &[m2(k - 2), e12.pow(4)]),
                )]
            }
        }
    }
}

impl fmt::Display for GeneralFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use GeneralFormula::*;
        let s = match self {
            Xi1Even => "E(xi1^2k)".to_string(),
            Xi1Odd => "E(xi1^(2k+1))".to_string(),
            Xi1EvenXiJ(j) => format!("E(xi1^2k*xi{j})"),
            Xi1OddXi2 => "E(xi1^(2k+1)*xi2)".to_string(),
            Xi1EvenXi2Sq => "E(xi1^2k*xi2^2)".to_string(),
            Xi1EvenXi2Xi3 => "E(xi1^2k*xi2*xi3)".to_string(),
            Xi1OddXi2Xi3 => "E(xi1^(2k+1)*xi2*xi3)".to_string(),
            Xi1OddXi2Sq => "E(xi1^(2k+1)*xi2^2)".to_string(),
            Xi1OddXi2Cube => "E(xi1^(2k+1)*xi2^3)".to_string(),
            Xi1EvenXi2Cube => "E(xi1^2k*xi2^3)".to_string(),
            Xi1EvenXi2Fourth => "E(xi1^2k*xi2^4)".to_string(),
        };
        f.write_str(&s)
    }
}

/// One compared ε-order.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderDiff {
    pub order: usize,
    pub printed: SymPoly,
    pub derived: SymPoly,
}

impl OrderDiff {
    /// derived − printed; zero on agreement.
    pub fn difference(&self) -> SymPoly {
        &self.derived - &self.printed
    }
}

/// Outcome of comparing one formula at one k.
#[derive(Clone, Debug, PartialEq)]
pub struct FormulaReport {
    pub formula: GeneralFormula,
    pub k: usize,
    pub monomial: XiMonomial,
    pub orders: Vec<OrderDiff>,
}

impl FormulaReport {
    pub fn matches(&self) -> bool {
        self.orders.iter().all(|o| o.difference().is_zero())
    }
}

impl fmt::Display for FormulaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.matches() { "match" } else { "MISMATCH" };
        write!(f, "{} k={} [{}]: {status}", self.formula, self.k, self.monomial)?;
        for o in &self.orders {
            let d = o.difference();
            if !d.is_zero() {
                write!(f, "\n  e^{}: derived - printed = {d}", o.order)?;
            }
        }
        Ok(())
    }
}

/// Compares a printed general formula at `k` (0..=4) with the engine.
pub fn verify_general_formula(formula: GeneralFormula, k: usize) -> FormulaReport {
    assert!(k <= 4, "k must be in 0..=4");
    let monomial = formula.monomial(k);
    let derived = xi_expectation(&monomial).expect("degree within bound");
    let orders = formula
        .printed(k)
        .into_iter()
        .filter(|(order, _)| *order <= DEFAULT_CAP)
        .map(|(order, printed)| OrderDiff { order, printed, derived: derived.coeff(order).clone() })
        .collect();
    FormulaReport { formula, k, monomial, orders }
}

/// Every formula at every k in `ks`.
pub fn verify_general_formulas(ks: impl IntoIterator<Item = usize> + Clone) -> Vec<FormulaReport> {
    GeneralFormula::ALL
        .iter()
        .flat_map(|&f| ks.clone().into_iter().map(move |k| verify_general_formula(f, k)))
        .collect()
}

fn t(c: BigRational, factors: &[SymPoly]) -> SymPoly {
    if c.is_zero() {
        return SymPoly::zero();
    }
    factors.iter().fold(SymPoly::constant(c), |acc, f| acc.mul_ref(f))
}

fn pow_or_one(p: &SymPoly, e: i64) -> SymPoly {
    if e <= 0 {
        SymPoly::one()
    } else {
        p.pow(e as u32)
    }
}

fn fact(n: i64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

fn inv_fact(n: i64) -> BigRational {
    if n < 0 {
        BigRational::zero()
    } else {
        BigRational::new(BigInt::one(), fact(n))
    }
}

fn binom(n: i64, k: i64) -> BigRational {
    if k < 0 || n < k {
        return BigRational::zero();
    }
    BigRational::new(fact(n), fact(k) * fact(n - k))
}

/// Multinomial {n; parts, 2, …, 2} with the remainder filled by 2's.
fn mc(n: i64, parts: &[i64]) -> BigRational {
    let rest = n - parts.iter().sum::<i64>();
    if rest < 0 || rest % 2 != 0 {
        return BigRational::zero();
    }
    let mut den = BigInt::from(2).pow((rest / 2) as u32);
    for &p in parts {
        den *= fact(p);
    }
    BigRational::new(fact(n), den)
}

fn double_factorial(n: i64) -> BigRational {
    let mut acc = BigInt::one();
    let mut i = n;
    while i > 1 {
        acc *= BigInt::from(i);
        i -= 2;
    }
    BigRational::from_integer(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse_poly;

    #[test]
    fn odd_xi1_xi2_at_k0_is_w_cross_moment() {
        let r = verify_general_formula(GeneralFormula::Xi1OddXi2, 0);
        assert!(r.matches(), "{r}");
        assert_eq!(r.orders[0].printed, parse_poly("-eta3/2").unwrap());
    }

    #[test]
    fn xi2_fourth_leading_term() {
        let p = GeneralFormula::Xi1EvenXi2Fourth.printed(1);
        let expected = w_moment(&[2, 2]).pow(2).scale(&BigRational::from_integer(3.into()))
            + w_moment(&[2, 2]).mul_ref(&w_moment(&[1, 2]).pow(2)).scale(&BigRational::from_integer(12.into()));
        assert_eq!(p[0].1, expected);
        assert!(verify_general_formula(GeneralFormula::Xi1EvenXi2Fourth, 1).matches());
    }

    #[test]
    fn xi2_square_k1_matches_engine() {
        let r = verify_general_formula(GeneralFormula::Xi1EvenXi2Sq, 1);
        assert!(r.matches(), "{r}");
    }

    #[test]
    fn complete_displays_match_for_all_small_k() {
        use GeneralFormula::*;
        for f in [Xi1Even, Xi1OddXi2, Xi1EvenXi2Xi3, Xi1OddXi2Xi3, Xi1OddXi2Sq, Xi1OddXi2Cube, Xi1EvenXi2Cube, Xi1EvenXi2Fourth] {
            for k in 0..=4 {
                let r = verify_general_formula(f, k);
                assert!(r.matches(), "{r}");
            }
        }
    }

    #[test]
    fn truncated_displays_match_below_k4() {
        use GeneralFormula::*;
        for f in [Xi1Odd, Xi1EvenXiJ(2), Xi1EvenXiJ(3), Xi1EvenXiJ(4)] {
            for k in 0..=3 {
                let r = verify_general_formula(f, k);
                assert!(r.matches(), "{r}");
            }
            // the display omits the three-triple profile, which first appears at k = 4
            assert!(!verify_general_formula(f, 4).matches());
        }
    }

    #[test]
    fn xi2_square_display_factorial_mismatch() {
        // the m3·E(w1²w2)·E(w1w2) term carries 1/(k−2)! where the profile count needs 1/(k−3)!
        for k in [0, 1, 3] {
            assert!(verify_general_formula(GeneralFormula::Xi1EvenXi2Sq, k).matches(), "k={k}");
        }
        let r = verify_general_formula(GeneralFormula::Xi1EvenXi2Sq, 2);
        assert!(!r.matches());
        let diff = &r.orders[1].difference();
        let expected = -(w_moment(&[1, 1, 1]) * w_moment(&[1, 1, 2]) * w_moment(&[1, 2])).scale(&BigRational::from_integer(8.into()));
        assert_eq!(diff, &expected);
    }
}
