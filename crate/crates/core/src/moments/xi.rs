//! Expectations of products of normalized sums ξ_j = n^{-1/2} Σ_i (ρ^(j)(X_i) − a_j).
//!
//! Expanding ∏ ξ_j^{m_j} = (−ε)^d ∏ (Σ_i w_{j,i})^{m_j} and grouping factor
//! positions by observation gives a sum over multisets of blocks (each block
//! holds the factors drawn from one observation). Blocks of size one vanish.
//! A profile with b blocks contributes (n)_b ε^d = ε^{d−2b} ∏_{i<b}(1 − iε²)
//! times the number of position assignments and the product of block moments.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::w::w_moment;
use super::MomentError;
use crate::symbolic::{GradedSeries, Monomial, SymPoly, Symbol, DEFAULT_CAP};

/// Largest total ξ-degree accepted by [`xi_expectation`].
pub const MAX_XI_DEGREE: usize = 20;

/// Exponents of ξ₁..ξ₅.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct XiMonomial([u8; 5]);

impl XiMonomial {
    pub fn new(exps: [u8; 5]) -> Self {
        XiMonomial(exps)
    }

    /// The ξ part of a monomial; `None` if it contains any other symbol.
    pub fn from_monomial(m: &Monomial) -> Option<Self> {
        let mut e = [0u8; 5];
        for &(s, k) in m.factors() {
            let j = s.as_xi()?;
            e[j as usize - 1] = u8::try_from(k).ok()?;
        }
        Some(XiMonomial(e))
    }

    pub fn exponents(&self) -> [u8; 5] {
        self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&k| k as usize).sum()
    }

    pub fn to_monomial(&self) -> Monomial {
        Monomial::from_pairs(
            self.0.iter().enumerate().filter(|(_, &k)| k > 0).map(|(j, &k)| (Symbol::xi(j as u8 + 1), k as u32)),
        )
    }
}

impl fmt::Display for XiMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.to_monomial();
        if m.is_one() {
            write!(f, "1")
        } else {
            write!(f, "{m}")
        }
    }
}

/// Source of single-observation joint moments E[∏ w_j^{c_j}].
pub trait BlockMoments {
    fn block(&self, counts: &[u8; 5]) -> SymPoly;
}

/// Block moments in the η basis derived from the ψ expansions of w_j.
#[derive(Clone, Copy, Debug, Default)]
pub struct EtaBlocks;

impl BlockMoments for EtaBlocks {
    fn block(&self, counts: &[u8; 5]) -> SymPoly {
        let idx: Vec<u8> = counts.iter().enumerate().flat_map(|(j, &c)| std::iter::repeat(j as u8 + 1).take(c as usize)).collect();
        w_moment(&idx)
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Coefficients of ∏_{i<b}(1 − i x) up to x^max.
fn falling_coeffs(b: usize, max: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); max + 1];
    c[0] = BigInt::one();
    for i in 1..b {
        for k in (1..=max).rev() {
            let prev = c[k - 1].clone();
            c[k] -= prev * BigInt::from(i);
        }
    }
    c
}

fn block_types(m: &[u8; 5], max_size: usize) -> Vec<[u8; 5]> {
    let mut out = Vec::new();
    let mut cur = [0u8; 5];
    fn rec(j: usize, m: &[u8; 5], cur: &mut [u8; 5], max_size: usize, out: &mut Vec<[u8; 5]>) {
        if j == 5 {
            let s: usize = cur.iter().map(|&c| c as usize).sum();
            if (2..=max_size).contains(&s) {
                out.push(*cur);
            }
            return;
        }
        for c in 0..=m[j] {
            cur[j] = c;
            rec(j + 1, m, cur, max_size, out);
        }
        cur[j] = 0;
    }
    rec(0, m, &mut cur, max_size, &mut out);
    out
}

/// Visits every multiset of blocks partitioning `m` with total excess Σ(|c|−2) ≤ `max_excess`.
fn for_each_profile(m: &[u8; 5], max_excess: usize, mut visit: impl FnMut(&[[u8; 5]])) {
    let types = block_types(m, 2 + max_excess);
    fn rec(
        rem: [u8; 5],
        start: usize,
        excess: usize,
        max_excess: usize,
        types: &[[u8; 5]],
        chosen: &mut Vec<[u8; 5]>,
        visit: &mut dyn FnMut(&[[u8; 5]]),
    ) {
        let left: usize = rem.iter().map(|&c| c as usize).sum();
        if left == 0 {
            visit(chosen);
            return;
        }
        for (t, ty) in types.iter().enumerate().skip(start) {
            let size: usize = ty.iter().map(|&c| c as usize).sum();
            if excess + size - 2 > max_excess || (0..5).any(|j| ty[j] > rem[j]) {
                continue;
            }
            let mut next = rem;
            for j in 0..5 {
                next[j] -= ty[j];
            }
            chosen.push(*ty);
            rec(next, t, excess + size - 2, max_excess, types, chosen, visit);
            chosen.pop();
        }
    }
    rec(*m, 0, 0, max_excess, &types, &mut Vec::new(), &mut visit);
}

/// Number of ways to assign the labelled factor positions to a block profile.
fn profile_count(m: &[u8; 5], blocks: &[[u8; 5]]) -> BigInt {
    let mut num = BigInt::one();
    for &k in m {
        num *= factorial(k as usize);
    }
    let mut den = BigInt::one();
    let mut mult: HashMap<[u8; 5], usize> = HashMap::new();
    for b in blocks {
        for &c in b {
            den *= factorial(c as usize);
        }
        *mult.entry(*b).or_default() += 1;
    }
    for &k in mult.values() {
        den *= factorial(k);
    }
    num / den
}

/// E[∏ ξ_j^{m_j}] as a series in ε with η-basis coefficients, truncated at ε³.
pub fn xi_expectation(m: &XiMonomial) -> Result<GradedSeries, MomentError> {
    if m.degree() > MAX_XI_DEGREE {
        return Err(MomentError::DegreeOverflow { degree: m.degree(), max: MAX_XI_DEGREE });
    }
    Ok(xi_expectation_with(m, &EtaBlocks, DEFAULT_CAP))
}

/// Block-profile expansion for an arbitrary block-moment source and order cap.
pub fn xi_expectation_with(m: &XiMonomial, blocks: &impl BlockMoments, cap: usize) -> GradedSeries {
    let d = m.degree();
    let mut out = GradedSeries::zero(cap);
    if d == 0 {
        return GradedSeries::constant(SymPoly::one(), cap);
    }
    let mut cache: HashMap<[u8; 5], SymPoly> = HashMap::new();
    let sign = if d % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    for_each_profile(&m.0, cap, |profile| {
        let b = profile.len();
        let excess = d - 2 * b;
        let count = profile_count(&m.0, profile) * &sign;
        let mut value = SymPoly::constant(BigRational::from_integer(count));
        for blk in profile {
            let v = cache.entry(*blk).or_insert_with(|| blocks.block(blk));
            value = value.mul_ref(v);
            if value.is_zero() {
                return;
            }
        }
        let ff = falling_coeffs(b, (cap - excess) / 2);
        for (i, c) in ff.into_iter().enumerate() {
            if !c.is_zero() {
                let term = value.scale(&BigRational::from_integer(c));
                out.add_assign_ref(&GradedSeries::monomial(term, excess + 2 * i, cap));
            }
        }
    });
    out
}

/// Term-wise expectation of a polynomial in ξ (other symbols are constants).
pub fn expect_xi_poly(p: &SymPoly, cap: usize) -> Result<GradedSeries, MomentError> {
    let mut out = GradedSeries::zero(cap);
    for (mono, c) in p.terms() {
        let (xi, rest) = mono.split(Symbol::is_xi);
        let xm = XiMonomial::from_monomial(&xi).expect("xi part");
        if xm.degree() > MAX_XI_DEGREE {
            return Err(MomentError::DegreeOverflow { degree: xm.degree(), max: MAX_XI_DEGREE });
        }
        let e = xi_expectation_with(&xm, &EtaBlocks, cap);
        out.add_assign_ref(&e.mul_poly(&SymPoly::term(c.clone(), rest)));
    }
    Ok(out)
}

/// Expectation of a series whose coefficients are polynomials in ξ.
pub fn expect_series(s: &GradedSeries) -> Result<GradedSeries, MomentError> {
    let cap = s.cap();
    let mut out = GradedSeries::zero(cap);
    for (k, c) in s.coeffs().iter().enumerate() {
        if !c.is_zero() {
            out.add_assign_ref(&expect_xi_poly(c, cap - k)?.with_cap(cap).shift(k));
        }
    }
    Ok(out)
}
