use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Symbol;

/// Builds the rational `num/den`.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// A power product of symbols, kept sorted by symbol with positive exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Symbol, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(s: Symbol, e: u32) -> Self {
        Monomial::from_pairs([(s, e)])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Symbol, u32)>) -> Self {
        let mut map: BTreeMap<Symbol, u32> = BTreeMap::new();
        for (s, e) in pairs {
            *map.entry(s).or_insert(0) += e;
        }
        Monomial::canonical(map)
    }

    fn canonical(mut map: BTreeMap<Symbol, u32>) -> Self {
        let a2 = Symbol::a(2);
        let inv = Symbol::a2_inv();
        if let (Some(&p), Some(&q)) = (map.get(&a2), map.get(&inv)) {
            let m = p.min(q);
            map.insert(a2, p - m);
            map.insert(inv, q - m);
        }
        Monomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn exponent(&self, s: Symbol) -> u32 {
        self.0
            .binary_search_by(|(t, _)| t.cmp(&s))
            .map_or(0, |i| self.0[i].1)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    /// Total degree restricted to symbols accepted by `pred`.
    pub fn degree_where(&self, pred: impl Fn(&Symbol) -> bool) -> u32 {
        self.0.iter().filter(|(s, _)| pred(s)).map(|&(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        if other.is_one() {
            return self.clone();
        }
        if self.is_one() {
            return other.clone();
        }
        Monomial::from_pairs(self.0.iter().chain(other.0.iter()).copied())
    }

    /// Splits into (factors accepted by `pred`, remaining factors).
    pub fn split(&self, pred: impl Fn(&Symbol) -> bool) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().partition(|(s, _)| pred(s));
        (Monomial(a), Monomial(b))
    }

    /// Removes `s` entirely, returning its exponent.
    pub fn without(&self, s: Symbol) -> (Monomial, u32) {
        let e = self.exponent(s);
        (Monomial(self.0.iter().filter(|(t, _)| *t != s).copied().collect()), e)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (s, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// No stored coefficient is zero, so structural equality is polynomial equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SymPoly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl SymPoly {
    pub fn zero() -> Self {
        SymPoly::default()
    }

    pub fn one() -> Self {
        SymPoly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        SymPoly::term(c, Monomial::one())
    }

    pub fn int(c: i64) -> Self {
        SymPoly::constant(rat(c, 1))
    }

    pub fn var(s: Symbol) -> Self {
        SymPoly::term(BigRational::one(), Monomial::var(s, 1))
    }

    pub fn var_pow(s: Symbol, e: u32) -> Self {
        SymPoly::term(BigRational::one(), Monomial::var(s, e))
    }

    pub fn term(c: BigRational, m: Monomial) -> Self {
        let mut p = SymPoly::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    /// The constant term, if the polynomial has no symbols at all.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &SymPoly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &SymPoly, c: &BigRational) {
        if c.is_zero() {
            return;
        }
        for (m, d) in &other.terms {
            self.add_term(m.clone(), d * c);
        }
    }

    pub fn scale(&self, c: &BigRational) -> SymPoly {
        if c.is_zero() {
            return SymPoly::zero();
        }
        SymPoly { terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect() }
    }

    pub fn mul_ref(&self, other: &SymPoly) -> SymPoly {
        let mut out = SymPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> SymPoly {
        let mut out = SymPoly::one();
        for _ in 0..e {
            out = out.mul_ref(self);
        }
        out
    }

    /// Sum of the terms accepted by `keep`.
    pub fn filter_terms(&self, keep: impl Fn(&Monomial, &BigRational) -> bool) -> SymPoly {
        SymPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, c)| keep(m, c))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn contains(&self, pred: impl Fn(&Symbol) -> bool) -> bool {
        self.terms.keys().any(|m| m.factors().iter().any(|(s, _)| pred(s)))
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut v: Vec<Symbol> =
            self.terms.keys().flat_map(|m| m.factors().iter().map(|&(s, _)| s)).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn degree_in(&self, s: Symbol) -> u32 {
        self.terms.keys().map(|m| m.exponent(s)).max().unwrap_or(0)
    }

    /// Coefficient of `s^e` as a polynomial in the remaining symbols.
    pub fn coeff_of(&self, s: Symbol, e: u32) -> SymPoly {
        let mut out = SymPoly::zero();
        for (m, c) in &self.terms {
            let (rest, k) = m.without(s);
            if k == e {
                out.add_term(rest, c.clone());
            }
        }
        out
    }

    /// Dense coefficients in `s`: index k holds the coefficient of `s^k`.
    pub fn coefficients_in(&self, s: Symbol) -> Vec<SymPoly> {
        let deg = self.degree_in(s) as usize;
        let mut out = vec![SymPoly::zero(); if self.is_zero() { 0 } else { deg + 1 }];
        for (m, c) in &self.terms {
            let (rest, k) = m.without(s);
            out[k as usize].add_term(rest, c.clone());
        }
        out
    }

    /// Polynomial substitution of symbols by polynomials; unmapped symbols stay.
    pub fn substitute(&self, map: &BTreeMap<Symbol, SymPoly>) -> SymPoly {
        let mut cache: BTreeMap<(Symbol, u32), SymPoly> = BTreeMap::new();
        let mut out = SymPoly::zero();
        for (m, c) in &self.terms {
            let mut acc = SymPoly::one();
            let mut kept = Vec::new();
            for &(s, e) in m.factors() {
                match map.get(&s) {
                    Some(p) => {
                        let pe = cache.entry((s, e)).or_insert_with(|| p.pow(e));
                        acc = acc.mul_ref(pe);
                    }
                    None => kept.push((s, e)),
                }
            }
            let kept = SymPoly::term(c.clone(), Monomial::from_pairs(kept));
            out.add_assign_ref(&acc.mul_ref(&kept));
        }
        out
    }

    /// Exact evaluation when every symbol has a rational value.
    pub fn eval_rational(&self, value: impl Fn(Symbol) -> Option<BigRational>) -> Option<BigRational> {
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(s, e) in m.factors() {
                let v = value(s)?;
                for _ in 0..e {
                    t *= &v;
                }
            }
            total += t;
        }
        Some(total)
    }

    /// Floating-point evaluation; `None` if a symbol has no value.
    pub fn eval_f64(&self, value: impl Fn(Symbol) -> Option<f64>) -> Option<f64> {
        let mut total = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.to_f64()?;
            for &(s, e) in m.factors() {
                t *= value(s)?.powi(e as i32);
            }
            total += t;
        }
        Some(total)
    }

    /// Largest absolute coefficient, as f64 (0 for the zero polynomial).
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY)).fold(0.0, f64::max)
    }
}

impl From<Symbol> for SymPoly {
    fn from(s: Symbol) -> Self {
        SymPoly::var(s)
    }
}

impl Add for SymPoly {
    type Output = SymPoly;
    fn add(mut self, rhs: SymPoly) -> SymPoly {
        self.add_assign_ref(&rhs);
        self
    }
}

impl Add<&SymPoly> for &SymPoly {
    type Output = SymPoly;
    fn add(self, rhs: &SymPoly) -> SymPoly {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Sub for SymPoly {
    type Output = SymPoly;
    fn sub(mut self, rhs: SymPoly) -> SymPoly {
        self.add_scaled(&rhs, &-BigRational::one());
        self
    }
}

impl Sub<&SymPoly> for &SymPoly {
    type Output = SymPoly;
    fn sub(self, rhs: &SymPoly) -> SymPoly {
        let mut out = self.clone();
        out.add_scaled(rhs, &-BigRational::one());
        out
    }
}

impl Neg for SymPoly {
    type Output = SymPoly;
    fn neg(self) -> SymPoly {
        self.scale(&-BigRational::one())
    }
}

impl Mul for SymPoly {
    type Output = SymPoly;
    fn mul(self, rhs: SymPoly) -> SymPoly {
        self.mul_ref(&rhs)
    }
}

impl Mul<&SymPoly> for &SymPoly {
    type Output = SymPoly;
    fn mul(self, rhs: &SymPoly) -> SymPoly {
        self.mul_ref(rhs)
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, c: &BigRational) -> fmt::Result {
    if c.denom().is_one() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for SymPoly {
    /// Canonical text: terms in monomial order, `coef*sym^e*...`, rationals as `p/q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write_rational(f, &abs)?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write_rational(f, &abs)?;
                write!(f, "*{m}")?;
            }
        }
        Ok(())
    }
}
