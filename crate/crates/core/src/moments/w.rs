//! Centered score derivatives w_j = −(ρ^(j)(X) − a_j) in ψ form, and their joint moments.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use crate::symbolic::{Monomial, SymPoly, Symbol};

use super::psi::expect_psi_poly;

/// The derivation d/dx on polynomials in ψ symbols: ψ_k′ = ψ_{k+1} − ψ₁ψ_k.
pub fn derive_psi(p: &SymPoly) -> SymPoly {
    let mut out = SymPoly::zero();
    for (mono, c) in p.terms() {
        for &(s, e) in mono.factors() {
            let Some(k) = s.as_psi() else { continue };
            let (rest, _) = mono.without(s);
            let lowered = rest.mul(&Monomial::var(s, e - 1));
            let base = SymPoly::term(c * num_rational::BigRational::from_integer(e.into()), lowered);
            let dpsi = SymPoly::var(Symbol::psi(k + 1)) - SymPoly::var(Symbol::psi(1)) * SymPoly::var(s);
            out.add_assign_ref(&base.mul_ref(&dpsi));
        }
    }
    out
}

/// −ρ^(j) = D^{j−1} ψ₁ in ψ form (ρ = −log f).
pub fn neg_rho_derivative(j: u8) -> SymPoly {
    assert!(j >= 1);
    let mut p = SymPoly::var(Symbol::psi(1));
    for _ in 1..j {
        p = derive_psi(&p);
    }
    p
}

/// w_j in ψ form with the symbolic constant a_j (a₂ normalized to 1, a₁ = 0).
pub fn w_expand(j: u8) -> SymPoly {
    assert!((1..=5).contains(&j), "w index {j} out of range");
    let mut p = neg_rho_derivative(j);
    match j {
        1 => {}
        2 => p.add_assign_ref(&SymPoly::one()),
        _ => p.add_assign_ref(&SymPoly::var(Symbol::a(j))),
    }
    p
}

/// a_j = E ρ^(j)(X) in the η basis for j = 2..5.
pub fn a_value(j: u8) -> SymPoly {
    -expect_psi_poly(&neg_rho_derivative(j))
}

/// Substitution a₂, a₂⁻¹ ↦ 1 and a₃..a₅ ↦ η expressions.
pub fn a_substitution() -> &'static BTreeMap<Symbol, SymPoly> {
    static MAP: OnceLock<BTreeMap<Symbol, SymPoly>> = OnceLock::new();
    MAP.get_or_init(|| {
        let mut m = BTreeMap::new();
        m.insert(Symbol::a(2), SymPoly::one());
        m.insert(Symbol::a2_inv(), SymPoly::one());
        for j in 3..=5 {
            m.insert(Symbol::a(j), a_value(j));
        }
        m
    })
}

/// E[∏ w_{j}] over a multiset of indices in 1..=5, in the η basis.
pub fn w_moment(indices: &[u8]) -> SymPoly {
    static CACHE: OnceLock<Mutex<HashMap<Vec<u8>, SymPoly>>> = OnceLock::new();
    let mut key = indices.to_vec();
    key.sort_unstable();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("w cache poisoned").get(&key) {
        return v.clone();
    }
    let mut prod = SymPoly::one();
    for &j in &key {
        prod = prod.mul_ref(&w_expand(j));
    }
    let v = expect_psi_poly(&prod.substitute(a_substitution()));
    cache.lock().expect("w cache poisoned").insert(key, v.clone());
    v
}
