//! Expectations of ψ-monomials reduced to the η basis by integration by parts.
//!
//! For a ψ-monomial g, 0 = ∫ (g f)′ = E[g′] + E[g ψ₁], and ψ_k′ = ψ_{k+1} − ψ₁ψ_k.
//! Every relation links monomials of one weight (Σ i·m_i), so each weight is
//! reduced independently by exact Gaussian elimination. Designated basis
//! monomials map to 1 (E ψ₁² = a₂ = 1) and η₂..η₆; any other monomial left
//! free by the elimination becomes an auxiliary μ symbol.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::MomentError;
use crate::symbolic::{PsiMonomial, SymPoly, Symbol, MAX_PSI};

/// Value of a single designated basis monomial, if it is one.
fn designated(m: &PsiMonomial) -> Option<SymPoly> {
    let p = |f: &[(usize, u8)]| PsiMonomial::from_factors(f);
    let table = [
        (p(&[(1, 2)]), SymPoly::one()),
        (p(&[(1, 3)]), SymPoly::var(Symbol::eta(3))),
        (p(&[(2, 2)]), SymPoly::var(Symbol::eta(2))),
        (p(&[(1, 4)]), SymPoly::var(Symbol::eta(4))),
        (p(&[(1, 5)]), SymPoly::var(Symbol::eta(5))),
        (p(&[(2, 1), (3, 1)]), SymPoly::var(Symbol::eta(6))),
    ];
    table.into_iter().find(|(k, _)| k == m).map(|(_, v)| v)
}

/// All ψ-monomials of the given weight (integer partitions of `weight`).
pub fn monomials_of_weight(weight: usize) -> Vec<PsiMonomial> {
    fn rec(rem: usize, max_part: usize, cur: &mut [u8; MAX_PSI], out: &mut Vec<PsiMonomial>) {
        if rem == 0 {
            out.push(PsiMonomial::from_exponents(cur));
            return;
        }
        for part in (1..=max_part.min(rem)).rev() {
            cur[part - 1] += 1;
            rec(rem - part, part, cur, out);
            cur[part - 1] -= 1;
        }
    }
    assert!(weight <= MAX_PSI);
    let mut out = Vec::new();
    rec(weight, weight, &mut [0; MAX_PSI], &mut out);
    out
}

/// The boundary-free relation generated by `g`: coefficients of E[·] over
/// monomials of weight `g.weight() + 1`, summing to zero.
pub fn ibp_relation(g: &PsiMonomial) -> BTreeMap<PsiMonomial, BigRational> {
    let mut rel = BTreeMap::new();
    let deg = g.degree() as i64;
    let mut add = |m: PsiMonomial, c: i64| {
        let e = rel.entry(m).or_insert_with(BigRational::zero);
        *e += BigRational::from_integer(c.into());
    };
    add(g.with(1, 1), 1 - deg);
    for i in 1..=g.max_index() {
        let k = g.exponent(i) as i64;
        if k > 0 {
            add(g.with(i, -1).with(i + 1, 1), k);
        }
    }
    rel.retain(|_, c| !c.is_zero());
    rel
}

#[derive(Debug)]
struct WeightTable {
    values: HashMap<PsiMonomial, SymPoly>,
    free: Vec<PsiMonomial>,
}

fn solve_weight(weight: usize) -> WeightTable {
    let monos = monomials_of_weight(weight);
    // Elimination order: most complex monomials first, designated ones last,
    // so the free columns are the designated basis plus the simplest leftovers.
    let mut cols: Vec<PsiMonomial> = monos.iter().copied().filter(|m| designated(m).is_none()).collect();
    cols.sort_by(|a, b| {
        (b.max_index(), a.degree(), b.exponents()).cmp(&(a.max_index(), b.degree(), a.exponents()))
    });
    cols.extend(monos.iter().copied().filter(|m| designated(m).is_some()));
    let index: HashMap<PsiMonomial, usize> = cols.iter().enumerate().map(|(i, m)| (*m, i)).collect();

    let mut rows: Vec<Vec<BigRational>> = monomials_of_weight(weight - 1)
        .iter()
        .map(|g| {
            let mut row = vec![BigRational::zero(); cols.len()];
            for (m, c) in ibp_relation(g) {
                row[index[&m]] = c;
            }
            row
        })
        .collect();

    // Reduced row echelon form.
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for c in 0..cols.len() {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = BigRational::one() / rows[r][c].clone();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..cols.len() {
                    let d = &rows[r][j] * &f;
                    rows[i][j] -= d;
                }
            }
        }
        pivots.push((r, c));
        r += 1;
        if r == rows.len() {
            break;
        }
    }

    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let free: Vec<usize> = (0..cols.len()).filter(|c| !pivot_cols.contains(c)).collect();
    let free_value = |c: usize| designated(&cols[c]).unwrap_or_else(|| SymPoly::var(Symbol::mu(cols[c])));

    let mut values = HashMap::new();
    for &c in &free {
        values.insert(cols[c], free_value(c));
    }
    for &(row, c) in &pivots {
        let mut v = SymPoly::zero();
        for &f in &free {
            if !rows[row][f].is_zero() {
                v.add_scaled(&free_value(f), &-rows[row][f].clone());
            }
        }
        values.insert(cols[c], v);
    }
    let free_mu = free.iter().map(|&c| cols[c]).filter(|m| designated(m).is_none()).collect();
    WeightTable { values, free: free_mu }
}

fn table(weight: usize) -> Arc<WeightTable> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<WeightTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("ibp cache poisoned").get(&weight) {
        return Arc::clone(t);
    }
    let t = Arc::new(solve_weight(weight));
    cache.lock().expect("ibp cache poisoned").entry(weight).or_insert(t).clone()
}

/// Monomials of `weight` that stay auxiliary μ symbols after reduction.
pub fn irreducible_monomials(weight: usize) -> Vec<PsiMonomial> {
    if weight < 2 {
        return Vec::new();
    }
    table(weight).free.clone()
}

/// Integration-by-parts reduction of E[m] to the η basis.
///
/// Requires a factor ψ_i with i ≥ 2. Fails with [`MomentError::NonReducible`]
/// when no relation eliminates `m` (it is then an independent μ moment).
pub fn ibp_reduce(m: &PsiMonomial) -> Result<SymPoly, MomentError> {
    if m.max_index() < 2 {
        return Err(MomentError::IbpNotApplicable(*m));
    }
    let w = m.weight();
    if w > MAX_PSI {
        return Err(MomentError::NonReducible(*m));
    }
    let t = table(w);
    if t.free.contains(m) {
        return Err(MomentError::NonReducible(*m));
    }
    Ok(t.values[m].clone())
}

/// E[m] over the moment basis {1, η₂..η₆, μ...}; never fails.
pub fn psi_expectation(m: &PsiMonomial) -> SymPoly {
    match m.weight() {
        0 => return SymPoly::one(),
        1 => return SymPoly::zero(),
        _ => {}
    }
    if let Some(v) = designated(m) {
        return v;
    }
    if m.weight() > MAX_PSI {
        return SymPoly::var(Symbol::mu(*m));
    }
    table(m.weight()).values[m].clone()
}

/// Expectation of a polynomial in ψ symbols; other symbols are constants.
pub fn expect_psi_poly(p: &SymPoly) -> SymPoly {
    let mut out = SymPoly::zero();
    let mut cache: HashMap<PsiMonomial, SymPoly> = HashMap::new();
    for (mono, c) in p.terms() {
        let (psi, rest) = mono.split(|s| s.as_psi().is_some());
        let mut pm = [0u8; MAX_PSI];
        for &(s, e) in psi.factors() {
            pm[s.as_psi().expect("psi") as usize - 1] += e as u8;
        }
        let pm = PsiMonomial::from_exponents(&pm);
        let ev = cache.entry(pm).or_insert_with(|| psi_expectation(&pm));
        out.add_assign_ref(&ev.mul_ref(&SymPoly::term(c.clone(), rest)));
    }
    out
}
