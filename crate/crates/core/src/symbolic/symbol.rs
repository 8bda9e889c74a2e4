//! The closed symbol alphabet shared by every symbolic object in the crate.

use std::fmt;
use std::str::FromStr;

use super::SymbolicError;

/// Highest log-derivative index a [`PsiMonomial`] can carry.
pub const MAX_PSI: usize = 12;

/// Exponents of ψ₁..ψ₁₂ in a product of log-derivative ratios ψ_i = f^(i)/f.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PsiMonomial([u8; MAX_PSI]);

impl PsiMonomial {
    pub const ONE: PsiMonomial = PsiMonomial([0; MAX_PSI]);

    /// Builds a monomial from `(index, exponent)` pairs, indices 1-based.
    pub fn from_factors(factors: &[(usize, u8)]) -> Self {
        let mut e = [0u8; MAX_PSI];
        for &(i, k) in factors {
            assert!((1..=MAX_PSI).contains(&i), "psi index {i} out of range");
            e[i - 1] += k;
        }
        PsiMonomial(e)
    }

    pub fn from_exponents(exps: &[u8]) -> Self {
        assert!(exps.len() <= MAX_PSI);
        let mut e = [0u8; MAX_PSI];
        e[..exps.len()].copy_from_slice(exps);
        PsiMonomial(e)
    }

    /// Exponent of ψ_i (1-based).
    pub fn exponent(&self, i: usize) -> u8 {
        self.0[i - 1]
    }

    pub fn exponents(&self) -> &[u8; MAX_PSI] {
        &self.0
    }

    /// Σ i·m_i: the number of derivatives of f involved.
    pub fn weight(&self) -> usize {
        self.0.iter().enumerate().map(|(i, &k)| (i + 1) * k as usize).sum()
    }

    /// Number of ψ factors counted with multiplicity.
    pub fn degree(&self) -> usize {
        self.0.iter().map(|&k| k as usize).sum()
    }

    pub fn max_index(&self) -> usize {
        self.0.iter().rposition(|&k| k > 0).map_or(0, |i| i + 1)
    }

    pub(crate) fn with(mut self, i: usize, delta: i32) -> Self {
        let v = self.0[i - 1] as i32 + delta;
        assert!(v >= 0);
        self.0[i - 1] = v as u8;
        self
    }

    fn trimmed(&self) -> &[u8] {
        &self.0[..self.max_index()]
    }
}

impl fmt::Display for PsiMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.trimmed().iter().map(|k| k.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Kind {
    Xi(u8),
    A(u8),
    A2Inv,
    B(u8),
    K(u8, u8),
    Eta(u8),
    Psi(u8),
    Mu(PsiMonomial),
    X,
    Z,
    It,
}

/// A symbol of the fixed alphabet.
///
/// The derived ordering (normalized sums first, then the a_j constants, ansatz
/// unknowns, cumulant coefficients, η moments, ψ ratios, auxiliary moments and
/// finally the polynomial variables x, z, it) is the canonical print order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Kind);

const CUMULANT_SLOTS: [(u8, u8); 8] = [(1, 2), (1, 3), (2, 1), (2, 2), (3, 1), (3, 2), (4, 1), (5, 1)];

impl Symbol {
    /// Normalized sum ξ_j, j = 1..5.
    pub fn xi(j: u8) -> Self {
        assert!((1..=5).contains(&j), "xi index {j} out of range");
        Symbol(Kind::Xi(j))
    }

    /// Expected derivative a_j = E ρ^(j)(X), j = 2..5 (a₁ = 0 has no symbol).
    pub fn a(j: u8) -> Self {
        assert!((2..=5).contains(&j), "a index {j} out of range");
        Symbol(Kind::A(j))
    }

    /// a₂⁻¹; `a2 * a2inv` cancels during canonicalization.
    pub fn a2_inv() -> Self {
        Symbol(Kind::A2Inv)
    }

    /// Unknown ansatz coefficient B_k, k = 1..4.
    pub fn b(k: u8) -> Self {
        assert!((1..=4).contains(&k), "B index {k} out of range");
        Symbol(Kind::B(k))
    }

    /// Cumulant coefficient k_{ij} (only the slots that occur in the cumulant
    /// structure of √n·θ̂_n exist).
    pub fn k(i: u8, j: u8) -> Self {
        assert!(CUMULANT_SLOTS.contains(&(i, j)), "k{i}{j} is not a cumulant slot");
        Symbol(Kind::K(i, j))
    }

    /// Moment η_j, j = 2..6.
    pub fn eta(j: u8) -> Self {
        assert!((2..=6).contains(&j), "eta index {j} out of range");
        Symbol(Kind::Eta(j))
    }

    pub fn psi(i: u8) -> Self {
        assert!((1..=MAX_PSI as u8).contains(&i), "psi index {i} out of range");
        Symbol(Kind::Psi(i))
    }

    /// Auxiliary moment E[m] for a ψ-monomial that does not reduce to the η basis.
    pub fn mu(m: PsiMonomial) -> Self {
        Symbol(Kind::Mu(m))
    }

    pub fn x() -> Self {
        Symbol(Kind::X)
    }

    pub fn z() -> Self {
        Symbol(Kind::Z)
    }

    pub fn it() -> Self {
        Symbol(Kind::It)
    }

    pub fn as_xi(&self) -> Option<u8> {
        match self.0 {
            Kind::Xi(j) => Some(j),
            _ => None,
        }
    }

    pub fn as_a(&self) -> Option<u8> {
        match self.0 {
            Kind::A(j) => Some(j),
            _ => None,
        }
    }

    pub fn as_b(&self) -> Option<u8> {
        match self.0 {
            Kind::B(j) => Some(j),
            _ => None,
        }
    }

    pub fn as_eta(&self) -> Option<u8> {
        match self.0 {
            Kind::Eta(j) => Some(j),
            _ => None,
        }
    }

    pub fn as_psi(&self) -> Option<u8> {
        match self.0 {
            Kind::Psi(j) => Some(j),
            _ => None,
        }
    }

    pub fn as_mu(&self) -> Option<PsiMonomial> {
        match self.0 {
            Kind::Mu(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_k(&self) -> Option<(u8, u8)> {
        match self.0 {
            Kind::K(i, j) => Some((i, j)),
            _ => None,
        }
    }

    pub fn is_a2_inv(&self) -> bool {
        matches!(self.0, Kind::A2Inv)
    }

    /// True for the random ξ symbols.
    pub fn is_xi(&self) -> bool {
        matches!(self.0, Kind::Xi(_))
    }

    /// True for η and μ moment symbols (the moment basis).
    pub fn is_moment(&self) -> bool {
        matches!(self.0, Kind::Eta(_) | Kind::Mu(_))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Kind::Xi(j) => write!(f, "xi{j}"),
            Kind::A(j) => write!(f, "a{j}"),
            Kind::A2Inv => write!(f, "a2inv"),
            Kind::B(k) => write!(f, "B{k}"),
            Kind::K(i, j) => write!(f, "k{i}{j}"),
            Kind::Eta(j) => write!(f, "eta{j}"),
            Kind::Psi(i) => write!(f, "psi{i}"),
            Kind::Mu(m) => write!(f, "mu{m}"),
            Kind::X => write!(f, "x"),
            Kind::Z => write!(f, "z"),
            Kind::It => write!(f, "it"),
        }
    }
}

fn indexed(s: &str, prefix: &str) -> Option<u8> {
    s.strip_prefix(prefix)
        .filter(|r| !r.is_empty() && r.bytes().all(|b| b.is_ascii_digit()))
        .and_then(|r| r.parse().ok())
}

impl FromStr for Symbol {
    type Err = SymbolicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || SymbolicError::UnknownSymbol(s.to_string());
        let check = |ok: bool, sym: Symbol| if ok { Ok(sym) } else { Err(unknown()) };
        match s {
            "x" => return Ok(Symbol::x()),
            "z" => return Ok(Symbol::z()),
            "it" => return Ok(Symbol::it()),
            "a2inv" => return Ok(Symbol::a2_inv()),
            _ => {}
        }
        if let Some(body) = s.strip_prefix("mu[").and_then(|r| r.strip_suffix(']')) {
            let mut exps = Vec::new();
            for part in body.split(',').filter(|p| !p.is_empty()) {
                exps.push(part.trim().parse::<u8>().map_err(|_| unknown())?);
            }
            if exps.len() > MAX_PSI {
                return Err(unknown());
            }
            return Ok(Symbol::mu(PsiMonomial::from_exponents(&exps)));
        }
        if let Some(j) = indexed(s, "xi") {
            return check((1..=5).contains(&j), Symbol(Kind::Xi(j)));
        }
        if let Some(j) = indexed(s, "eta") {
            return check((2..=6).contains(&j), Symbol(Kind::Eta(j)));
        }
        if let Some(j) = indexed(s, "psi") {
            return check((1..=MAX_PSI as u8).contains(&j), Symbol(Kind::Psi(j)));
        }
        if let Some(j) = indexed(s, "a") {
            return check((2..=5).contains(&j), Symbol(Kind::A(j)));
        }
        if let Some(j) = indexed(s, "B") {
            return check((1..=4).contains(&j), Symbol(Kind::B(j)));
        }
        if let Some(rest) = s.strip_prefix('k') {
            let b = rest.as_bytes();
            if b.len() == 2 && b[0].is_ascii_digit() && b[1].is_ascii_digit() {
                let (i, j) = (b[0] - b'0', b[1] - b'0');
                return check(CUMULANT_SLOTS.contains(&(i, j)), Symbol(Kind::K(i, j)));
            }
        }
        Err(unknown())
    }
}
