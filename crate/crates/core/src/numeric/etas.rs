//! Fisher information a₂ and η₂..η₆ by quadrature, standardization, identity checks.

use serde::Serialize;

use super::family::{FamilyError, LocationFamily};
use super::quad::{integrate, QuadError, QuadOptions};
use crate::golden::printed_psi_identities;
use crate::symbolic::{PsiMonomial, Symbol};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EtaError {
    #[error("quadrature for {quantity} failed: {source}")]
    Quadrature { quantity: String, source: QuadError },
    #[error("{quantity} is not finite")]
    NonFinite { quantity: String },
    #[error("Fisher information a2 = {0} is not positive")]
    Information(f64),
    #[error("family is declared symmetric but {quantity} = {value:e}")]
    Asymmetric { quantity: String, value: f64 },
    #[error(transparent)]
    Family(#[from] FamilyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EtaVector {
    pub a2: f64,
    /// η₂, η₃, η₄, η₅, η₆.
    pub eta: [f64; 5],
    pub standardized: bool,
}

impl EtaVector {
    pub fn get(&self, j: u8) -> f64 {
        self.eta[j as usize - 2]
    }
}

pub const SYMMETRY_TOL: f64 = 1e-8;

fn opts() -> QuadOptions {
    QuadOptions { abs_tol: 1e-12, rel_tol: 1e-11, max_intervals: 4000 }
}

/// E[g(ψ₁..ψ₅)(X)] under the family, named for error reports.
pub fn expect(fam: &LocationFamily, quantity: &str, g: impl Fn(&[f64; 5]) -> f64) -> Result<f64, EtaError> {
    let s = fam.support();
    let integrand = |x: f64| {
        let f = fam.density(x);
        if f == 0.0 {
            0.0
        } else {
            g(&fam.psi(x)) * f
        }
    };
    let r = integrate(integrand, s.lo, s.hi, &opts()).map_err(|source| EtaError::Quadrature { quantity: quantity.into(), source })?;
    if r.value.is_finite() {
        Ok(r.value)
    } else {
        Err(EtaError::NonFinite { quantity: quantity.into() })
    }
}

/// E of a ψ monomial.
pub fn expect_psi(fam: &LocationFamily, m: &PsiMonomial) -> Result<f64, EtaError> {
    if m.max_index() > 5 {
        return Err(EtaError::NonFinite { quantity: format!("E{m}") });
    }
    expect(fam, &format!("E{m}"), |p| (1..=5).map(|i| p[i - 1].powi(m.exponent(i) as i32)).product())
}

/// a₂ = Eψ₁² and η₂ = Eψ₂², η₃ = Eψ₁³, η₄ = Eψ₁⁴, η₅ = Eψ₁⁵, η₆ = E ψ₂ψ₃.
pub fn compute_etas(fam: &LocationFamily) -> Result<EtaVector, EtaError> {
    let a2 = expect(fam, "a2", |p| p[0] * p[0])?;
    if !(a2 > 0.0) {
        return Err(EtaError::Information(a2));
    }
    let eta = [
        expect(fam, "eta2", |p| p[1] * p[1])?,
        expect(fam, "eta3", |p| p[0].powi(3))?,
        expect(fam, "eta4", |p| p[0].powi(4))?,
        expect(fam, "eta5", |p| p[0].powi(5))?,
        expect(fam, "eta6", |p| p[1] * p[2])?,
    ];
    if fam.symmetric() {
        for (j, v) in [(3, eta[1]), (5, eta[3]), (6, eta[4])] {
            if v.abs() > SYMMETRY_TOL {
                return Err(EtaError::Asymmetric { quantity: format!("eta{j}"), value: v });
            }
        }
    }
    Ok(EtaVector { a2, eta, standardized: (a2 - 1.0).abs() < 1e-9 })
}

/// The family rescaled by c = √a₂, which has unit Fisher information.
#[derive(Clone, Debug)]
pub struct Standardized {
    pub family: LocationFamily,
    pub scale: f64,
    pub etas: EtaVector,
}

pub fn standardize(fam: &LocationFamily) -> Result<Standardized, EtaError> {
    let raw = compute_etas(fam)?;
    let scale = raw.a2.sqrt();
    let family = fam.rescaled(scale)?;
    let mut etas = compute_etas(&family)?;
    etas.standardized = true;
    Ok(Standardized { family, scale, etas })
}

/// Both sides of one identity with their absolute residual.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

impl IdentityCheck {
    fn new(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        IdentityCheck { name: name.into(), lhs, rhs, residual: (lhs - rhs).abs() }
    }
}

/// ∫f = 1, Eψ₁ = Eψ₂ = 0, a₂ = −Eℓ″, and each printed ψ identity with both sides by quadrature.
pub fn identity_checks(fam: &LocationFamily) -> Result<Vec<IdentityCheck>, EtaError> {
    let etas = compute_etas(fam)?;
    let mut out = vec![
        IdentityCheck::new("integral f", expect(fam, "integral f", |_| 1.0)?, 1.0),
        IdentityCheck::new("E(psi1)", expect(fam, "E(psi1)", |p| p[0])?, 0.0),
        IdentityCheck::new("E(psi2)", expect(fam, "E(psi2)", |p| p[1])?, 0.0),
        // ℓ″ = ψ₂ − ψ₁²
        IdentityCheck::new("a2 = E(psi1^2 - psi2)", expect(fam, "E(psi1^2 - psi2)", |p| p[0] * p[0] - p[1])?, etas.a2),
    ];
    for (m, rhs) in printed_psi_identities() {
        let lhs = expect_psi(fam, &m)?;
        let value = rhs
            .eval_f64(|s: Symbol| s.as_eta().map(|j| etas.get(j)))
            .expect("printed identities are polynomials in eta");
        out.push(IdentityCheck::new(format!("E{m} = {rhs}"), lhs, value));
    }
    Ok(out)
}
