//! Standard normal density, distribution function and quantile.

use libm::erfc;

use super::roots::{newton_bisect, RootOptions};

pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Φ(x) via erfc, accurate in both tails.
pub fn cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// z with Φ(z) = u, found by safeguarded Newton to 1e-12; `None` outside (0, 1).
pub fn quantile(u: f64) -> Option<f64> {
    if !(u > 0.0 && u < 1.0) {
        return None;
    }
    if u > 0.5 {
        return quantile(1.0 - u).map(|z| -z);
    }
    if u == 0.5 {
        return Some(0.0);
    }
    // Lower half: the root lies in [−40, 0]; start from the tail asymptote.
    let x0 = -(-2.0 * u.ln()).sqrt();
    let opts = RootOptions { xtol: 1e-12, ftol: 0.0, max_iter: 200 };
    let r = newton_bisect(|z| (cdf(z) - u, pdf(z)), -40.0, 0.0, x0, opts).ok()?;
    Some(r.root)
}
