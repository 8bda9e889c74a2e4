//! Location families: log-density derivative stacks ℓ⁽ᵏ⁾, ψ ratios, densities and samplers.
//!
//! ψ_k = f⁽ᵏ⁾/f is the complete Bell polynomial in ℓ′, …, ℓ⁽ᵏ⁾ (ℓ = log f).
//! A family rescaled by c has ℓ_c(y) = ℓ(y/c) − ln c.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Open01, StandardNormal};
use serde::{Deserialize, Serialize};

use super::expr::{ExprError, Expression};
use super::quad::{integrate, integrate_finite, QuadError, QuadOptions};
use super::roots::{newton_bisect, RootOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    Gaussian,
    Logistic,
    Cauchy,
    HyperbolicSecant,
    Gumbel,
}

impl Builtin {
    pub const ALL: [Builtin; 5] = [Builtin::Gaussian, Builtin::Logistic, Builtin::Cauchy, Builtin::HyperbolicSecant, Builtin::Gumbel];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Gaussian => "gaussian",
            Builtin::Logistic => "logistic",
            Builtin::Cauchy => "cauchy",
            Builtin::HyperbolicSecant => "hyperbolic-secant",
            Builtin::Gumbel => "gumbel",
        }
    }

    fn symmetric(self) -> bool {
        self != Builtin::Gumbel
    }

    fn log_concave(self) -> bool {
        self != Builtin::Cauchy
    }

    /// ℓ, ℓ′, …, ℓ⁽⁵⁾ at x.
    fn stack(self, x: f64) -> [f64; 6] {
        match self {
            Builtin::Gaussian => [-0.5 * x * x - 0.5 * (2.0 * PI).ln(), -x, -1.0, 0.0, 0.0, 0.0],
            Builtin::Logistic => {
                let mut s = log_cosh_stack(2.0, 0.5, x);
                s[0] = -x.abs() - 2.0 * (-x.abs()).exp().ln_1p();
                s
            }
            Builtin::HyperbolicSecant => {
                let mut s = log_cosh_stack(1.0, 0.5 * PI, x);
                s[0] = -(2.0f64).ln() - ln_cosh(0.5 * PI * x);
                s
            }
            Builtin::Cauchy => {
                // −ln(1 + x²) = −ln(x + i) − ln(x − i); d^k of −ln(x − a) is (−1)^k (k−1)!/(x − a)^k.
                let r = 1.0 / (1.0 + x * x);
                let (zr, zi) = (x * r, -r);
                let (mut pr, mut pi) = (1.0, 0.0);
                let mut s = [-PI.ln() - (x * x).ln_1p(), 0.0, 0.0, 0.0, 0.0, 0.0];
                let mut fact = 1.0;
                for (k, slot) in s.iter_mut().enumerate().skip(1) {
                    (pr, pi) = (pr * zr - pi * zi, pr * zi + pi * zr);
                    if k > 1 {
                        fact *= (k - 1) as f64;
                    }
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    *slot = sign * fact * 2.0 * pr;
                }
                s
            }
            Builtin::Gumbel => {
                let e = (-x).exp();
                [-x - e, e - 1.0, -e, e, -e, e]
            }
        }
    }

    fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        if self == Builtin::Gaussian {
            return rng.sample(StandardNormal);
        }
        let u: f64 = rng.sample(Open01);
        match self {
            Builtin::Gaussian => unreachable!(),
            Builtin::Logistic => (u / (1.0 - u)).ln(),
            Builtin::Cauchy => (PI * (u - 0.5)).tan(),
            Builtin::HyperbolicSecant => (2.0 / PI) * (0.5 * PI * u).tan().ln(),
            Builtin::Gumbel => -(-u.ln()).ln(),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = FamilyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == s || (s == "sech" && *b == Builtin::HyperbolicSecant))
            .ok_or_else(|| FamilyError::UnknownFamily(s.to_string()))
    }
}

fn ln_cosh(y: f64) -> f64 {
    let a = y.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Derivatives of −w·ln cosh(cx); slot 0 is left for the caller.
fn log_cosh_stack(w: f64, c: f64, x: f64) -> [f64; 6] {
    let t = (c * x).tanh();
    let s = 1.0 - t * t;
    [
        0.0,
        -w * c * t,
        -w * c * c * s,
        2.0 * w * c.powi(3) * t * s,
        2.0 * w * c.powi(4) * s * (1.0 - 3.0 * t * t),
        8.0 * w * c.powi(5) * t * (3.0 * t * t - 2.0) * s,
    ]
}

/// ψ₁..ψ₅ from ℓ′..ℓ⁽⁵⁾: B_{n+1} = Σ_k C(n,k) B_{n−k} ℓ⁽ᵏ⁺¹⁾.
pub fn bell_psi(l: &[f64; 6]) -> [f64; 5] {
    const BINOM: [[f64; 5]; 5] =
        [[1.0, 0.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0, 0.0], [1.0, 3.0, 3.0, 1.0, 0.0], [1.0, 4.0, 6.0, 4.0, 1.0]];
    let mut b = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    for n in 0..5 {
        b[n + 1] = (0..=n).map(|k| BINOM[n][k] * b[n - k] * l[k + 1]).sum();
    }
    [b[1], b[2], b[3], b[4], b[5]]
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FamilyError {
    #[error("unknown family `{0}` (builtins: gaussian, logistic, cauchy, hyperbolic-secant, gumbel)")]
    UnknownFamily(String),
    #[error(transparent)]
    Expression(#[from] ExprError),
    #[error("support [{lo}, {hi}] is empty")]
    Support { lo: f64, hi: f64 },
    #[error("cannot normalize the density: {0}")]
    Normalization(QuadError),
    #[error("density integral {0} is not a positive finite number")]
    BadMass(f64),
    #[error("scale {0} must be positive and finite")]
    Scale(f64),
}

/// Bounds of the density's support.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
}

impl Support {
    pub const REAL_LINE: Support = Support { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

const TABLE_POINTS: usize = 1024;

/// User family from a log-density expression, normalized numerically.
#[derive(Debug)]
pub struct CustomFamily {
    name: String,
    expr: Expression,
    log_mass: f64,
    support: Support,
    symmetric: bool,
    log_concave: bool,
    /// Sampling table: nodes with their CDF values.
    nodes: Vec<f64>,
    cdf: Vec<f64>,
}

impl CustomFamily {
    pub fn new(name: &str, log_density: &str, support: Support, symmetric: bool, log_concave: bool) -> Result<Self, FamilyError> {
        if !(support.lo < support.hi) {
            return Err(FamilyError::Support { lo: support.lo, hi: support.hi });
        }
        let expr = Expression::parse(log_density)?;
        let opts = QuadOptions { abs_tol: 1e-13, rel_tol: 1e-12, ..QuadOptions::default() };
        let unnormalized = |x: f64| if support.contains(x) { expr.eval(x).exp() } else { 0.0 };
        let mass = integrate(unnormalized, support.lo, support.hi, &opts).map_err(FamilyError::Normalization)?.value;
        if !(mass.is_finite() && mass > 0.0) {
            return Err(FamilyError::BadMass(mass));
        }
        let mut fam = CustomFamily {
            name: name.to_string(),
            expr,
            log_mass: mass.ln(),
            support,
            symmetric,
            log_concave,
            nodes: Vec::new(),
            cdf: Vec::new(),
        };
        fam.build_table(&opts)?;
        Ok(fam)
    }

    fn density(&self, x: f64) -> f64 {
        if self.support.contains(x) {
            (self.expr.eval(x) - self.log_mass).exp()
        } else {
            0.0
        }
    }

    /// Nodes x = tan(π(t − ½)) clipped to the support, with cumulative mass.
    fn build_table(&mut self, opts: &QuadOptions) -> Result<(), FamilyError> {
        let mut nodes: Vec<f64> = (1..TABLE_POINTS)
            .map(|i| (PI * (i as f64 / TABLE_POINTS as f64 - 0.5)).tan())
            .filter(|&x| self.support.contains(x))
            .collect();
        if self.support.lo.is_finite() {
            nodes.insert(0, self.support.lo);
        }
        if self.support.hi.is_finite() {
            nodes.push(self.support.hi);
        }
        let f = |x: f64| self.density(x);
        let mut acc = integrate(f, self.support.lo, nodes[0], opts).map_err(FamilyError::Normalization)?.value;
        let mut cdf = vec![acc];
        for w in nodes.windows(2) {
            acc += integrate_finite(f, w[0], w[1], opts).map_err(FamilyError::Normalization)?.value;
            cdf.push(acc);
        }
        self.nodes = nodes;
        self.cdf = cdf;
        Ok(())
    }

    /// Inverse CDF by Newton–bisection inside the table cell holding u.
    fn quantile(&self, u: f64) -> f64 {
        let opts = QuadOptions { abs_tol: 1e-14, rel_tol: 1e-13, ..QuadOptions::default() };
        let f = |x: f64| self.density(x);
        let i = self.cdf.partition_point(|&c| c <= u);
        let (lo, hi, base, anchor) = if i == 0 {
            // Below the first node: walk left until the mass is covered.
            let x0 = self.nodes[0];
            let mut lo = x0 - 1.0;
            let mut step = 1.0;
            while lo > self.support.lo && self.cdf[0] - integrate(f, lo, x0, &opts).map_or(0.0, |r| r.value) > u {
                step *= 2.0;
                lo = x0 - step;
            }
            (lo.max(self.support.lo), x0, self.cdf[0], x0)
        } else if i == self.cdf.len() {
            let xn = *self.nodes.last().expect("non-empty table");
            let mut hi = xn + 1.0;
            let mut step = 1.0;
            while hi < self.support.hi && self.cdf[i - 1] + integrate(f, xn, hi, &opts).map_or(0.0, |r| r.value) < u {
                step *= 2.0;
                hi = xn + step;
            }
            (xn, hi.min(self.support.hi), self.cdf[i - 1], xn)
        } else {
            (self.nodes[i - 1], self.nodes[i], self.cdf[i - 1], self.nodes[i - 1])
        };
        let g = |x: f64| {
            let m = integrate(f, anchor, x, &opts).map_or(f64::NAN, |r| r.value);
            (base + m - u, f(x))
        };
        let ropts = RootOptions { xtol: 1e-13, ..RootOptions::default() };
        newton_bisect(g, lo, hi, 0.5 * (lo + hi), ropts).map_or(0.5 * (lo + hi), |r| r.root)
    }
}

#[derive(Clone, Debug)]
enum Source {
    Builtin(Builtin),
    Custom(Arc<CustomFamily>),
}

/// A location family, possibly rescaled by c (density f(y/c)/c).
#[derive(Clone, Debug)]
pub struct LocationFamily {
    source: Source,
    scale: f64,
}

impl LocationFamily {
    pub fn builtin(b: Builtin) -> Self {
        LocationFamily { source: Source::Builtin(b), scale: 1.0 }
    }

    pub fn custom(c: CustomFamily) -> Self {
        LocationFamily { source: Source::Custom(Arc::new(c)), scale: 1.0 }
    }

    pub fn by_name(name: &str) -> Result<Self, FamilyError> {
        name.parse().map(Self::builtin)
    }

    pub fn name(&self) -> &str {
        match &self.source {
            Source::Builtin(b) => b.name(),
            Source::Custom(c) => &c.name,
        }
    }

    pub fn as_builtin(&self) -> Option<Builtin> {
        match self.source {
            Source::Builtin(b) => Some(b),
            Source::Custom(_) => None,
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// The same family with scale multiplied by `c`.
    pub fn rescaled(&self, c: f64) -> Result<Self, FamilyError> {
        if !(c.is_finite() && c > 0.0) {
            return Err(FamilyError::Scale(c));
        }
        Ok(LocationFamily { source: self.source.clone(), scale: self.scale * c })
    }

    pub fn symmetric(&self) -> bool {
        match &self.source {
            Source::Builtin(b) => b.symmetric(),
            Source::Custom(c) => c.symmetric,
        }
    }

    pub fn log_concave(&self) -> bool {
        match &self.source {
            Source::Builtin(b) => b.log_concave(),
            Source::Custom(c) => c.log_concave,
        }
    }

    pub fn support(&self) -> Support {
        let s = match &self.source {
            Source::Builtin(_) => Support::REAL_LINE,
            Source::Custom(c) => c.support,
        };
        Support { lo: s.lo * self.scale, hi: s.hi * self.scale }
    }

    /// ℓ, ℓ′, …, ℓ⁽⁵⁾ at y (in the rescaled coordinates).
    pub fn log_density_stack(&self, y: f64) -> [f64; 6] {
        let x = y / self.scale;
        let mut s = match &self.source {
            Source::Builtin(b) => b.stack(x),
            Source::Custom(c) => {
                let mut d = c.expr.jet(x).derivatives();
                d[0] -= c.log_mass;
                d
            }
        };
        if self.scale != 1.0 {
            let inv = 1.0 / self.scale;
            let mut p = 1.0;
            for v in s.iter_mut().skip(1) {
                p *= inv;
                *v *= p;
            }
            s[0] -= self.scale.ln();
        }
        s
    }

    pub fn psi(&self, y: f64) -> [f64; 5] {
        bell_psi(&self.log_density_stack(y))
    }

    pub fn log_density(&self, y: f64) -> f64 {
        match &self.source {
            Source::Builtin(b) => b.stack(y / self.scale)[0] - self.scale.ln(),
            Source::Custom(c) => {
                let x = y / self.scale;
                if c.support.contains(x) {
                    c.expr.eval(x) - c.log_mass - self.scale.ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    pub fn density(&self, y: f64) -> f64 {
        self.log_density(y).exp()
    }

    /// (ℓ′, ℓ″) at y, the inputs of the score equation.
    pub fn score_pair(&self, y: f64) -> (f64, f64) {
        let x = y / self.scale;
        let (d1, d2) = match &self.source {
            Source::Builtin(Builtin::Gaussian) => (-x, -1.0),
            Source::Builtin(Builtin::Logistic) => {
                let t = (0.5 * x).tanh();
                (-t, -0.5 * (1.0 - t * t))
            }
            Source::Builtin(Builtin::HyperbolicSecant) => {
                let c = 0.5 * PI;
                let t = (c * x).tanh();
                (-c * t, -c * c * (1.0 - t * t))
            }
            Source::Builtin(Builtin::Cauchy) => {
                let r = 1.0 / (1.0 + x * x);
                (-2.0 * x * r, -2.0 * (1.0 - x * x) * r * r)
            }
            Source::Builtin(Builtin::Gumbel) => {
                let e = (-x).exp();
                (e - 1.0, -e)
            }
            Source::Custom(c) => {
                let d = c.expr.jet(x).derivatives();
                (d[1], d[2])
            }
        };
        (d1 / self.scale, d2 / (self.scale * self.scale))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let x = match &self.source {
            Source::Builtin(b) => b.sample(rng),
            Source::Custom(c) => c.quantile(rng.sample(Open01)),
        };
        self.scale * x
    }
}

impl fmt::Display for LocationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale == 1.0 {
            write!(f, "{}", self.name())
        } else {
            write!(f, "{} (scale {})", self.name(), self.scale)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Richardson-extrapolated central difference of `g` at x.
    fn fd(g: impl Fn(f64) -> f64, x: f64) -> f64 {
        let h = 1e-3f64.max(x.abs() * 1e-3);
        let d = |h: f64| (g(x + h) - g(x - h)) / (2.0 * h);
        (4.0 * d(h / 2.0) - d(h)) / 3.0
    }

    fn all() -> Vec<LocationFamily> {
        let mut v: Vec<_> = Builtin::ALL.into_iter().map(LocationFamily::builtin).collect();
        v.push(LocationFamily::builtin(Builtin::Logistic).rescaled(0.7).unwrap());
        let c = CustomFamily::new("quartic", "-x^4/4 - x^2/2", Support::REAL_LINE, true, true).unwrap();
        v.push(LocationFamily::custom(c));
        v
    }

    #[test]
    fn stacks_are_consistent_derivatives() {
        for fam in all() {
            for &x in &[-2.3, -0.4, 0.0, 0.9, 3.1] {
                let s = fam.log_density_stack(x);
                for k in 0..5 {
                    let num = fd(|y| fam.log_density_stack(y)[k], x);
                    assert!((num - s[k + 1]).abs() < 1e-6 * (1.0 + s[k + 1].abs()), "{fam} l{} at {x}: {num} vs {}", k + 1, s[k + 1]);
                }
                assert!((fam.log_density(x) - s[0]).abs() < 1e-12);
                let (d1, d2) = fam.score_pair(x);
                assert!((d1 - s[1]).abs() < 1e-12 && (d2 - s[2]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn psi_identities_pointwise() {
        for fam in all() {
            for &x in &[-1.7, 0.3, 2.2] {
                let p = fam.psi(x);
                let q = |y: f64| fam.psi(y);
                for k in 0..4 {
                    // ψ_{k+1} = ψ_k′ + ψ₁ψ_k
                    let rhs = fd(|y| q(y)[k], x) + p[0] * p[k];
                    assert!((p[k + 1] - rhs).abs() < 1e-6 * (1.0 + rhs.abs()), "{fam} psi{} at {x}", k + 2);
                }
            }
        }
    }

    #[test]
    fn gaussian_psi_closed_form() {
        let g = LocationFamily::builtin(Builtin::Gaussian);
        let x = 1.3f64;
        let p = g.psi(x);
        assert_eq!(p[0], -x);
        assert!((p[1] - (x * x - 1.0)).abs() < 1e-15);
        assert!((p[2] - (3.0 * x - x.powi(3))).abs() < 1e-14);
    }

    #[test]
    fn densities_integrate_to_one() {
        let o = QuadOptions::default();
        for fam in all() {
            let s = fam.support();
            let m = integrate(|x| fam.density(x), s.lo, s.hi, &o).unwrap().value;
            assert!((m - 1.0).abs() < 1e-9, "{fam}: {m}");
        }
    }

    #[test]
    fn samplers_match_cdf() {
        let grid = [-1.5, -0.5, 0.0, 0.7, 2.0];
        let o = QuadOptions::default();
        for fam in all() {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let n = 40_000;
            let xs: Vec<f64> = (0..n).map(|_| fam.sample(&mut rng)).collect();
            for &g in &grid {
                let emp = xs.iter().filter(|&&x| x <= g).count() as f64 / n as f64;
                let cdf = integrate(|x| fam.density(x), f64::NEG_INFINITY, g, &o).unwrap().value;
                assert!((emp - cdf).abs() < 0.012, "{fam} at {g}: {emp} vs {cdf}");
            }
        }
    }

    #[test]
    fn custom_half_line_support() {
        let c = CustomFamily::new("exp-ish", "-x - math::exp(-x)", Support { lo: -5.0, hi: f64::INFINITY }, false, true).unwrap();
        let fam = LocationFamily::custom(c);
        assert_eq!(fam.density(-6.0), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!((0..2000).all(|_| fam.sample(&mut rng) > -5.0));
        assert!(CustomFamily::new("bad", "x", Support::REAL_LINE, false, false).is_err());
        assert!(matches!(CustomFamily::new("e", "1", Support { lo: 1.0, hi: 1.0 }, false, false), Err(FamilyError::Support { .. })));
    }

    #[test]
    fn names_round_trip() {
        for b in Builtin::ALL {
            assert_eq!(b.name().parse::<Builtin>().unwrap(), b);
        }
        assert_eq!("sech".parse::<Builtin>().unwrap(), Builtin::HyperbolicSecant);
        assert!("weibull".parse::<Builtin>().is_err());
    }
}
