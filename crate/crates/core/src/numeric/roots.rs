//! Scalar root finding: Newton steps inside a maintained sign-change bracket,
//! falling back to bisection whenever a step leaves the bracket.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootOptions {
    /// Relative step tolerance, scaled by max(1, |x|).
    pub xtol: f64,
    /// Absolute residual tolerance; 0 disables the residual test.
    pub ftol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { xtol: 1e-12, ftol: 0.0, max_iter: 200 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootResult {
    pub root: f64,
    /// Residual f(root) at the last evaluation.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RootError {
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {flo}, f(hi) = {fhi}")]
    NoBracket { lo: f64, hi: f64, flo: f64, fhi: f64 },
}

/// Finds a root of `f` in `[lo, hi]` starting from `x0`; `f` returns (value, derivative).
pub fn newton_bisect(
    mut f: impl FnMut(f64) -> (f64, f64),
    lo: f64,
    hi: f64,
    x0: f64,
    opts: RootOptions,
) -> Result<RootResult, RootError> {
    let (mut a, mut b) = (lo, hi);
    let fa0 = f(a).0;
    let fb0 = f(b).0;
    if fa0 == 0.0 {
        return Ok(RootResult { root: a, residual: 0.0, iterations: 0, converged: true });
    }
    if fb0 == 0.0 {
        return Ok(RootResult { root: b, residual: 0.0, iterations: 0, converged: true });
    }
    if fa0.signum() == fb0.signum() || fa0.is_nan() || fb0.is_nan() {
        return Err(RootError::NoBracket { lo, hi, flo: fa0, fhi: fb0 });
    }
    let neg_at_a = fa0 < 0.0;
    let mut x = if x0 > a && x0 < b { x0 } else { 0.5 * (a + b) };
    let mut residual = f64::NAN;
    for it in 1..=opts.max_iter {
        let (fx, dfx) = f(x);
        residual = fx;
        if fx == 0.0 || fx.abs() <= opts.ftol {
            return Ok(RootResult { root: x, residual, iterations: it, converged: true });
        }
        if (fx < 0.0) == neg_at_a {
            a = x;
        } else {
            b = x;
        }
        let newton = x - fx / dfx;
        let next = if newton.is_finite() && newton > a && newton < b { newton } else { 0.5 * (a + b) };
        let scale = opts.xtol * x.abs().max(1.0);
        let step = (next - x).abs();
        x = next;
        if opts.ftol == 0.0 && (step <= scale || b - a <= scale) {
            let fx = f(x).0;
            return Ok(RootResult { root: x, residual: fx, iterations: it, converged: true });
        }
        if b - a <= f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) * 4.0 {
            break;
        }
    }
    Ok(RootResult { root: x, residual, iterations: opts.max_iter, converged: false })
}

/// [`newton_bisect`] started at the bracket midpoint.
pub fn solve_bracketed(
    f: impl FnMut(f64) -> (f64, f64),
    lo: f64,
    hi: f64,
    opts: RootOptions,
) -> Result<RootResult, RootError> {
    newton_bisect(f, lo, hi, 0.5 * (lo + hi), opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_root_of_two() {
        let r = solve_bracketed(|x| (x * x * x - 2.0, 3.0 * x * x), 0.0, 2.0, RootOptions::default()).unwrap();
        assert!(r.converged);
        assert!((r.root - 2f64.cbrt()).abs() < 1e-12);
    }

    #[test]
    fn bad_derivative_falls_back_to_bisection() {
        // derivative deliberately wrong in sign: Newton steps leave the bracket
        let r = solve_bracketed(|x| (x - 0.3, -1.0), 0.0, 1.0, RootOptions::default()).unwrap();
        assert!(r.converged);
        assert!((r.root - 0.3).abs() < 1e-11);
    }

    #[test]
    fn residual_tolerance_mode() {
        let opts = RootOptions { xtol: 0.0, ftol: 1e-10, max_iter: 100 };
        let r = newton_bisect(|x| (x.tanh() - 0.5, 1.0 / x.cosh().powi(2)), -5.0, 5.0, 4.0, opts).unwrap();
        assert!(r.converged && r.residual.abs() <= 1e-10);
    }

    #[test]
    fn missing_bracket_is_an_error() {
        assert!(matches!(
            solve_bracketed(|x| (x * x + 1.0, 2.0 * x), -1.0, 1.0, RootOptions::default()),
            Err(RootError::NoBracket { .. })
        ));
    }
}
