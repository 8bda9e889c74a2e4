//! Location MLE: root of the mean score L_n′(θ) = n⁻¹Σℓ′(X_i − θ) with a safeguarded Newton solver.

use serde::Serialize;

use super::family::LocationFamily;
use super::roots::{newton_bisect, RootOptions};

/// |L_n′(θ̂)| bound for a converged solve.
pub const SCORE_TOL: f64 = 1e-10;
/// Scan resolution for families whose likelihood may be multimodal.
pub const SCAN_POINTS: usize = 256;
const MAX_ITER: usize = 200;
const MAX_WIDENINGS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MleResult {
    pub theta_hat: f64,
    pub iterations: usize,
    pub converged: bool,
    pub score_residual: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MleError {
    #[error("sample is empty")]
    EmptySample,
    #[error("sample value {0} is not finite")]
    NonFinite(f64),
}

/// L_n′(θ) and its θ-derivative. Increasing in θ for log-concave families.
fn mean_score(fam: &LocationFamily, sample: &[f64], theta: f64) -> (f64, f64) {
    let (mut g, mut dg) = (0.0, 0.0);
    for &x in sample {
        let (l1, l2) = fam.score_pair(x - theta);
        g += l1;
        dg -= l2;
    }
    let n = sample.len() as f64;
    (g / n, dg / n)
}

fn objective(fam: &LocationFamily, sample: &[f64], theta: f64) -> f64 {
    -sample.iter().map(|&x| fam.log_density(x - theta)).sum::<f64>()
}

fn median(sample: &[f64]) -> f64 {
    let mut v = sample.to_vec();
    let mid = v.len() / 2;
    let (_, &mut hi, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    if v.len() % 2 == 1 {
        hi
    } else {
        let lo = v[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lo + hi)
    }
}

fn refine(fam: &LocationFamily, sample: &[f64], lo: f64, hi: f64, x0: f64) -> MleResult {
    let opts = RootOptions { xtol: 0.0, ftol: SCORE_TOL, max_iter: MAX_ITER };
    match newton_bisect(|t| mean_score(fam, sample, t), lo, hi, x0, opts) {
        Ok(r) => MleResult { theta_hat: r.root, iterations: r.iterations, converged: r.converged, score_residual: r.residual },
        Err(_) => {
            let g = mean_score(fam, sample, x0).0;
            MleResult { theta_hat: x0, iterations: 0, converged: false, score_residual: g }
        }
    }
}

/// Minimizer of L_n(θ) = −n⁻¹Σ log f(X_i − θ).
///
/// Log-concave families have a single score root, found by Newton from the sample median inside
/// [min − 1, max + 1] (widened if the score does not change sign there). Other families scan
/// L_n′ on [`SCAN_POINTS`] points, refine every local minimum and keep the smallest L_n.
pub fn solve_mle(fam: &LocationFamily, sample: &[f64]) -> Result<MleResult, MleError> {
    if sample.is_empty() {
        return Err(MleError::EmptySample);
    }
    if let Some(&x) = sample.iter().find(|x| !x.is_finite()) {
        return Err(MleError::NonFinite(x));
    }
    let (min, max) = sample.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let (mut lo, mut hi) = (min - 1.0, max + 1.0);
    let g = |t: f64| mean_score(fam, sample, t).0;
    let mut widenings = 0;
    while !(g(lo) < 0.0 && g(hi) > 0.0) && widenings < MAX_WIDENINGS {
        let w = hi - lo;
        lo -= w;
        hi += w;
        widenings += 1;
    }
    if fam.log_concave() {
        return Ok(refine(fam, sample, lo, hi, median(sample)));
    }
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let nodes: Vec<f64> = (0..SCAN_POINTS).map(|i| lo + step * i as f64).collect();
    let values: Vec<f64> = nodes.iter().map(|&t| g(t)).collect();
    let mut best: Option<(f64, MleResult)> = None;
    for i in 0..SCAN_POINTS - 1 {
        // L_n′ crossing from − to + marks a local minimum of L_n.
        let exact = values[i] == 0.0 && (i == 0 || values[i - 1] < 0.0) && values[i + 1] > 0.0;
        if !(exact || (values[i] < 0.0 && values[i + 1] >= 0.0)) {
            continue;
        }
        let r = refine(fam, sample, nodes[i], nodes[i + 1], 0.5 * (nodes[i] + nodes[i + 1]));
        let obj = objective(fam, sample, r.theta_hat);
        let better = match &best {
            None => true,
            Some((b, br)) => (r.converged && !br.converged) || (r.converged == br.converged && obj < *b),
        };
        if better {
            best = Some((obj, r));
        }
    }
    Ok(best.map(|(_, r)| r).unwrap_or_else(|| {
        let t = median(sample);
        MleResult { theta_hat: t, iterations: 0, converged: false, score_residual: g(t) }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::family::{Builtin, CustomFamily, Support};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fam(b: Builtin) -> LocationFamily {
        LocationFamily::builtin(b)
    }

    #[test]
    fn gaussian_gives_sample_mean() {
        let s = [0.3, -1.2, 2.5, 0.7, 4.1];
        let r = solve_mle(&fam(Builtin::Gaussian), &s).unwrap();
        assert!(r.converged);
        assert!((r.theta_hat - s.iter().sum::<f64>() / 5.0).abs() < 1e-12);
        assert!(r.iterations <= 2);
    }

    #[test]
    fn symmetric_pair_gives_zero() {
        for b in [Builtin::Gaussian, Builtin::Logistic, Builtin::HyperbolicSecant, Builtin::Cauchy] {
            let r = solve_mle(&fam(b), &[-0.8, 0.8]).unwrap();
            assert!(r.converged, "{b}");
            assert!(r.theta_hat.abs() < 1e-10, "{b}: {}", r.theta_hat);
        }
    }

    #[test]
    fn single_logistic_point() {
        let r = solve_mle(&fam(Builtin::Logistic), &[2.75]).unwrap();
        assert!(r.converged);
        assert!((r.theta_hat - 2.75).abs() < 1e-10);
        assert!(r.score_residual.abs() <= SCORE_TOL);
    }

    #[test]
    fn cauchy_picks_global_minimum() {
        // Two clusters; the larger one holds the global minimum of L_n.
        let s = [-10.0, -10.1, -9.9, 5.0, 5.05, 4.95, 5.1, 4.9];
        let r = solve_mle(&fam(Builtin::Cauchy), &s).unwrap();
        assert!(r.converged);
        assert!((r.theta_hat - 5.0).abs() < 0.1, "{}", r.theta_hat);
        let local = solve_mle(&fam(Builtin::Cauchy), &s[..3]).unwrap();
        assert!(objective(&fam(Builtin::Cauchy), &s, r.theta_hat) < objective(&fam(Builtin::Cauchy), &s, local.theta_hat));
    }

    #[test]
    fn shifted_custom_mode_widens_bracket() {
        let c = CustomFamily::new("shifted", "-(x - 30)^2 / 2", Support::REAL_LINE, false, true).unwrap();
        let r = solve_mle(&LocationFamily::custom(c), &[0.0, 1.0]).unwrap();
        assert!(r.converged);
        assert!((r.theta_hat - (0.5 - 30.0)).abs() < 1e-8, "{}", r.theta_hat);
    }

    #[test]
    fn rejects_bad_samples() {
        assert_eq!(solve_mle(&fam(Builtin::Gaussian), &[]), Err(MleError::EmptySample));
        assert!(matches!(solve_mle(&fam(Builtin::Gaussian), &[1.0, f64::NAN]), Err(MleError::NonFinite(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn location_equivariance(seed in any::<u64>(), shift in -50.0f64..50.0, n in 1usize..40, which in 0usize..5) {
            let f = fam(Builtin::ALL[which]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s: Vec<f64> = (0..n).map(|_| f.sample(&mut rng)).collect();
            let moved: Vec<f64> = s.iter().map(|x| x + shift).collect();
            let a = solve_mle(&f, &s).unwrap();
            let b = solve_mle(&f, &moved).unwrap();
            prop_assert!(a.converged && b.converged);
            prop_assert!(a.score_residual.abs() <= SCORE_TOL && b.score_residual.abs() <= SCORE_TOL);
            prop_assert!((b.theta_hat - a.theta_hat - shift).abs() < 1e-9 * (1.0 + shift.abs()), "{} {} {}", a.theta_hat, b.theta_hat, shift);
        }
    }
}
