//! Monte Carlo distribution of √n·θ̂ compared against the Edgeworth expansion.
//!
//! Replication r draws from ChaCha8 keyed by (seed, stream r) and only adds integer counts to a
//! histogram, so a report depends on (family, n, reps, seed, grid) and nothing else.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::estimate::solve_mle;
use super::etas::Standardized;
use crate::edgeworth::{try_derivation, EdgeworthError, ExpansionModel, MAX_ORDER};

pub const MIN_REPS: u64 = 10_000;
/// Largest tolerated fraction of non-converged replications.
pub const MAX_FAILURE_RATE: f64 = 1e-4;
const MAX_GRID_POINTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum McError {
    #[error("invalid grid `{spec}`: {reason}")]
    Grid { spec: String, reason: String },
    #[error("reps = {0} is below the minimum {MIN_REPS}")]
    TooFewReps(u64),
    #[error("n must be at least 1")]
    SampleSize,
    #[error("{failures} of {reps} replications did not converge (limit {MAX_FAILURE_RATE})")]
    TooManyFailures { failures: u64, reps: u64 },
    #[error(transparent)]
    Expansion(#[from] EdgeworthError),
}

/// Evenly spaced x values `lo:hi:step`, both ends included.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self, McError> {
        let spec = format!("{lo}:{hi}:{step}");
        let bad = |reason: &str| Err(McError::Grid { spec: spec.clone(), reason: reason.into() });
        if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
            return bad("bounds and step must be finite");
        }
        if !(step > 0.0) {
            return bad("step must be positive");
        }
        if hi < lo {
            return bad("hi must not be below lo");
        }
        if (hi - lo) / step >= MAX_GRID_POINTS as f64 {
            return bad("too many points");
        }
        Ok(Grid { lo, hi, step })
    }

    pub fn points(&self) -> Vec<f64> {
        // Half-step slack absorbs rounding in (hi − lo)/step.
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.lo + self.step * i as f64).collect()
    }
}

impl FromStr for Grid {
    type Err = McError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let err = |reason: &str| McError::Grid { spec: s.into(), reason: reason.into() };
        if parts.len() != 3 {
            return Err(err("expected lo:hi:step"));
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|_| err(&format!("`{p}` is not a number")));
        Grid::new(num(parts[0])?, num(parts[1])?, num(parts[2])?)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parallelism {
    Sequential,
    /// Rayon workers when the `parallel` feature is on, otherwise sequential.
    #[default]
    Parallel,
}

#[derive(Clone, Debug, PartialEq)]
pub struct McConfig {
    pub n: usize,
    pub reps: u64,
    pub seed: u64,
    pub grid: Vec<f64>,
    pub parallelism: Parallelism,
}

/// Histogram over the cells (−∞, x₀], (x₀, x₁], …, (x_last, ∞) plus a failure count.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Tally {
    cells: Vec<u64>,
    failures: u64,
}

impl Tally {
    fn new(points: usize) -> Self {
        Tally { cells: vec![0; points + 1], failures: 0 }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.cells.iter_mut().zip(other.cells) {
            *a += b;
        }
        self.failures += other.failures;
        self
    }
}

struct Worker<'a> {
    fam: &'a Standardized,
    n: usize,
    seed: u64,
    grid: &'a [f64],
    sample: Vec<f64>,
    tally: Tally,
}

impl<'a> Worker<'a> {
    fn new(fam: &'a Standardized, cfg: &'a McConfig) -> Self {
        Worker { fam, n: cfg.n, seed: cfg.seed, grid: &cfg.grid, sample: vec![0.0; cfg.n], tally: Tally::new(cfg.grid.len()) }
    }

    fn replicate(&mut self, r: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(r);
        for x in self.sample.iter_mut() {
            *x = self.fam.family.sample(&mut rng);
        }
        match solve_mle(&self.fam.family, &self.sample) {
            Ok(m) if m.converged => {
                let t = (self.n as f64).sqrt() * m.theta_hat;
                self.tally.cells[self.grid.partition_point(|&x| x < t)] += 1;
            }
            _ => self.tally.failures += 1,
        }
    }
}

fn run_sequential(fam: &Standardized, cfg: &McConfig) -> Tally {
    let mut w = Worker::new(fam, cfg);
    for r in 0..cfg.reps {
        w.replicate(r);
    }
    w.tally
}

#[cfg(feature = "parallel")]
fn run_parallel(fam: &Standardized, cfg: &McConfig) -> Tally {
    use rayon::prelude::*;
    (0..cfg.reps)
        .into_par_iter()
        .fold(
            || Worker::new(fam, cfg),
            |mut w, r| {
                w.replicate(r);
                w
            },
        )
        .map(|w| w.tally)
        .reduce(|| Tally::new(cfg.grid.len()), Tally::merge)
}

#[cfg(not(feature = "parallel"))]
fn run_parallel(fam: &Standardized, cfg: &McConfig) -> Tally {
    run_sequential(fam, cfg)
}

/// Empirical CDF of √n·θ̂ on the grid next to the expansion at orders 0..=3.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McReport {
    pub family: String,
    /// Factor c with the simulated family f(y/c)/c.
    pub scale: f64,
    pub eta: [f64; 5],
    pub n: usize,
    pub reps: u64,
    pub seed: u64,
    pub failures: u64,
    pub grid: Vec<f64>,
    /// Converged replications with √n·θ̂ ≤ x.
    pub counts: Vec<u64>,
    pub empirical: Vec<f64>,
    /// Expansion value per order, clamped to [0, 1].
    pub model: [Vec<f64>; 4],
    pub abs_err: [Vec<f64>; 4],
    pub sup_distance: [f64; 4],
    /// ½/√reps, the largest binomial standard error of an empirical CDF value.
    pub standard_error: f64,
}

/// Summary subset serialized as JSON next to the CSV table.
#[derive(Serialize)]
struct Summary<'a> {
    family: &'a str,
    scale: f64,
    eta: [f64; 5],
    n: usize,
    reps: u64,
    seed: u64,
    failures: u64,
    grid_points: usize,
    sup_distance: [f64; 4],
    standard_error: f64,
    sup_distance_non_increasing: bool,
}

impl McReport {
    pub fn orders_non_increasing(&self) -> bool {
        self.sup_distance.windows(2).all(|w| w[1] <= w[0])
    }

    /// Columns x, empirical, order0..order3, abs_err0..abs_err3.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,empirical,order0,order1,order2,order3,abs_err0,abs_err1,abs_err2,abs_err3\n");
        for i in 0..self.grid.len() {
            write!(out, "{},{}", self.grid[i], self.empirical[i]).unwrap();
            for k in 0..=MAX_ORDER {
                write!(out, ",{}", self.model[k][i]).unwrap();
            }
            for k in 0..=MAX_ORDER {
                write!(out, ",{}", self.abs_err[k][i]).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn summary_json(&self) -> String {
        let s = Summary {
            family: &self.family,
            scale: self.scale,
            eta: self.eta,
            n: self.n,
            reps: self.reps,
            seed: self.seed,
            failures: self.failures,
            grid_points: self.grid.len(),
            sup_distance: self.sup_distance,
            standard_error: self.standard_error,
            sup_distance_non_increasing: self.orders_non_increasing(),
        };
        serde_json::to_string_pretty(&s).expect("summary serializes") + "\n"
    }
}

/// Simulates `reps` samples of size n at θ = 0 from the standardized family.
pub fn monte_carlo_cdf(fam: &Standardized, cfg: &McConfig) -> Result<McReport, McError> {
    if cfg.n == 0 {
        return Err(McError::SampleSize);
    }
    if cfg.reps < MIN_REPS {
        return Err(McError::TooFewReps(cfg.reps));
    }
    if cfg.grid.is_empty() || cfg.grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(McError::Grid { spec: format!("{:?}", cfg.grid), reason: "grid must be non-empty and strictly increasing".into() });
    }
    let model = ExpansionModel::new(try_derivation()?, fam.etas.eta, cfg.n)?;
    let tally = match cfg.parallelism {
        Parallelism::Sequential => run_sequential(fam, cfg),
        Parallelism::Parallel => run_parallel(fam, cfg),
    };
    if tally.failures as f64 > MAX_FAILURE_RATE * cfg.reps as f64 {
        return Err(McError::TooManyFailures { failures: tally.failures, reps: cfg.reps });
    }
    let ok = (cfg.reps - tally.failures) as f64;
    let counts: Vec<u64> = tally.cells[..cfg.grid.len()]
        .iter()
        .scan(0u64, |acc, &c| {
            *acc += c;
            Some(*acc)
        })
        .collect();
    let empirical: Vec<f64> = counts.iter().map(|&c| c as f64 / ok).collect();
    let mut table: [Vec<f64>; 4] = Default::default();
    for (k, col) in table.iter_mut().enumerate() {
        *col = cfg.grid.iter().map(|&x| model.cdf_eval(x, k).map(|v| v.value)).collect::<Result<_, _>>()?;
    }
    let abs_err = table.each_ref().map(|col| col.iter().zip(&empirical).map(|(m, e)| (m - e).abs()).collect::<Vec<f64>>());
    let sup_distance = abs_err.each_ref().map(|col| col.iter().copied().fold(0.0, f64::max));
    Ok(McReport {
        family: fam.family.name().to_string(),
        scale: fam.scale,
        eta: fam.etas.eta,
        n: cfg.n,
        reps: cfg.reps,
        seed: cfg.seed,
        failures: tally.failures,
        grid: cfg.grid.clone(),
        counts,
        empirical,
        model: table,
        abs_err,
        sup_distance,
        standard_error: 0.5 / (cfg.reps as f64).sqrt(),
    })
}
