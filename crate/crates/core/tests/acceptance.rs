//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`). The process fails if any criterion fails unless
//! that criterion is listed in `KNOWN_GAPS`, which the README discusses.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mlexp_core::edgeworth::{try_derivation, ExpansionModel};
use mlexp_core::golden::run_golden_suite;
use mlexp_core::moments::{xi_expectation, xi_expectation_with, BlockMoments, EtaBlocks, XiMonomial};
use mlexp_core::numeric::etas::{identity_checks, standardize};
use mlexp_core::numeric::family::{Builtin, LocationFamily};
use mlexp_core::numeric::montecarlo::{monte_carlo_cdf, Grid, McConfig, McReport, Parallelism};
use mlexp_core::numeric::normal;
use mlexp_core::symbolic::{rat, GradedSeries, SymPoly, Symbol};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Criteria expected to fail; reported but not fatal.
const KNOWN_GAPS: &[&str] = &["6b"];

const MC_N: usize = 20;
const MC_REPS: u64 = 1_000_000;
const MC_SEED: u64 = 20_240_601;
const MC_GRID: &str = "-4:4:0.05";

struct Outcome {
    id: &'static str,
    title: &'static str,
    passed: bool,
    detail: String,
    elapsed: Duration,
    budget: Duration,
}

fn timed(id: &'static str, title: &'static str, budget_secs: u64, f: impl FnOnce() -> Result<String, String>) -> Outcome {
    let start = Instant::now();
    let r = f();
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget_secs);
    let (mut passed, mut detail) = match r {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if elapsed > budget {
        passed = false;
        detail = format!("{detail}; over budget");
    }
    Outcome { id, title, passed, detail, elapsed, budget }
}

fn criterion_1() -> Result<String, String> {
    let results = run_golden_suite().map_err(|e| e.to_string())?;
    let failed: Vec<String> = results.iter().filter(|r| !r.passed()).map(|r| format!("{r}")).collect();
    if failed.is_empty() {
        Ok(format!("{} printed entries reproduced exactly", results.len()))
    } else {
        Err(format!("{} of {} entries differ:\n{}", failed.len(), results.len(), failed.join("\n")))
    }
}

fn criterion_2() -> Result<String, String> {
    let d = try_derivation().map_err(|e| e.to_string())?;
    let gauss: BTreeMap<Symbol, SymPoly> = [(2, 2), (3, 0), (4, 3), (5, 0), (6, 0)]
        .into_iter()
        .map(|(j, v)| (Symbol::eta(j), SymPoly::int(v)))
        .collect();
    let mut checked = 0;
    for (i, j) in [(1, 2), (1, 3), (2, 2), (3, 1), (3, 2), (4, 1), (5, 1)] {
        let v = d.cumulants.k(i, j).substitute(&gauss);
        if !v.is_zero() {
            return Err(format!("k{i}{j} = {v}"));
        }
        checked += 1;
    }
    for (name, p) in ["p1", "p2", "p3", "A", "B", "C"].iter().zip(d.polys.p.iter().chain(d.cf.as_array())) {
        let v = p.substitute(&gauss);
        if !v.is_zero() {
            return Err(format!("{name} = {v}"));
        }
        checked += 1;
    }
    let model = ExpansionModel::new(d, [2.0, 0.0, 3.0, 0.0, 0.0], 50).map_err(|e| e.to_string())?;
    for i in -80..=80 {
        let x = i as f64 * 0.1;
        let v = model.cdf_eval(x, 3).map_err(|e| e.to_string())?;
        if v.value != normal::cdf(x) {
            return Err(format!("cdf_eval({x}) = {} vs Phi = {}", v.value, normal::cdf(x)));
        }
    }
    Ok(format!("{checked} symbolic objects vanish exactly; cdf_eval equals Phi on 161 points"))
}

/// Pseudo-random exact block moments keyed by block shape.
struct RationalTable(u64);

impl BlockMoments for RationalTable {
    fn block(&self, c: &[u8; 5]) -> SymPoly {
        let mut h = self.0 ^ 0x9e37_79b9_7f4a_7c15;
        for &k in c {
            h = h.wrapping_mul(0x1000_0000_01b3).wrapping_add(k as u64 + 1);
            h ^= h >> 29;
        }
        SymPoly::constant(rat((h % 15) as i64 - 7, ((h >> 8) % 4 + 1) as i64))
    }
}

/// n^{d/2}·E[∏ξ] from every assignment of factor positions to observations, blocks multiplied
/// in symbolic form so η-valued tables stay exact.
fn brute_force(m: &[u8; 5], n: usize, blocks: &impl BlockMoments) -> SymPoly {
    let labels: Vec<usize> = (0..5).flat_map(|j| std::iter::repeat(j).take(m[j] as usize)).collect();
    let d = labels.len();
    let mut total = SymPoly::zero();
    let mut assign = vec![0usize; d];
    let mut cache: BTreeMap<[u8; 5], SymPoly> = BTreeMap::new();
    loop {
        let mut per_obs = vec![[0u8; 5]; n];
        for (pos, &obs) in assign.iter().enumerate() {
            per_obs[obs][labels[pos]] += 1;
        }
        if per_obs.iter().all(|c| c.iter().sum::<u8>() != 1) {
            let mut prod = SymPoly::one();
            for c in per_obs.iter().filter(|c| c.iter().sum::<u8>() > 0) {
                prod = prod.mul_ref(cache.entry(*c).or_insert_with(|| blocks.block(c)));
            }
            total.add_assign_ref(&prod);
        }
        let mut i = 0;
        while i < d {
            assign[i] += 1;
            if assign[i] < n {
                break;
            }
            assign[i] = 0;
            i += 1;
        }
        if i == d {
            break;
        }
    }
    if d % 2 == 1 {
        total.scale(&-BigRational::one())
    } else {
        total
    }
}

/// (Σ_k c_k n^{(d−k)/2}, Σ_k |c_k| n^{(d−k)/2}) for a constant-coefficient series.
fn scaled(s: &GradedSeries, d: usize, n: usize) -> (BigRational, BigRational) {
    let (mut value, mut bound) = (BigRational::zero(), BigRational::zero());
    for (k, c) in s.coeffs().iter().enumerate() {
        let v = c.as_constant().unwrap_or_else(BigRational::zero);
        if v.is_zero() {
            continue;
        }
        let w = BigRational::from_integer(BigInt::from(n).pow(((d - k) / 2) as u32));
        value += &v * &w;
        bound += v.abs() * w;
    }
    (value, bound)
}

fn xi_monomials(max_degree: usize, vars: usize) -> Vec<[u8; 5]> {
    let mut out = Vec::new();
    let mut e = [0u8; 5];
    fn rec(j: usize, vars: usize, left: usize, e: &mut [u8; 5], out: &mut Vec<[u8; 5]>) {
        if j == vars {
            if e.iter().map(|&c| c as usize).sum::<usize>() >= 2 {
                out.push(*e);
            }
            return;
        }
        for c in 0..=left {
            e[j] = c as u8;
            rec(j + 1, vars, left - c, e, out);
        }
        e[j] = 0;
    }
    rec(0, vars, max_degree, &mut e, &mut out);
    out
}

fn criterion_3() -> Result<String, String> {
    let monos = xi_monomials(6, 5);
    let mut checks = 0;
    for seed in [3u64, 17, 91] {
        let table = RationalTable(seed);
        for e in &monos {
            let m = XiMonomial::new(*e);
            let d = m.degree();
            let full = xi_expectation_with(&m, &table, d);
            let cut = xi_expectation_with(&m, &table, 3);
            if full.with_cap(3) != cut {
                return Err(format!("E{m}: truncation is not a prefix of the full expansion"));
            }
            let dropped = GradedSeries::from_coeffs(
                full.coeffs().iter().enumerate().map(|(k, c)| if k > 3 { c.clone() } else { SymPoly::zero() }).collect(),
                d,
            );
            for n in 2..=4 {
                let exact = brute_force(e, n, &table).as_constant().unwrap_or_else(BigRational::zero);
                let (engine, _) = scaled(&full, d, n);
                if engine != exact {
                    return Err(format!("E{m} at n = {n}: engine {engine} vs brute force {exact}"));
                }
                let (trunc, _) = scaled(&cut.with_cap(d), d, n);
                let (_, bound) = scaled(&dropped, d, n);
                if (&exact - &trunc).abs() > bound {
                    return Err(format!("E{m} at n = {n}: truncation gap exceeds the dropped-order bound"));
                }
                checks += 1;
            }
        }
    }
    // The η-basis engine itself, on monomials whose blocks stay within the truncation.
    for e in xi_monomials(4, 3) {
        let m = XiMonomial::new(e);
        let d = m.degree();
        let series = xi_expectation(&m).map_err(|err| err.to_string())?;
        let full = xi_expectation_with(&m, &EtaBlocks, d);
        if full.with_cap(3) != series {
            return Err(format!("E{m}: eta engine differs from its full expansion"));
        }
        for n in 2..=4 {
            let exact = brute_force(&e, n, &EtaBlocks);
            let mut engine = SymPoly::zero();
            for (k, c) in full.coeffs().iter().enumerate() {
                let w = BigRational::from_integer(BigInt::from(n).pow(((d - k) / 2) as u32));
                engine.add_assign_ref(&c.scale(&w));
            }
            if engine != exact {
                return Err(format!("E{m} at n = {n}: eta engine {engine} vs brute force {exact}"));
            }
            checks += 1;
        }
    }
    Ok(format!("{checks} (monomial, n) cases exact at full order, truncation gaps within bound"))
}

fn criterion_4() -> Result<String, String> {
    let mut worst = (0.0f64, String::new());
    let mut count = 0;
    for b in Builtin::ALL {
        let fam = standardize(&LocationFamily::builtin(b)).map_err(|e| format!("{b}: {e}"))?.family;
        for c in identity_checks(&fam).map_err(|e| format!("{b}: {e}"))? {
            if !(c.residual <= 1e-8) {
                return Err(format!("{b}: {} lhs {} rhs {} residual {:e}", c.name, c.lhs, c.rhs, c.residual));
            }
            if c.residual > worst.0 {
                worst = (c.residual, format!("{b}: {}", c.name));
            }
            count += 1;
        }
    }
    Ok(format!("{count} identities within 1e-8; worst {:.1e} ({})", worst.0, worst.1))
}

fn criterion_5() -> Result<String, String> {
    let s = standardize(&LocationFamily::builtin(Builtin::Logistic)).map_err(|e| e.to_string())?;
    let d = try_derivation().map_err(|e| e.to_string())?;
    let us = [0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99];
    let ns = [25usize, 100, 400];
    let mut errs = Vec::new();
    for &n in &ns {
        let model = ExpansionModel::new(d, s.etas.eta, n).map_err(|e| e.to_string())?;
        let mut worst = 0.0f64;
        for &u in &us {
            let q = model.quantile_eval(u, 3).map_err(|e| e.to_string())?;
            let g = model.cdf_eval(q, 3).map_err(|e| e.to_string())?.raw;
            worst = worst.max((g - u).abs());
        }
        errs.push(worst);
    }
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 3.0, ys.iter().sum::<f64>() / 3.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let detail = format!("max errors {:.3e} {:.3e} {:.3e}; slope {slope:.3}", errs[0], errs[1], errs[2]);
    if (slope + 2.0).abs() <= 0.3 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn mc(b: Builtin) -> Result<McReport, String> {
    let s = standardize(&LocationFamily::builtin(b)).map_err(|e| e.to_string())?;
    let grid = MC_GRID.parse::<Grid>().map_err(|e| e.to_string())?.points();
    let cfg = McConfig { n: MC_N, reps: MC_REPS, seed: MC_SEED, grid, parallelism: Parallelism::Parallel };
    monte_carlo_cdf(&s, &cfg).map_err(|e| e.to_string())
}

fn sups(r: &McReport) -> String {
    r.sup_distance.iter().map(|d| format!("{d:.3e}")).collect::<Vec<_>>().join(" ")
}

fn criterion_6a() -> Result<String, String> {
    let r = mc(Builtin::Gaussian)?;
    let limit = 3.0 * r.standard_error;
    let detail = format!("sup |F_emp - Phi| = {:.3e}, limit {limit:.3e}", r.sup_distance[0]);
    if r.sup_distance[0] <= limit {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_6b(r: &McReport) -> Result<String, String> {
    let detail = format!("sup distances by order 0..3: {}; failures {}", sups(r), r.failures);
    let ratio_ok = r.sup_distance[3] * 3.0 <= r.sup_distance[0];
    if r.orders_non_increasing() && ratio_ok {
        Ok(detail)
    } else {
        Err(format!("{detail}; non-increasing {}, order-3 reduction {:.2}x", r.orders_non_increasing(), r.sup_distance[0] / r.sup_distance[3]))
    }
}

fn criterion_7(first: &McReport) -> Result<String, String> {
    let second = mc(Builtin::Logistic)?;
    if first.to_csv() == second.to_csv() && first.summary_json() == second.summary_json() {
        Ok(format!("CSV ({} bytes) and JSON summary identical across runs", first.to_csv().len()))
    } else {
        Err("reports differ between runs with the same seed".into())
    }
}

fn main() -> ExitCode {
    let mut outcomes = vec![
        timed("1", "golden symbolic suite", 30, criterion_1),
        timed("2", "Gaussian collapse", 1, criterion_2),
        timed("3", "small-n brute-force oracle", 120, criterion_3),
        timed("4", "numeric identity checks", 60, criterion_4),
        timed("5", "Cornish-Fisher round trip", 10, criterion_5),
    ];
    let a = timed("6a", "Monte Carlo Gaussian control", 300, criterion_6a);
    let start = Instant::now();
    let logistic = mc(Builtin::Logistic);
    let mut b = timed("6b", "Monte Carlo logistic order monotonicity", 300, || logistic.as_ref().map_err(Clone::clone).and_then(criterion_6b));
    b.elapsed = start.elapsed();
    outcomes.push(a);
    outcomes.push(b);
    outcomes.push(timed("7", "Monte Carlo determinism", 300, || logistic.as_ref().map_err(Clone::clone).and_then(criterion_7)));

    let mut fatal = false;
    for o in &outcomes {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        let known = !o.passed && KNOWN_GAPS.contains(&o.id);
        println!(
            "{tag} {} {} [{:.1} s, budget {} s]{}: {}",
            o.id,
            o.title,
            o.elapsed.as_secs_f64(),
            o.budget.as_secs(),
            if known { " (known gap)" } else { "" },
            o.detail
        );
        fatal |= !o.passed && !known;
    }
    if fatal {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
