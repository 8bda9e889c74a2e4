use std::fmt::Write as _;

use mlexp_core::edgeworth::{try_derivation, Derivation, ExpansionModel};
use mlexp_core::golden::{run_golden_suite, run_golden_suite_from};
use mlexp_core::numeric::etas::{compute_etas, identity_checks, standardize, EtaVector, Standardized};
use mlexp_core::numeric::montecarlo::{monte_carlo_cdf, McConfig, McError, McReport};
use serde_json::json;

use crate::config::{CommandKind, Format, RunConfig, Target};
use crate::error::{CliError, EXIT_GOLDEN, EXIT_NUMERIC, EXIT_OK};
use crate::render::{self, Entry};
use crate::report::{mc_text, plot_csv, write_artifacts, Artifact, FamilyLine, ValidationSummary};

/// What a run prints and writes, and the status it exits with.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub artifacts: Vec<Artifact>,
    pub status: u8,
}

impl Outcome {
    fn single(cfg: &RunConfig, stdout: String) -> Self {
        let name = format!("{}.{}", cfg.command.name(), cfg.format.extension());
        Outcome { artifacts: vec![Artifact::new(name, stdout.clone())], stdout, status: EXIT_OK }
    }
}

/// Executes the configured command and writes its artifacts when an output directory is set.
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let outcome = match &cfg.command {
        CommandKind::Derive(target) => derive(cfg, *target)?,
        CommandKind::Etas => etas(cfg)?,
        CommandKind::Eval { .. } => eval(cfg)?,
        CommandKind::Quantile { us } => quantile(cfg, us)?,
        CommandKind::Simulate => simulate(cfg)?,
        CommandKind::Validate { .. } => validate(cfg)?,
    };
    if let Some(dir) = &cfg.output {
        write_artifacts(dir, &outcome.artifacts)?;
    }
    Ok(outcome)
}

fn derivation() -> Result<&'static Derivation, CliError> {
    try_derivation().map_err(|e| CliError::pipeline("edgeworth-cf", e))
}

fn entries(d: &Derivation, target: Target) -> Vec<Entry<'_>> {
    let mut out = Vec::new();
    let all = target == Target::All;
    if all || target == Target::Mle {
        for (i, b) in d.solution.b.iter().enumerate() {
            out.push(Entry::Poly(format!("B{}", i + 1), b));
        }
        out.push(Entry::Series("Sn".into(), &d.sn));
    }
    if all || target == Target::Moments {
        for (k, m) in d.moments.iter().enumerate() {
            out.push(Entry::Series(format!("E(Sn^{})", k + 1), m));
        }
    }
    if all || target == Target::Cumulants {
        for (k, m) in d.cumulants.kappa.iter().enumerate() {
            out.push(Entry::Series(format!("kappa{}", k + 1), m));
        }
    }
    if all || target == Target::Polys {
        for (j, r) in d.polys.r.iter().enumerate() {
            out.push(Entry::Poly(format!("r{}", j + 1), r));
        }
        for (j, p) in d.polys.p.iter().enumerate() {
            out.push(Entry::Poly(format!("p{}", j + 1), p));
        }
    }
    if all || target == Target::Cf {
        for (name, c) in ["A", "B", "C"].into_iter().zip(d.cf.as_array()) {
            out.push(Entry::Poly(name.into(), c));
        }
    }
    out
}

fn derive(cfg: &RunConfig, target: Target) -> Result<Outcome, CliError> {
    let d = derivation()?;
    let list = entries(d, target);
    let name = format!("{target:?}").to_lowercase();
    let stdout = match cfg.format {
        Format::Text => render::text(&list),
        Format::Json => render::json(&name, &list),
        Format::Csv => render::csv(&list),
    };
    Ok(Outcome::single(cfg, stdout))
}

fn standardized(cfg: &RunConfig) -> Result<Standardized, CliError> {
    let spec = cfg.family.as_ref().expect("validated config has a family");
    let fam = spec.build().map_err(|e| CliError::usage("family", e))?;
    standardize(&fam).map_err(|e| CliError::pipeline("numeric-eval", e))
}

fn eta_fields(v: &EtaVector) -> [(&'static str, f64); 6] {
    [("a2", v.a2), ("eta2", v.eta[0]), ("eta3", v.eta[1]), ("eta4", v.eta[2]), ("eta5", v.eta[3]), ("eta6", v.eta[4])]
}

fn etas(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let s = standardized(cfg)?;
    let raw_fam = cfg.family.as_ref().expect("family").build().map_err(|e| CliError::usage("family", e))?;
    let raw = compute_etas(&raw_fam).map_err(|e| CliError::pipeline("numeric-eval", e))?;
    let stdout = match cfg.format {
        Format::Text => {
            let mut out = format!("family: {}\nscale c: {}\n", s.family.name(), s.scale);
            writeln!(out, "{:<6} {:>24} {:>24}", "", "raw", "standardized").unwrap();
            for ((name, r), (_, v)) in eta_fields(&raw).into_iter().zip(eta_fields(&s.etas)) {
                writeln!(out, "{name:<6} {r:>24} {v:>24}").unwrap();
            }
            out
        }
        Format::Json => {
            let v = json!({ "family": s.family.name(), "scale": s.scale, "raw": raw, "standardized": s.etas });
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
        Format::Csv => {
            let mut out = String::from("quantity,raw,standardized\n");
            for ((name, r), (_, v)) in eta_fields(&raw).into_iter().zip(eta_fields(&s.etas)) {
                writeln!(out, "{name},{r},{v}").unwrap();
            }
            out
        }
    };
    Ok(Outcome::single(cfg, stdout))
}

fn model(cfg: &RunConfig, s: &Standardized) -> Result<ExpansionModel, CliError> {
    ExpansionModel::new(derivation()?, s.etas.eta, cfg.n).map_err(|e| CliError::pipeline("edgeworth-cf", e))
}

fn header(cfg: &RunConfig, s: &Standardized) -> String {
    format!("family {} (scale c = {}), n = {}, order {}\n", s.family.name(), s.scale, cfg.n, cfg.order)
}

fn eval(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let s = standardized(cfg)?;
    let m = model(cfg, &s)?;
    let mut points = Vec::new();
    for x in cfg.eval_points() {
        points.push((x, m.cdf_eval(x, cfg.order).map_err(|e| CliError::pipeline("edgeworth-cf", e))?));
    }
    let stdout = match cfg.format {
        Format::Text => {
            let mut out = header(cfg, &s);
            for (x, v) in &points {
                let flag = if v.clamped { format!(" (clamped from {})", v.raw) } else { String::new() };
                writeln!(out, "G_n({x}) = {}{flag}", v.value).unwrap();
            }
            out
        }
        Format::Json => {
            let pts: Vec<_> = points.iter().map(|(x, v)| json!({ "x": x, "value": v.value, "raw": v.raw, "clamped": v.clamped })).collect();
            let v = json!({ "family": s.family.name(), "scale": s.scale, "n": cfg.n, "order": cfg.order, "eta": s.etas.eta, "points": pts });
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
        Format::Csv => {
            let mut out = String::from("x,value,raw,clamped\n");
            for (x, v) in &points {
                writeln!(out, "{x},{},{},{}", v.value, v.raw, v.clamped).unwrap();
            }
            out
        }
    };
    Ok(Outcome::single(cfg, stdout))
}

fn quantile(cfg: &RunConfig, us: &[f64]) -> Result<Outcome, CliError> {
    let s = standardized(cfg)?;
    let m = model(cfg, &s)?;
    let mut points = Vec::new();
    for &u in us {
        points.push((u, m.quantile_eval(u, cfg.order).map_err(|e| CliError::pipeline("edgeworth-cf", e))?));
    }
    let stdout = match cfg.format {
        Format::Text => {
            let mut out = header(cfg, &s);
            for (u, q) in &points {
                writeln!(out, "q({u}) = {q}").unwrap();
            }
            out
        }
        Format::Json => {
            let pts: Vec<_> = points.iter().map(|(u, q)| json!({ "u": u, "quantile": q })).collect();
            let v = json!({ "family": s.family.name(), "scale": s.scale, "n": cfg.n, "order": cfg.order, "eta": s.etas.eta, "points": pts });
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
        Format::Csv => {
            let mut out = String::from("u,quantile\n");
            for (u, q) in &points {
                writeln!(out, "{u},{q}").unwrap();
            }
            out
        }
    };
    Ok(Outcome::single(cfg, stdout))
}

fn monte_carlo(cfg: &RunConfig, s: &Standardized, reps: u64) -> Result<McReport, CliError> {
    let mc = McConfig { n: cfg.n, reps, seed: cfg.seed, grid: cfg.grid.points(), parallelism: cfg.parallelism };
    monte_carlo_cdf(s, &mc).map_err(|e| match e {
        McError::TooFewReps(_) => CliError::usage("reps", e),
        McError::Grid { .. } => CliError::usage("grid", e),
        other => CliError::pipeline("numeric-eval", other),
    })
}

fn simulate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let s = standardized(cfg)?;
    let r = monte_carlo(cfg, &s, cfg.reps.expect("simulate has reps"))?;
    let (csv, summary) = (r.to_csv(), r.summary_json());
    let stdout = match cfg.format {
        Format::Text => mc_text(&r),
        Format::Json => summary.clone(),
        Format::Csv => csv.clone(),
    };
    let artifacts = vec![Artifact::new("mc.csv", csv), Artifact::new("mc_summary.json", summary), Artifact::new("plot.csv", plot_csv(&r))];
    Ok(Outcome { stdout, artifacts, status: EXIT_OK })
}

fn validate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let CommandKind::Validate { fixture } = &cfg.command else { unreachable!() };
    let golden = match fixture {
        Some(path) => {
            let src = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            run_golden_suite_from(&src).map_err(|e| CliError::usage("fixture", e))?
        }
        None => run_golden_suite().map_err(|e| CliError::Golden(e.to_string()))?,
    };
    let s = standardized(cfg)?;
    let identities = identity_checks(&s.family).map_err(|e| CliError::pipeline("numeric-eval", e))?;
    let mc = cfg.reps.map(|reps| monte_carlo(cfg, &s, reps)).transpose()?;
    let family = FamilyLine { name: s.family.name().to_string(), scale: s.scale, eta: s.etas.eta };
    let summary = ValidationSummary::new(family, golden, identities, mc);
    let status = if !summary.golden_passed() {
        EXIT_GOLDEN
    } else if !summary.identities_passed() {
        EXIT_NUMERIC
    } else {
        EXIT_OK
    };
    let (text, json) = (summary.text(), summary.json());
    let mut artifacts = vec![Artifact::new("report.txt", text.clone()), Artifact::new("report.json", json.clone()), Artifact::new("golden.csv", summary.golden_csv())];
    if let Some(r) = &summary.monte_carlo {
        artifacts.push(Artifact::new("mc.csv", r.to_csv()));
        artifacts.push(Artifact::new("plot.csv", plot_csv(r)));
    }
    let stdout = match cfg.format {
        Format::Text => text,
        Format::Json => json,
        Format::Csv => summary.monte_carlo.as_ref().map(McReport::to_csv).unwrap_or_else(|| summary.golden_csv()),
    };
    Ok(Outcome { stdout, artifacts, status })
}
