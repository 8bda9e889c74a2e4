//! Validation summary, its renderings, and atomic artifact output.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use mlexp_core::golden::GoldenResult;
use mlexp_core::numeric::etas::IdentityCheck;
use mlexp_core::numeric::montecarlo::McReport;
use serde::Serialize;

use crate::error::CliError;

/// Residual bound for a numeric identity check to pass.
pub const IDENTITY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

impl Artifact {
    pub fn new(name: impl Into<String>, contents: impl Into<String>) -> Self {
        Artifact { name: name.into(), contents: contents.into() }
    }
}

/// Writes each artifact to a temporary file in `dir` and renames it into place.
pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<(), CliError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    for a in artifacts {
        let target = dir.join(&a.name);
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io(dir))?;
        tmp.write_all(a.contents.as_bytes()).map_err(io(&target))?;
        tmp.as_file().sync_all().map_err(io(&target))?;
        tmp.persist(&target).map_err(|e| CliError::Io { path: target.clone(), source: e.error })?;
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyLine {
    pub name: String,
    pub scale: f64,
    pub eta: [f64; 5],
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationSummary {
    pub status: &'static str,
    pub family: FamilyLine,
    pub golden: Vec<GoldenResult>,
    pub identities: Vec<IdentityCheck>,
    /// Absent when the Monte Carlo stage was not requested.
    pub monte_carlo: Option<McReport>,
}

impl ValidationSummary {
    pub fn new(family: FamilyLine, golden: Vec<GoldenResult>, identities: Vec<IdentityCheck>, monte_carlo: Option<McReport>) -> Self {
        let mut s = ValidationSummary { status: "", family, golden, identities, monte_carlo };
        s.status = if s.golden_passed() && s.identities_passed() { "PASS" } else { "FAIL" };
        s
    }

    pub fn golden_passed(&self) -> bool {
        self.golden.iter().all(GoldenResult::passed)
    }

    pub fn identities_passed(&self) -> bool {
        self.identities.iter().all(|c| c.residual <= IDENTITY_TOL)
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        writeln!(w, "{}", self.status).unwrap();
        writeln!(w, "family: {} (scale c = {})", self.family.name, self.family.scale).unwrap();
        writeln!(w, "eta2..eta6: {}", join(&self.family.eta)).unwrap();
        let passed = self.golden.iter().filter(|g| g.passed()).count();
        writeln!(w, "\n== golden symbolic suite: {passed}/{} exact", self.golden.len()).unwrap();
        for g in &self.golden {
            writeln!(w, "{g}").unwrap();
        }
        let ok = self.identities.iter().filter(|c| c.residual <= IDENTITY_TOL).count();
        writeln!(w, "\n== numeric identity checks: {ok}/{} within {IDENTITY_TOL:e}", self.identities.len()).unwrap();
        for c in &self.identities {
            let tag = if c.residual <= IDENTITY_TOL { "PASS" } else { "FAIL" };
            writeln!(w, "{tag} {}: lhs {} rhs {} residual {:e}", c.name, c.lhs, c.rhs, c.residual).unwrap();
        }
        writeln!(w).unwrap();
        match &self.monte_carlo {
            Some(r) => w.push_str(&mc_text(r)),
            None => writeln!(w, "== Monte Carlo: not run").unwrap(),
        }
        out
    }

    pub fn json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes") + "\n"
    }

    /// Golden results as `section,name,status,differing_terms`.
    pub fn golden_csv(&self) -> String {
        let mut out = String::from("section,name,status,differing_terms\n");
        for g in &self.golden {
            let status = if g.passed() { "PASS" } else { "FAIL" };
            writeln!(out, "{},{},{status},{}", g.section, g.name, g.diffs.len()).unwrap();
        }
        out
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn mc_text(r: &McReport) -> String {
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "== Monte Carlo: {} (scale c = {}), n = {}, reps = {}, seed = {}", r.family, r.scale, r.n, r.reps, r.seed).unwrap();
    writeln!(w, "grid: {} points from {} to {}", r.grid.len(), r.grid[0], r.grid[r.grid.len() - 1]).unwrap();
    writeln!(w, "failures: {}", r.failures).unwrap();
    writeln!(w, "standard error: {}", r.standard_error).unwrap();
    for (k, d) in r.sup_distance.iter().enumerate() {
        writeln!(w, "sup distance order {k}: {d}").unwrap();
    }
    writeln!(w, "non-increasing in order: {}", if r.orders_non_increasing() { "yes" } else { "no" }).unwrap();
    out
}

/// Columns x, abs_err0..abs_err3 for external plotting.
pub fn plot_csv(r: &McReport) -> String {
    let mut out = String::from("x,abs_err0,abs_err1,abs_err2,abs_err3\n");
    for (i, x) in r.grid.iter().enumerate() {
        writeln!(out, "{x},{},{},{},{}", r.abs_err[0][i], r.abs_err[1][i], r.abs_err[2][i], r.abs_err[3][i]).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use mlexp_core::golden::TermDiff;

    fn golden(pass: bool) -> GoldenResult {
        let diffs = if pass {
            vec![]
        } else {
            vec![TermDiff { order: Some(2), monomial: "eta3".into(), printed: "1/2".into(), derived: "-1/2".into() }]
        };
        GoldenResult { section: "mle".into(), name: "B2".into(), diffs, error: None }
    }

    fn family() -> FamilyLine {
        FamilyLine { name: "gaussian".into(), scale: 1.0, eta: [2.0, 0.0, 3.0, 0.0, 0.0] }
    }

    #[test]
    fn derive_only_summary_notes_mc_not_run() {
        let s = ValidationSummary::new(family(), vec![golden(true)], vec![], None);
        assert_eq!(s.status, "PASS");
        let t = s.text();
        assert!(t.starts_with("PASS\n"));
        assert!(t.contains("== Monte Carlo: not run"));
    }

    #[test]
    fn mismatch_embeds_term_diff() {
        let s = ValidationSummary::new(family(), vec![golden(true), golden(false)], vec![], None);
        assert_eq!(s.status, "FAIL");
        assert!(s.text().contains("FAIL mle/B2\n    e^2 [eta3] printed 1/2 derived -1/2"));
        assert!(s.json().contains("\"derived\": \"-1/2\""));
        assert!(s.golden_csv().contains("mle,B2,FAIL,1"));
    }

    #[test]
    fn identity_failure_fails_status() {
        let bad = IdentityCheck { name: "integral f".into(), lhs: 1.1, rhs: 1.0, residual: 0.1 };
        let s = ValidationSummary::new(family(), vec![golden(true)], vec![bad], None);
        assert_eq!(s.status, "FAIL");
        assert!(s.golden_passed());
    }

    #[test]
    fn atomic_writes_replace_files() {
        let dir = tempfile::tempdir().unwrap();
        let sub = dir.path().join("nested");
        write_artifacts(&sub, &[Artifact::new("a.txt", "one")]).unwrap();
        write_artifacts(&sub, &[Artifact::new("a.txt", "two")]).unwrap();
        assert_eq!(std::fs::read_to_string(sub.join("a.txt")).unwrap(), "two");
        assert_eq!(std::fs::read_dir(&sub).unwrap().count(), 1);
    }
}
