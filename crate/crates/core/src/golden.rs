//! Comparison of the derived objects against the printed results in `fixtures/printed.txt`.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::edgeworth::{r_polynomials_generic, try_derivation};
use crate::moments::{a_value, psi_expectation, w_expand, w_moment, xi_expectation, XiMonomial};
use crate::symbolic::{parse_poly, parse_series, GradedSeries, Monomial, PsiMonomial, SymPoly, DEFAULT_CAP};

const PRINTED: &str = include_str!("../fixtures/printed.txt");

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GoldenError {
    #[error("fixture line {line}: {msg}")]
    Fixture { line: usize, msg: String },
    #[error("no derivation registered for `{0}`")]
    Unknown(String),
    #[error("derivation of `{name}` failed: {msg}")]
    Derivation { name: String, msg: String },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Poly(SymPoly),
    Series(GradedSeries),
}

impl Value {
    fn orders(&self) -> Vec<(Option<usize>, &SymPoly)> {
        match self {
            Value::Poly(p) => vec![(None, p)],
            Value::Series(s) => s.coeffs().iter().enumerate().map(|(k, c)| (Some(k), c)).collect(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Poly(p) => write!(f, "{p}"),
            Value::Series(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PrintedEntry {
    pub section: String,
    pub name: String,
    pub value: Value,
}

/// One coefficient that differs; `order` is the ε-power for series entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermDiff {
    pub order: Option<usize>,
    pub monomial: String,
    pub printed: String,
    pub derived: String,
}

impl fmt::Display for TermDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(k) = self.order {
            write!(f, "e^{k} ")?;
        }
        write!(f, "[{}] printed {} derived {}", self.monomial, self.printed, self.derived)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GoldenResult {
    pub section: String,
    pub name: String,
    pub diffs: Vec<TermDiff>,
    pub error: Option<String>,
}

impl GoldenResult {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.diffs.is_empty()
    }
}

impl fmt::Display for GoldenResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {}/{}", self.section, self.name)?;
        if let Some(e) = &self.error {
            write!(f, ": {e}")?;
        }
        for d in &self.diffs {
            write!(f, "\n    {d}")?;
        }
        Ok(())
    }
}

/// Parses the fixture; continuation lines (leading whitespace) join the previous line.
pub fn printed_entries() -> Result<Vec<PrintedEntry>, GoldenError> {
    parse_fixture(PRINTED)
}

pub fn parse_fixture(src: &str) -> Result<Vec<PrintedEntry>, GoldenError> {
    struct Pending {
        line: usize,
        kind: String,
        name: String,
        body: Vec<String>,
    }
    let mut out = Vec::new();
    let mut section = String::new();
    let mut pending: Option<Pending> = None;
    let finish = |p: Pending, section: &str, out: &mut Vec<PrintedEntry>| -> Result<(), GoldenError> {
        let body = p.body.join("\n");
        let err = |e: crate::symbolic::SymbolicError| GoldenError::Fixture { line: p.line, msg: e.to_string() };
        let value = match p.kind.as_str() {
            "poly" => Value::Poly(parse_poly(&body).map_err(err)?),
            "series" => Value::Series(parse_series(&body, DEFAULT_CAP).map_err(err)?),
            k => return Err(GoldenError::Fixture { line: p.line, msg: format!("unknown kind `{k}`") }),
        };
        out.push(PrintedEntry { section: section.to_string(), name: p.name, value });
        Ok(())
    };
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        if let Some(rest) = raw.strip_prefix('@') {
            if let Some(p) = pending.take() {
                finish(p, &section, &mut out)?;
            }
            let (kind, name) = rest
                .split_once(' ')
                .ok_or_else(|| GoldenError::Fixture { line, msg: "header needs a kind and a name".into() })?;
            pending = Some(Pending { line, kind: kind.into(), name: name.trim().into(), body: Vec::new() });
        } else if let Some(s) = raw.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            if let Some(p) = pending.take() {
                finish(p, &section, &mut out)?;
            }
            section = s.to_string();
        } else {
            let p = pending.as_mut().ok_or_else(|| GoldenError::Fixture { line, msg: "body outside an entry".into() })?;
            match p.body.last_mut() {
                Some(last) if raw.starts_with(char::is_whitespace) => {
                    last.push(' ');
                    last.push_str(raw.trim());
                }
                _ => p.body.push(raw.trim().to_string()),
            }
        }
    }
    if let Some(p) = pending.take() {
        finish(p, &section, &mut out)?;
    }
    Ok(out)
}

/// Factors `<prefix><index>` (with optional powers) of a product like `w1^2*w2`.
fn indexed_factors(src: &str, prefix: &str) -> Option<Vec<u8>> {
    let mut out = Vec::new();
    for f in src.split('*') {
        let (base, pow) = f.trim().split_once('^').unwrap_or((f.trim(), "1"));
        let j: u8 = base.strip_prefix(prefix)?.parse().ok()?;
        let pow: usize = pow.parse().ok()?;
        out.extend(std::iter::repeat(j).take(pow));
    }
    Some(out)
}

fn single_monomial(src: &str) -> Option<Monomial> {
    let p = parse_poly(src).ok()?;
    let mut terms = p.terms();
    let (m, c) = terms.next()?;
    (terms.next().is_none() && *c == crate::symbolic::rat(1, 1)).then(|| m.clone())
}

/// The derived counterpart of a printed entry.
pub fn derived_value(name: &str) -> Result<Value, GoldenError> {
    let fail = |msg: String| GoldenError::Derivation { name: name.to_string(), msg };
    let d = || try_derivation().map_err(|e| fail(e.to_string()));
    let index = |s: &str, p: &str| s.strip_prefix(p).and_then(|r| r.parse::<usize>().ok());
    if let Some(inner) = name.strip_prefix("E(").and_then(|r| r.strip_suffix(')')) {
        if let Some(k) = inner.strip_prefix("Sn^").and_then(|k| k.parse::<usize>().ok()) {
            return match k {
                1..=5 => Ok(Value::Series(d()?.moments[k - 1].clone())),
                _ => Err(GoldenError::Unknown(name.into())),
            };
        }
        if let Some(ws) = indexed_factors(inner, "w") {
            if !ws.iter().all(|j| (1..=5).contains(j)) {
                return Err(GoldenError::Unknown(name.into()));
            }
            return Ok(Value::Poly(w_moment(&ws)));
        }
        if let Some(m) = psi_monomial(inner) {
            return Ok(Value::Poly(psi_expectation(&m)));
        }
        if let Some(m) = single_monomial(inner).as_ref().and_then(XiMonomial::from_monomial) {
            return xi_expectation(&m).map(Value::Series).map_err(|e| fail(e.to_string()));
        }
        return Err(GoldenError::Unknown(name.into()));
    }
    let value = match name {
        "Sn" => Value::Series(d()?.sn.clone()),
        "A" => Value::Poly(d()?.cf.a.clone()),
        "B" => Value::Poly(d()?.cf.b.clone()),
        "C" => Value::Poly(d()?.cf.c.clone()),
        _ => match (name.as_bytes().first(), index(name, &name[..1])) {
            (Some(b'B'), Some(k @ 1..=4)) => Value::Poly(d()?.solution.b[k - 1].clone()),
            (Some(b'a'), Some(j @ 2..=5)) => Value::Poly(a_value(j as u8)),
            (Some(b'w'), Some(j @ 1..=5)) => Value::Poly(w_expand(j as u8)),
            (Some(b'r'), Some(j @ 1..=3)) => Value::Poly(r_polynomials_generic()[j - 1].clone()),
            (Some(b'p'), Some(j @ 1..=3)) => Value::Poly(d()?.polys.p[j - 1].clone()),
            _ => match index(name, "kappa") {
                Some(i @ 1..=5) => Value::Series(d()?.cumulants.kappa[i - 1].clone()),
                _ => return Err(GoldenError::Unknown(name.into())),
            },
        },
    };
    Ok(value)
}

fn psi_monomial(src: &str) -> Option<PsiMonomial> {
    let mut exps = [0u8; 12];
    for i in indexed_factors(src, "psi")? {
        *exps.get_mut((i as usize).checked_sub(1)?)? += 1;
    }
    Some(PsiMonomial::from_exponents(&exps))
}

/// The printed ψ-moment identities as (monomial, η expression) pairs.
pub fn printed_psi_identities() -> Vec<(PsiMonomial, SymPoly)> {
    printed_entries()
        .expect("embedded fixture parses")
        .into_iter()
        .filter(|e| e.section == "psi-table")
        .filter_map(|e| {
            let inner = e.name.strip_prefix("E(")?.strip_suffix(')')?;
            match e.value {
                Value::Poly(p) => Some((psi_monomial(inner)?, p)),
                Value::Series(_) => None,
            }
        })
        .collect()
}

/// Term-level differences between two values of the same kind.
pub fn term_diff(printed: &Value, derived: &Value) -> Vec<TermDiff> {
    let (pa, da) = (printed.orders(), derived.orders());
    let zero = SymPoly::zero();
    let len = pa.len().max(da.len());
    let mut out = Vec::new();
    for k in 0..len {
        let order = pa.get(k).or(da.get(k)).and_then(|(o, _)| *o);
        let p = pa.get(k).map_or(&zero, |(_, c)| *c);
        let q = da.get(k).map_or(&zero, |(_, c)| *c);
        let monos: BTreeSet<&Monomial> = p.terms().chain(q.terms()).map(|(m, _)| m).collect();
        for m in monos {
            let (a, b) = (p.coefficient(m), q.coefficient(m));
            if a != b {
                let show = |c: &num_rational::BigRational| c.to_string();
                let mono = if m.is_one() { "1".to_string() } else { m.to_string() };
                out.push(TermDiff { order, monomial: mono, printed: show(&a), derived: show(&b) });
            }
        }
    }
    out
}

pub fn check_entry(entry: &PrintedEntry) -> GoldenResult {
    let (diffs, error) = match derived_value(&entry.name) {
        Ok(v) => (term_diff(&entry.value, &v), None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    GoldenResult { section: entry.section.clone(), name: entry.name.clone(), diffs, error }
}

/// Every printed entry checked against the derivation, in fixture order.
pub fn run_golden_suite() -> Result<Vec<GoldenResult>, GoldenError> {
    Ok(printed_entries()?.iter().map(check_entry).collect())
}

/// The suite against an alternate fixture text in the same format.
pub fn run_golden_suite_from(src: &str) -> Result<Vec<GoldenResult>, GoldenError> {
    Ok(parse_fixture(src)?.iter().map(check_entry).collect())
}
