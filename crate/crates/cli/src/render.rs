//! Symbolic objects as canonical text, JSON term lists and CSV rows.

use std::fmt::Write as _;

use mlexp_core::symbolic::{GradedSeries, SymPoly};
use serde_json::{json, Map, Value};

pub enum Entry<'a> {
    Poly(String, &'a SymPoly),
    Series(String, &'a GradedSeries),
}

impl Entry<'_> {
    fn name(&self) -> &str {
        match self {
            Entry::Poly(n, _) | Entry::Series(n, _) => n,
        }
    }
}

fn terms(p: &SymPoly) -> Vec<Value> {
    p.terms()
        .map(|(m, c)| {
            let factors: Map<String, Value> = m.factors().iter().map(|(s, e)| (s.to_string(), json!(e))).collect();
            json!({ "coefficient": c.to_string(), "monomial": if m.is_one() { "1".to_string() } else { m.to_string() }, "factors": factors })
        })
        .collect()
}

pub fn text(entries: &[Entry]) -> String {
    let mut out = String::new();
    for e in entries {
        match e {
            Entry::Poly(name, p) => writeln!(out, "{name} = {p}").unwrap(),
            Entry::Series(name, s) => {
                writeln!(out, "{name} =").unwrap();
                for line in s.to_string().lines() {
                    writeln!(out, "  {line}").unwrap();
                }
            }
        }
    }
    out
}

pub fn json(target: &str, entries: &[Entry]) -> String {
    let list: Vec<Value> = entries
        .iter()
        .map(|e| match e {
            Entry::Poly(name, p) => json!({ "name": name, "kind": "poly", "text": p.to_string(), "terms": terms(p) }),
            Entry::Series(name, s) => {
                let orders: Vec<Value> = s
                    .coeffs()
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| json!({ "order": k, "text": c.to_string(), "terms": terms(c) }))
                    .collect();
                json!({ "name": name, "kind": "series", "orders": orders })
            }
        })
        .collect();
    serde_json::to_string_pretty(&json!({ "target": target, "entries": list })).expect("json") + "\n"
}

/// Rows `name,order,coefficient,monomial`; `order` is empty for polynomials.
pub fn csv(entries: &[Entry]) -> String {
    let mut out = String::from("name,order,coefficient,monomial\n");
    let mut row = |name: &str, order: Option<usize>, p: &SymPoly| {
        for (m, c) in p.terms() {
            let k = order.map(|k| k.to_string()).unwrap_or_default();
            let mono = if m.is_one() { "1".to_string() } else { m.to_string() };
            writeln!(out, "{name},{k},{c},{mono}").unwrap();
        }
    };
    for e in entries {
        match e {
            Entry::Poly(_, p) => row(e.name(), None, p),
            Entry::Series(_, s) => {
                for (k, c) in s.coeffs().iter().enumerate() {
                    row(e.name(), Some(k), c);
                }
            }
        }
    }
    out
}
