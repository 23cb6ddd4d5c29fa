//! JSON encoding of exact results. Rationals are "p/q" strings and every
//! object is keyed by strings, so `serde_json`'s sorted maps make the
//! output byte-stable.

use std::collections::BTreeMap;

use mrkit::correlators::{Calibration, CorrelatorTable};
use mrkit::resolvent::{MRData, OmegaTable};
use mrkit::waves::{ATable, WavePair};
use mrkit::{Check, DiffPoly, EpsLaurent, Rational, Report, XJet, XiSeries};
use serde_json::{json, Map, Value};

pub fn rational(q: &Rational) -> Value {
    Value::String(q.to_string())
}

/// A lone ε⁰ coefficient is written as a bare rational, anything else as
/// an {"ε^k": "p/q"} map; a finite ceiling adds the key "O".
pub fn eps(c: &EpsLaurent<Rational>) -> Value {
    if c.is_exact() {
        if let Some(k) = c.as_constant() {
            return rational(&k);
        }
    }
    eps_map(c)
}

pub fn eps_map(c: &EpsLaurent<Rational>) -> Value {
    let mut m = Map::new();
    for (k, v) in c.terms() {
        m.insert(format!("ε^{k}"), rational(v));
    }
    if let Some(ceil) = c.ceiling() {
        m.insert("O".into(), Value::String(format!("ε^{}", ceil + 1)));
    }
    Value::Object(m)
}

pub fn xjet(j: &XJet<Rational>) -> Value {
    let mut m = Map::new();
    for (k, c) in j.coeffs().iter().enumerate() {
        if !c.is_empty() {
            m.insert(format!("X^{k}"), eps(c));
        }
    }
    if let Some(v) = j.valid_order() {
        m.insert("O".into(), Value::String(format!("X^{}", v + 1)));
    }
    Value::Object(m)
}

pub fn diffpoly(p: &DiffPoly<Rational>) -> Value {
    let terms = p
        .terms()
        .map(|(mono, c)| {
            let mono: Vec<Value> = mono.iter().map(|(v, pow)| json!([v.species.name(), v.order, pow])).collect();
            json!({ "monomial": mono, "coeff": eps_map(c) })
        })
        .collect();
    Value::Array(terms)
}

pub fn xi_series<R>(s: &XiSeries<R>, enc: impl Fn(&R) -> Value) -> Value
where
    R: mrkit::Ring,
{
    let mut m = Map::new();
    for (e, c) in s.terms() {
        m.insert(format!("ξ^{e}"), enc(c));
    }
    if !s.is_exact() {
        m.insert("O".into(), Value::String(format!("ξ^{}", s.floor() - 1)));
    }
    Value::Object(m)
}

pub fn mr_data<R: mrkit::Ring>(d: &MRData<R>, enc: impl Fn(&R) -> Value) -> Value {
    let list = |v: &[R]| Value::Array(v.iter().map(&enc).collect());
    json!({ "A": list(&d.a), "B": list(&d.b), "C": list(&d.c) })
}

fn pair_key(i: usize, j: usize) -> String {
    format!("({i},{j})")
}

pub fn omega<R: mrkit::Ring>(t: &OmegaTable<R>, enc: impl Fn(&R) -> Value) -> Value {
    let m: Map<String, Value> = t.entries.iter().map(|(&(i, j), c)| (pair_key(i, j), enc(c))).collect();
    Value::Object(m)
}

pub fn correlator(t: &CorrelatorTable<XJet<Rational>>) -> Value {
    let m: Map<String, Value> = t
        .entries
        .iter()
        .map(|(idx, c)| {
            let parts: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
            (format!("({})", parts.join(",")), xjet(c))
        })
        .collect();
    Value::Object(m)
}

pub fn a_table(t: &ATable<Rational>) -> Value {
    let m: Map<String, Value> = t.entries.iter().map(|(&(i, j), c)| (pair_key(i, j), xjet(c))).collect();
    Value::Object(m)
}

pub fn wave_pair(p: &WavePair<Rational>) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("phi_a".into(), xi_series(&p.phi_a, xjet));
    m.insert("phi_b".into(), xi_series(&p.phi_b, xjet));
    m.insert("d".into(), xi_series(&p.d, xjet));
    if let Some(mult) = &p.multiplier {
        m.insert("multiplier".into(), xi_series(mult, xjet));
    }
    m
}

pub fn calibration(c: &Calibration<Rational>) -> Value {
    json!({
        "alpha": rational(&c.alpha),
        "beta": rational(&c.beta),
        "scale": rational(&c.scale),
        "transposed": c.transposed,
        "validated_k3": c.validated_k3,
    })
}

fn check(c: &Check) -> Value {
    let mut m = BTreeMap::new();
    m.insert("name", json!(c.name));
    m.insert("passed", json!(c.passed));
    if let Some(l) = &c.locus {
        m.insert("locus", json!(l));
    }
    if let Some(w) = &c.window {
        m.insert("window", json!(w));
    }
    if let Some(n) = &c.note {
        m.insert("note", json!(n));
    }
    json!(m)
}

pub fn report(r: &Report) -> Value {
    json!({
        "passed": r.passed(),
        "checks": r.checks.iter().map(check).collect::<Vec<_>>(),
    })
}

pub fn report_text(r: &Report) -> String {
    let mut out = String::new();
    for c in &r.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{status} {}", c.name));
        if let Some(l) = &c.locus {
            out.push_str(&format!(" at {l}"));
        }
        if let Some(w) = &c.window {
            out.push_str(&format!(" [{w}]"));
        }
        if let Some(n) = &c.note {
            out.push_str(&format!(" ({n})"));
        }
        out.push('\n');
    }
    out.push_str(if r.passed() { "overall: PASS\n" } else { "overall: FAIL\n" });
    out
}

pub fn to_bytes(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}
