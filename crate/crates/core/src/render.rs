//! Text and JSON renderings of pages, differentials and convergence levels.

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::chain::Combination;
use crate::lattice::Component;
use crate::spectral::PageGroup;

/// Short component label used in JSON: `Z` or `Z/m`.
pub fn component_label(c: &Component) -> String {
    match c {
        Component::Free => "Z".to_string(),
        Component::Torsion(m) => format!("Z/{m}"),
    }
}

/// `Spectral sequence E^r_{p,q}` followed by one `Component …` line per factor.
pub fn group_text(g: &PageGroup) -> String {
    let mut out = format!("Spectral sequence E^{}_{{{},{}}}\n", g.r, g.p, g.q);
    for c in g.components() {
        out.push_str(&format!("Component {c}\n"));
    }
    if !g.guaranteed {
        out.push_str("(not guaranteed: r does not exceed the homotopy order of the equivalence)\n");
    }
    out
}

fn integers(v: &[BigInt]) -> Vec<Value> {
    v.iter()
        .map(|x| match i64::try_from(x) {
            Ok(i) => json!(i),
            Err(_) => json!(x.to_string()),
        })
        .collect()
}

pub fn group_json(g: &PageGroup) -> Value {
    json!({
        "r": g.r,
        "p": g.p,
        "q": g.q,
        "components": g.components().iter().map(component_label).collect::<Vec<_>>(),
        "numerator": g.presentation.numerator.iter().map(|v| integers(v)).collect::<Vec<_>>(),
        "divisors": integers(g.divisors()),
        "guaranteed": g.guaranteed,
    })
}

/// Basis-divisors listing: one combination block per numerator generator,
/// then the divisor list.
pub fn basis_divisors_text(g: &PageGroup) -> String {
    let mut out = String::from("((\n");
    for c in &g.generators {
        out.push_str(&c.to_string());
        out.push('\n');
    }
    out.push_str(&format!("  )\n {})\n", list(g.divisors())));
    out
}

pub fn basis_divisors_json(g: &PageGroup) -> Value {
    let mut v = group_json(g);
    v["generators"] = Value::Array(g.generators.iter().map(combination_json).collect());
    v
}

pub fn combination_json(c: &Combination) -> Value {
    json!({
        "degree": c.degree(),
        "terms": c.terms().map(|(g, k)| json!([integers(std::slice::from_ref(k))[0].clone(), g.to_string()])).collect::<Vec<_>>(),
    })
}

/// Lisp-style integer list, `(1 0 2)`.
pub fn list(v: &[BigInt]) -> String {
    format!("({})", v.iter().map(BigInt::to_string).collect::<Vec<_>>().join(" "))
}

pub fn coordinates_json(v: &[BigInt]) -> Value {
    Value::Array(integers(v))
}

/// One line per term, `k*generator`, joined by ` + `; `0` when empty.
pub fn inline(c: &Combination) -> String {
    if c.is_zero() {
        return "0".to_string();
    }
    c.terms().map(|(g, k)| format!("{k}*{g}")).collect::<Vec<_>>().join(" + ")
}
