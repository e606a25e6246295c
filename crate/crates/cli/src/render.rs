//! JSON encodings shared by the commands, and the plain-text table view.

use depthcalc::lattice::{FGAbelianGroup, IntMatrix};
use depthcalc::plcalc::PLFunction;
use depthcalc::rational::{render, value_to_q};
use depthcalc::{Error, Result, Q};
use serde_json::{json, Map, Value};

pub fn rq(x: &Q) -> Value {
    Value::String(render(x))
}

pub fn pl(f: &PLFunction) -> Value {
    json!({
        "breakpoints": f.breakpoints().iter().map(|(x, y)| json!([render(x), render(y)])).collect::<Vec<_>>(),
        "final_slope": render(f.final_slope()),
    })
}

/// Reads `{"breakpoints": [[x, y], ...], "final_slope": s}` with rationals
/// given as strings, integers or pairs.
pub fn parse_pl(v: &Value) -> Result<PLFunction> {
    let bad = || Error::Validation("a PL function needs \"breakpoints\" and \"final_slope\"".into());
    let pts = v.get("breakpoints").and_then(Value::as_array).ok_or_else(bad)?;
    let mut points = Vec::with_capacity(pts.len());
    for p in pts {
        match p.as_array().map(Vec::as_slice) {
            Some([x, y]) => points.push((value_to_q(x)?, value_to_q(y)?)),
            _ => return Err(Error::Validation("each breakpoint is an [x, y] pair".into())),
        }
    }
    PLFunction::new(points, value_to_q(v.get("final_slope").ok_or_else(bad)?)?)
}

pub fn group(g: &FGAbelianGroup) -> Value {
    json!({ "free_rank": g.free_rank, "torsion": g.torsion, "finite": g.is_finite(), "order": g.order() })
}

pub fn matrix(m: &IntMatrix) -> Value {
    json!(m.to_rows())
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&key(k), x, rows);
            }
        }
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            rows.push((prefix.to_string(), items.iter().map(scalar).collect::<Vec<_>>().join(", ")));
        }
        Value::Array(items) if items.iter().all(|x| x.as_array().is_some_and(|r| r.iter().all(|y| !y.is_object() && !y.is_array()))) => {
            let text = items
                .iter()
                .map(|r| format!("[{}]", r.as_array().unwrap().iter().map(scalar).collect::<Vec<_>>().join(", ")))
                .collect::<Vec<_>>()
                .join(" ");
            rows.push((prefix.to_string(), text));
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, rows);
            }
        }
        other => rows.push((prefix.to_string(), scalar(other))),
    }
}

/// Two aligned columns, one row per leaf of the document.
pub fn table(doc: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", doc, &mut rows);
    let width = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        let pad = width - k.chars().count();
        out.push_str(&k);
        out.push_str(&" ".repeat(pad + 2));
        out.push_str(&v);
        out.push('\n');
    }
    out
}

pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in pairs {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}
