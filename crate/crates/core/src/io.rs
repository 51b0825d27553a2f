//! Text and JSON formats for degree distributions and results.
//!
//! Degree distributions:
//!
//! ```text
//! # label: dimers and trimers
//! # tail: s=0.02 beta=3.5
//! 0 0
//! 1 0.75
//! 2 0.25
//! ```
//!
//! or `{"label": "...", "pmf": [...], "tail": {"s": 0.02, "beta": 3.5}}`. The tail
//! scale `s` is the coefficient of the excess distribution, `u1(k) ~ s k^{-beta+1}`.
//! Numbers are written in shortest round-trip form, so parse(write(d)) == d bitwise.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::asymptotics::AsymptoteModel;
use crate::degree::{DegreeDistribution, TailSpec, MASS_TOLERANCE};
use crate::error::{Error, Result};
use crate::mc::EnsembleEstimate;
use crate::size_dist::ComponentSizeResult;

/// Version tag written in the header of every CSV file.
pub const CSV_VERSION: &str = "v1";

fn build(values: Vec<f64>, tail: Option<TailSpec>, label: String) -> Result<DegreeDistribution> {
    let sum: f64 = values.iter().sum();
    let d = if (sum - 1.0).abs() <= MASS_TOLERANCE {
        DegreeDistribution::from_pmf(values, tail)?
    } else {
        DegreeDistribution::from_weights(values, tail)?
    };
    Ok(d.with_label(label))
}

fn parse_tail_directive(rest: &str) -> Result<TailSpec> {
    let (mut s, mut beta) = (None, None);
    for item in rest.split_whitespace() {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("tail directive item '{item}' is not key=value")))?;
        let v: f64 = value.parse().map_err(|_| Error::Parse(format!("bad number '{value}' in tail directive")))?;
        match key {
            "s" => s = Some(v),
            "beta" => beta = Some(v),
            other => return Err(Error::Parse(format!("unknown tail key '{other}'"))),
        }
    }
    TailSpec::new(
        s.ok_or(Error::Parse("tail directive lacks s=".into()))?,
        beta.ok_or(Error::Parse("tail directive lacks beta=".into()))?,
    )
}

/// Parses the two-column `k value` format.
pub fn parse_degree_text(text: &str) -> Result<DegreeDistribution> {
    let mut values: Vec<f64> = Vec::new();
    let mut seen: Vec<bool> = Vec::new();
    let mut label = String::new();
    let mut tail = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(rest) = comment.strip_prefix("label:") {
                label = rest.trim().to_string();
            } else if let Some(rest) = comment.strip_prefix("tail:") {
                tail = Some(parse_tail_directive(rest)?);
            }
            continue;
        }
        let line = line.split_once('#').map_or(line, |(data, _)| data.trim_end());
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (Some(k), Some(v), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Parse(format!("line {}: expected 'k value'", lineno + 1)));
        };
        let k: usize = k.parse().map_err(|_| Error::Parse(format!("line {}: bad degree '{k}'", lineno + 1)))?;
        let v: f64 = v.parse().map_err(|_| Error::Parse(format!("line {}: bad value '{v}'", lineno + 1)))?;
        if k >= values.len() {
            values.resize(k + 1, 0.0);
            seen.resize(k + 1, false);
        }
        if std::mem::replace(&mut seen[k], true) {
            return Err(Error::Parse(format!("line {}: degree {k} listed twice", lineno + 1)));
        }
        values[k] = v;
    }
    build(values, tail, label)
}

pub fn write_degree_text(d: &DegreeDistribution) -> String {
    let mut out = String::new();
    if !d.label().is_empty() {
        out.push_str(&format!("# label: {}\n", d.label()));
    }
    if let Some(t) = d.tail() {
        out.push_str(&format!("# tail: s={:?} beta={:?}\n", t.scale(), t.beta()));
    }
    for (k, v) in d.pmf().iter().enumerate() {
        out.push_str(&format!("{k} {v:?}\n"));
    }
    out
}

#[derive(Serialize, Deserialize)]
struct TailJson {
    s: f64,
    beta: f64,
}

#[derive(Serialize, Deserialize)]
struct DegreeJson {
    #[serde(default)]
    label: String,
    pmf: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<TailJson>,
}

pub fn parse_degree_json(text: &str) -> Result<DegreeDistribution> {
    let raw: DegreeJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let tail = raw.tail.map(|t| TailSpec::new(t.s, t.beta)).transpose()?;
    build(raw.pmf, tail, raw.label)
}

pub fn write_degree_json(d: &DegreeDistribution) -> String {
    let raw = DegreeJson {
        label: d.label().to_string(),
        pmf: d.pmf().to_vec(),
        tail: d.tail().map(|t| TailJson { s: t.scale(), beta: t.beta() }),
    };
    serde_json::to_string(&raw).expect("serializable")
}

/// Reads a degree file, choosing JSON for `.json` paths and the text format otherwise.
pub fn read_degree_file(path: &Path) -> Result<DegreeDistribution> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        parse_degree_json(&text)
    } else {
        parse_degree_text(&text)
    }
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn fmt_num(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:?}")
    }
}

/// Summary figures of a size computation shared by the CSV and JSON emitters.
fn size_summary(d: &DegreeDistribution, r: &ComponentSizeResult) -> Vec<(&'static str, Value)> {
    let m = d.moments();
    let mut v = vec![
        ("label", json!(d.label())),
        ("N", json!(r.n_max())),
        ("mu1", num(m.mu1)),
        ("mu2", num(m.mu2)),
        ("mu3", num(m.mu3)),
        ("theta", num(m.theta)),
        ("finite_mass", num(r.finite_mass())),
        ("tail_correction", r.tail_correction().map_or(Value::Null, num)),
        ("giant_fraction", r.giant_fraction_estimate().map_or(Value::Null, num)),
    ];
    if let Some(c) = r.classification() {
        v.push(("case", json!(c.case.to_string())));
        v.push(("branch", json!(c.branch.to_string())));
    }
    v
}

pub fn sizes_to_csv(d: &DegreeDistribution, r: &ComponentSizeResult) -> String {
    let mut out = format!("# compsize component sizes {CSV_VERSION}\n");
    for (key, value) in size_summary(d, r) {
        let shown = match value {
            Value::String(s) => s,
            Value::Null => "none".into(),
            other => other.to_string(),
        };
        out.push_str(&format!("# {key}: {shown}\n"));
    }
    out.push_str("n,w,log_w\n");
    for n in 1..=r.n_max() {
        out.push_str(&format!("{n},{},{}\n", fmt_num(r.w(n)), fmt_num(r.ln_w(n))));
    }
    out
}

pub fn sizes_to_json(d: &DegreeDistribution, r: &ComponentSizeResult) -> String {
    let mut obj: Map<String, Value> = size_summary(d, r).into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    obj.insert("n".into(), json!((1..=r.n_max()).collect::<Vec<_>>()));
    obj.insert("w".into(), Value::Array(r.values().iter().map(|&x| num(x)).collect()));
    obj.insert("log_w".into(), Value::Array(r.log_values().iter().map(|&x| num(x)).collect()));
    serde_json::to_string(&Value::Object(obj)).expect("serializable")
}

/// `(n, w, ln w)` triples read back from a size JSON document; `null` means `-inf`.
pub fn parse_sizes_json(text: &str) -> Result<Vec<(usize, f64, f64)>> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let arr = |key: &str| -> Result<&Vec<Value>> {
        v.get(key).and_then(Value::as_array).ok_or_else(|| Error::Parse(format!("size document lacks '{key}'")))
    };
    let (ns, ws, lns) = (arr("n")?, arr("w")?, arr("log_w")?);
    if ns.len() != ws.len() || ns.len() != lns.len() {
        return Err(Error::Parse("size arrays differ in length".into()));
    }
    ns.iter()
        .zip(ws)
        .zip(lns)
        .map(|((n, w), l)| {
            let n = n.as_u64().ok_or_else(|| Error::Parse("n must be an integer".into()))? as usize;
            let w = w.as_f64().unwrap_or(0.0);
            let l = l.as_f64().unwrap_or(f64::NEG_INFINITY);
            Ok((n, w, l))
        })
        .collect()
}

/// `{case, branch, constants, alpha, s, ...}`; constants whose value underflows are
/// `null`, with their natural logs always present under `ln_constants`.
pub fn asymptote_to_json(model: &AsymptoteModel, extra: &[(&str, Value)]) -> Value {
    let mut constants = Map::new();
    let mut ln_constants = Map::new();
    for (name, value, ln) in model.constants().iter() {
        constants.insert(name.to_string(), if value > 0.0 { num(value) } else { Value::Null });
        ln_constants.insert(name.to_string(), num(ln));
    }
    let mut obj = Map::new();
    obj.insert("case".into(), json!(model.case().to_string()));
    obj.insert("branch".into(), json!(model.branch().to_string()));
    obj.insert("constants".into(), Value::Object(constants));
    obj.insert("ln_constants".into(), Value::Object(ln_constants));
    obj.insert("alpha".into(), model.alpha().map_or(Value::Null, num));
    obj.insert("s".into(), model.s().map_or(Value::Null, num));
    obj.insert("exponent".into(), num(model.power_exponent()));
    obj.insert("degenerate".into(), json!(model.is_degenerate()));
    for (k, v) in extra {
        obj.insert(k.to_string(), v.clone());
    }
    Value::Object(obj)
}

/// `n,asymptote,log_asymptote` rows for `n = from..=to`.
pub fn asymptote_series_csv(model: &AsymptoteModel, from: usize, to: usize) -> String {
    let mut out =
        format!("# compsize asymptote {CSV_VERSION}\n# case: {}\n# branch: {}\n", model.case(), model.branch());
    out.push_str("n,asymptote,log_asymptote\n");
    for n in from..=to {
        let ln = model.ln_eval(n as f64);
        out.push_str(&format!("{n},{},{}\n", fmt_num(linear(ln)), fmt_num(ln)));
    }
    out
}

fn linear(ln: f64) -> f64 {
    if ln == f64::NEG_INFINITY {
        0.0
    } else {
        ln.exp()
    }
}

pub fn ensemble_to_json(e: &EnsembleEstimate) -> Value {
    json!({
        "N": e.node_count,
        "R": e.replicas,
        "seed": e.seed,
        "w_hat": e.w_hat.iter().map(|&(n, v, se)| json!([n, v, se])).collect::<Vec<_>>(),
        "giant_hat": e.giant_hat,
        "giant_se": e.giant_se,
        "largest_hat": e.largest_hat,
        "largest_se": e.largest_se,
        "fixups": e.fixups,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::Family;
    use crate::size_dist::component_sizes;

    #[test]
    fn text_round_trip_is_bitwise() {
        let d = Family::PowerLaw { beta: 3.5, s: 0.3 }.materialize(50).unwrap().with_label("heavy");
        let back = parse_degree_text(&write_degree_text(&d)).unwrap();
        assert_eq!(back.pmf(), d.pmf());
        assert_eq!(back.tail(), d.tail());
        assert_eq!(back.label(), "heavy");
    }

    #[test]
    fn json_round_trip_is_bitwise() {
        let d = Family::Poisson { c: 1.7 }.materialize(40).unwrap();
        let back = parse_degree_json(&write_degree_json(&d)).unwrap();
        assert_eq!(back.pmf(), d.pmf());
        assert_eq!(back.label(), d.label());
        assert!(back.tail().is_none());
    }

    #[test]
    fn text_parsing_fills_gaps_and_normalizes() {
        let d = parse_degree_text("# comment\n1 0.97\n2 0.015\n10 0.015\n").unwrap();
        assert_eq!(d.k_max(), 10);
        assert_eq!(d.prob(5), 0.0);
        let d = parse_degree_text("1 3\n2 1\n").unwrap();
        assert_eq!(d.prob(1), 0.75);
        assert_eq!(d.normalization(), 4.0);
        assert!(matches!(parse_degree_text("1 x\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_degree_text("1 -0.1\n2 1.1\n"), Err(Error::NegativeMass { .. })));
    }

    #[test]
    fn size_json_round_trip() {
        let d = Family::Geometric { p: 0.9 }.materialize(60).unwrap();
        let r = component_sizes(&d, 400).unwrap();
        let rows = parse_sizes_json(&sizes_to_json(&d, &r)).unwrap();
        assert_eq!(rows.len(), 400);
        for (n, w, l) in rows {
            assert_eq!(w, r.w(n));
            assert_eq!(l, r.ln_w(n));
        }
        let csv = sizes_to_csv(&d, &r);
        assert!(csv.starts_with("# compsize component sizes v1\n"));
        assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 401);
    }
}
