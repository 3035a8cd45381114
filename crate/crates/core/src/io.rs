//! Text and JSON formats: matrices, value tables, relations and belt dumps.
//!
//! Matrix text: first line `r`, then `r` rows of `r` integers; lines
//! starting with `#` are comments. Exchange matrices may add a parity line
//! `+: 1 3 ...` listing the `I+` nodes. Nodes are 1-based in every format.

use num_rational::BigRational;
use serde_json::{json, Value};

use crate::cartan::{CartanMatrix, Parity};
use crate::cluster::{ExchangeMatrix, SequenceResult};
use crate::error::{Error, Result};
use crate::exactmath::dump::{rational_function_json, semifield_json};
use crate::exactmath::{format_rational, parse_rational, RationalFunction, Scalar, SemifieldElement};
use crate::table::{FactorList, LatticeVar, ValueTable};
use crate::tsystem::TRelation;
use crate::ysystem::YRelation;

/// Integer rows and the optional `I+` list (0-based).
type Parsed = (Vec<Vec<i64>>, Option<Vec<usize>>);

fn parse_rows(text: &str) -> Result<Parsed> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let r: usize =
        lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?.parse().map_err(|_| Error::Parse("first line must be the size".into()))?;
    let mut rows = Vec::with_capacity(r);
    let mut plus = None;
    for line in lines {
        if let Some(rest) = line.strip_prefix("+:") {
            if plus.is_some() {
                return Err(Error::Parse("repeated parity line".into()));
            }
            let nodes = rest
                .split_whitespace()
                .map(|t| match t.parse::<usize>() {
                    Ok(i) if (1..=r).contains(&i) => Ok(i - 1),
                    _ => Err(Error::Parse(format!("bad node `{t}` in parity line"))),
                })
                .collect::<Result<Vec<_>>>()?;
            plus = Some(nodes);
            continue;
        }
        let row = line.split_whitespace().map(|t| t.parse::<i64>().map_err(|_| Error::Parse(format!("bad integer `{t}`")))).collect::<Result<Vec<_>>>()?;
        if row.len() != r {
            return Err(Error::Parse(format!("row {} has {} entries, expected {r}", rows.len() + 1, row.len())));
        }
        rows.push(row);
    }
    if rows.len() != r {
        return Err(Error::Parse(format!("expected {r} rows, found {}", rows.len())));
    }
    Ok((rows, plus))
}

pub fn parse_cartan(text: &str) -> Result<CartanMatrix> {
    let (rows, plus) = parse_rows(text)?;
    if plus.is_some() {
        return Err(Error::Parse("parity line is only allowed for exchange matrices".into()));
    }
    CartanMatrix::new(rows)
}

pub fn parse_exchange(text: &str) -> Result<ExchangeMatrix> {
    let (rows, plus) = parse_rows(text)?;
    let n = rows.len();
    let e = ExchangeMatrix::new(rows)?;
    match plus {
        Some(nodes) => e.with_parity(Parity::from_plus(n, &nodes)?),
        None => Ok(e),
    }
}

fn rows_text(rows: &[Vec<i64>]) -> String {
    let mut s = format!("{}\n", rows.len());
    for row in rows {
        s.push_str(&row.iter().map(i64::to_string).collect::<Vec<_>>().join(" "));
        s.push('\n');
    }
    s
}

pub fn cartan_text(cm: &CartanMatrix) -> String {
    rows_text(cm.entries())
}

pub fn exchange_text(e: &ExchangeMatrix) -> String {
    let mut s = rows_text(e.entries());
    if let Some(p) = e.parity() {
        let nodes: Vec<String> = p.plus_nodes().iter().map(|i| (i + 1).to_string()).collect();
        s.push_str(&format!("+: {}\n", nodes.join(" ")));
    }
    s
}

fn var_json(v: &LatticeVar) -> Value {
    json!({"a": v.a + 1, "m": v.m, "k": v.k})
}

fn factors_json(f: &FactorList) -> Value {
    Value::Array(f.iter().map(|(v, e)| json!({"a": v.a + 1, "m": v.m, "k": v.k, "exp": e})).collect())
}

/// `[{"tag", "a", "m", "k", "value"}, ...]` sorted by `(a, m, k)`.
pub fn table_json(tag: &str, table: &ValueTable<BigRational>) -> Value {
    Value::Array(table.iter().map(|(v, q)| json!({"tag": tag, "a": v.a + 1, "m": v.m, "k": v.k, "value": format_rational(q)})).collect())
}

/// Reads a table dump; entries tagged other than `tag` are rejected.
pub fn parse_table(tag: &str, v: &Value) -> Result<ValueTable<BigRational>> {
    let bad = |what: String| Error::Parse(format!("table dump: {what}"));
    let arr = v.as_array().ok_or_else(|| bad("array expected".into()))?;
    let mut table = ValueTable::new();
    for (n, e) in arr.iter().enumerate() {
        if let Some(t) = e.get("tag") {
            if t.as_str() != Some(tag) {
                return Err(bad(format!("entry {} has tag {t}, expected \"{tag}\"", n + 1)));
            }
        }
        let int = |key: &str| e.get(key).and_then(Value::as_i64).ok_or_else(|| bad(format!("entry {} lacks integer `{key}`", n + 1)));
        let a = int("a")?;
        if a < 1 {
            return Err(bad(format!("entry {} has node {a}", n + 1)));
        }
        let value = e.get("value").and_then(Value::as_str).ok_or_else(|| bad(format!("entry {} lacks `value`", n + 1)))?;
        let var = LatticeVar::new(a as usize - 1, int("m")?, int("k")?);
        if table.insert(var, parse_rational(value)?).is_some() {
            return Err(bad(format!("duplicate entry for {var}")));
        }
    }
    Ok(table)
}

pub fn t_relation_json(rel: &TRelation) -> Value {
    json!({
        "center": var_json(&rel.center),
        "lhs": rel.lhs.iter().map(var_json).collect::<Vec<_>>(),
        "termA": factors_json(&rel.term_a),
        "termM": factors_json(&rel.term_m),
    })
}

pub fn y_relation_json(rel: &YRelation) -> Value {
    json!({
        "center": var_json(&rel.center),
        "lhs": rel.lhs.iter().map(var_json).collect::<Vec<_>>(),
        "numerator": factors_json(&rel.numerator),
        "denominator": factors_json(&rel.denominator),
    })
}

/// Per-variable value of a belt entry.
pub trait DumpValue {
    fn dump(&self, nvars: usize) -> Value;
}

impl DumpValue for RationalFunction {
    fn dump(&self, nvars: usize) -> Value {
        rational_function_json(self, nvars)
    }
}

impl DumpValue for SemifieldElement {
    fn dump(&self, nvars: usize) -> Value {
        semifield_json(self, nvars)
    }
}

impl DumpValue for BigRational {
    fn dump(&self, _: usize) -> Value {
        Value::String(self.render())
    }
}

/// Belt dump with entries keyed by 1-based `(i, u)`.
pub fn sequence_json<X: DumpValue, Y: DumpValue>(seq: &SequenceResult<X, Y>) -> Value {
    let n = seq.matrix.size();
    let entries = |get: &dyn Fn(usize, i64) -> Option<Value>| -> Vec<Value> {
        let mut out = Vec::new();
        for u in seq.u_min..=seq.u_max {
            for i in 0..n {
                if let Some(v) = get(i, u) {
                    out.push(json!({"i": i + 1, "u": u, "value": v}));
                }
            }
        }
        out
    };
    json!({
        "u_min": seq.u_min,
        "u_max": seq.u_max,
        "matrix": seq.matrix.entries(),
        "x": entries(&|i, u| seq.x.get(&(i, u)).map(|x| x.dump(n))),
        "y": entries(&|i, u| seq.y.get(&(i, u)).map(|y| y.dump(n))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{run_sequence, symbolic_seed};
    use crate::exactmath::dump::parse_rational_function;

    #[test]
    fn cartan_text_roundtrip() {
        let text = "# example\n4\n2 -1 0 0\n-3 2 -2 -2\n# middle comment\n0 -1 2 -1\n0 -1 -1 2\n";
        let cm = parse_cartan(text).unwrap();
        assert_eq!(cm.symmetrizer(), &[3, 1, 2, 2]);
        assert_eq!(parse_cartan(&cartan_text(&cm)).unwrap(), cm);
    }

    #[test]
    fn exchange_text_with_parity() {
        let e = parse_exchange("3\n0 1 0\n-1 0 -1\n0 1 0\n+: 1 3\n").unwrap();
        assert_eq!(e.parity().unwrap().plus_nodes(), vec![0, 2]);
        assert!(e.check_b2().unwrap());
        assert_eq!(parse_exchange(&exchange_text(&e)).unwrap(), e);
        assert!(parse_exchange("2\n0 1\n-1 0\n").unwrap().parity().is_none());
    }

    #[test]
    fn malformed_input() {
        for bad in ["", "x\n", "2\n2 -1\n", "2\n2 -1 0\n-1 2\n", "2\n2 a\n-1 2\n"] {
            assert!(matches!(parse_cartan(bad), Err(Error::Parse(_))), "{bad:?}");
        }
        assert!(matches!(parse_cartan("2\n2 -1\n-1 2\n+: 1\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_exchange("2\n0 1\n-1 0\n+: 3\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_exchange("2\n0 1\n1 0\n"), Err(Error::NotSkewSymmetrizable(_))));
    }

    #[test]
    fn table_roundtrip() {
        let mut t = ValueTable::new();
        t.insert(LatticeVar::new(0, 1, -2), BigRational::new(3.into(), 4.into()));
        t.insert(LatticeVar::new(1, 2, 5), BigRational::from_integer((-7).into()));
        let v = table_json("T", &t);
        assert_eq!(v[0], json!({"tag": "T", "a": 1, "m": 1, "k": -2, "value": "3/4"}));
        assert_eq!(parse_table("T", &v).unwrap(), t);
        assert!(parse_table("Y", &v).is_err());
        let dup = json!([{"a": 1, "m": 1, "k": 0, "value": "1"}, {"a": 1, "m": 1, "k": 0, "value": "2"}]);
        assert!(parse_table("T", &dup).is_err());
    }

    #[test]
    fn sequence_dump_is_keyed_by_node_and_time() {
        let cm = CartanMatrix::type_a(2);
        let b = crate::cluster::b_of_c(&cm, &cm.bipartition().unwrap()).unwrap();
        let seq = run_sequence(&symbolic_seed(b), 0, 2).unwrap();
        let v = sequence_json(&seq);
        let first = &v["x"][2];
        assert_eq!((first["i"].clone(), first["u"].clone()), (json!(1), json!(1)));
        let back = parse_rational_function(&first["value"]).unwrap();
        assert!(back.eq_exact(seq.x_at(0, 1).unwrap()));
        assert_eq!(v["y"].as_array().unwrap().len(), 6);
    }
}
