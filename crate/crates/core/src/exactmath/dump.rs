//! Expression JSON: `{"num": [["p/q", [e1, e2, ...]], ...], "den": [...], "vars": [...]}`.
//! Exponent lists are dense over `vars`.

use serde_json::{json, Value};

use super::poly::{LaurentPoly, Monomial};
use super::{format_rational, parse_rational, RationalFunction, SemifieldElement};
use crate::error::{Error, Result};

fn terms_json(p: &LaurentPoly, nvars: usize) -> Value {
    Value::Array(
        p.terms()
            .map(|(m, c)| {
                let exps: Vec<i32> = (0..nvars).map(|i| m.exp(i)).collect();
                json!([format_rational(c), exps])
            })
            .collect(),
    )
}

/// Dumps a quotient with generators named `{prefix}1, {prefix}2, ...`.
pub fn quotient_json(num: &LaurentPoly, den: &LaurentPoly, prefix: &str, nvars: usize) -> Value {
    let nvars = nvars.max(num.num_vars()).max(den.num_vars());
    let vars: Vec<String> = (1..=nvars).map(|i| format!("{prefix}{i}")).collect();
    json!({
        "num": terms_json(num, nvars),
        "den": terms_json(den, nvars),
        "vars": vars,
    })
}

pub fn rational_function_json(f: &RationalFunction, nvars: usize) -> Value {
    quotient_json(f.num(), f.den(), "x", nvars)
}

pub fn semifield_json(e: &SemifieldElement, nvars: usize) -> Value {
    quotient_json(e.num(), e.den(), "y", nvars)
}

fn parse_terms(v: &Value) -> Result<LaurentPoly> {
    let bad = |what: &str| Error::Parse(format!("expression dump: {what}"));
    let arr = v.as_array().ok_or_else(|| bad("term list expected"))?;
    let mut terms = Vec::with_capacity(arr.len());
    for t in arr {
        let pair = t.as_array().filter(|p| p.len() == 2).ok_or_else(|| bad("[coeff, exps] expected"))?;
        let c = parse_rational(pair[0].as_str().ok_or_else(|| bad("coefficient string expected"))?)?;
        let exps = pair[1]
            .as_array()
            .ok_or_else(|| bad("exponent list expected"))?
            .iter()
            .map(|e| e.as_i64().map(|e| e as i32).ok_or_else(|| bad("integer exponent expected")))
            .collect::<Result<Vec<_>>>()?;
        terms.push((Monomial::new(exps), c));
    }
    Ok(LaurentPoly::from_terms(terms))
}

/// Numerator and denominator of a dumped quotient.
pub fn parse_quotient(v: &Value) -> Result<(LaurentPoly, LaurentPoly)> {
    let num = parse_terms(&v["num"])?;
    let den = parse_terms(&v["den"])?;
    Ok((num, den))
}

pub fn parse_rational_function(v: &Value) -> Result<RationalFunction> {
    let (num, den) = parse_quotient(v)?;
    RationalFunction::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_roundtrip() {
        let f = RationalFunction::var(1).add(&RationalFunction::one()).div(&RationalFunction::var(0)).unwrap();
        let v = rational_function_json(&f, 2);
        assert_eq!(v["vars"], json!(["x1", "x2"]));
        assert_eq!(v["den"], json!([["1/1", [0, 0]]]));
        assert_eq!(v["num"].as_array().unwrap().len(), 2);
        let back = parse_rational_function(&v).unwrap();
        assert!(back.eq_exact(&f));
    }

    #[test]
    fn semifield_uses_y_names() {
        let e = SemifieldElement::var(0).one_plus();
        let v = semifield_json(&e, 1);
        assert_eq!(v["vars"], json!(["y1"]));
        assert_eq!(v["den"], json!([["1/1", [0]]]));
    }
}
