//! Browser bindings: each export takes matrix text and returns a JSON string.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tysys_core::cluster::{check_tb, check_yb, numeric_seed, parity_lemmas, run_sequence};
use tysys_core::io::{parse_cartan, parse_exchange};
use tysys_core::period::detect;
use tysys_core::table::{Policy, SystemKind, Window};
use tysys_core::ysystem::propagate_y;
use tysys_core::{Result, ValueTable};
use wasm_bindgen::prelude::*;

fn to_js(r: Result<Value>) -> std::result::Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

fn log2_abs(q: &BigRational) -> f64 {
    // shift each side down to 60 bits first so huge values stay finite
    let log2 = |x: &BigInt| {
        let s = x.bits().saturating_sub(60);
        (x >> s as usize).to_f64().unwrap_or(f64::NAN).log2() + s as f64
    };
    log2(&q.numer().abs()) - log2(q.denom())
}

/// Classification of a Cartan matrix.
pub fn classify_json(text: &str) -> Result<Value> {
    let cm = parse_cartan(text)?;
    let one_based = |v: Vec<usize>| v.into_iter().map(|i| i + 1).collect::<Vec<_>>();
    let parity = cm.bipartition();
    Ok(json!({
        "rank": cm.rank(),
        "d": cm.symmetrizer(),
        "t": cm.t(),
        "t_a": cm.t_all(),
        "tamely_laced": cm.is_tamely_laced(),
        "simply_laced": cm.is_simply_laced(),
        "connected": cm.is_connected(),
        "plus_nodes": parity.as_ref().map(|p| one_based(p.plus_nodes())),
    }))
}

/// Orbits stop growing their window once an entry passes this many bits;
/// off finite type the sizes grow doubly exponentially.
const BIT_BUDGET: u64 = 1024;

/// A random restricted Y-orbit: `log2 |Y|` per row `(a, m)` and slice, and
/// the detected period. The window widens one slice at a time up to `slices`
/// and stops early at the bit budget.
pub fn y_orbit_json(text: &str, level: i64, slices: i64, seed: u64) -> Result<Value> {
    let cm = parse_cartan(text)?;
    let kind = SystemKind::Restricted { level };
    let mut k_max = 2 * cm.max_d() - 1;
    let (window, y) = loop {
        let window = Window::new(0, k_max)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y: ValueTable<BigRational> = propagate_y(&cm, kind, window, &ValueTable::new(), &mut rng, Policy::default())?;
        let bits = y.iter().map(|(_, q)| q.numer().bits() + q.denom().bits()).max().unwrap_or(0);
        if k_max + 1 >= slices || bits > BIT_BUDGET {
            break (window, y);
        }
        k_max += 1;
    };
    let max_period = window.width() - 2 * cm.max_d();
    let scan = detect(&cm, kind, window, &y, max_period.max(1));
    let mut rows = Vec::new();
    for a in 0..cm.rank() {
        for m in 1..=kind.max_level(&cm, a) {
            let cells: Vec<Value> = window
                .slices()
                .map(|k| match y.get(&tysys_core::LatticeVar::new(a, m, k)) {
                    Some(q) => json!(log2_abs(q)),
                    None => Value::Null,
                })
                .collect();
            rows.push(json!({"a": a + 1, "m": m, "cells": cells}));
        }
    }
    let twisted = scan.twisted_period.map(|(shift, perm)| json!({"shift": shift, "permutation": perm.iter().map(|i| i + 1).collect::<Vec<_>>()}));
    Ok(
        json!({"k_min": window.k_min, "k_max": window.k_max, "rows": rows, "period": scan.period, "twisted_period": twisted, "truncated": window.width() < slices}),
    )
}

/// The belt on random positive numbers: `log2 x_i(u)` and the checks. Like
/// the orbit, it stops early at the bit budget.
pub fn belt_json(text: &str, steps: i64, seed: u64) -> Result<Value> {
    let matrix = parse_exchange(text)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = numeric_seed(matrix, &mut rng, 8);
    let mut u_max = 1;
    let seq = loop {
        let seq = run_sequence(&start, 0, u_max)?;
        let bits = (0..seq.matrix.size()).filter_map(|i| seq.x_at(i, u_max).ok()).map(|q| q.numer().bits() + q.denom().bits()).max().unwrap_or(0);
        if u_max >= steps || bits > BIT_BUDGET {
            break seq;
        }
        u_max += 1;
    };
    let mut report = parity_lemmas(&seq)?;
    report.merge(check_tb(&seq)?);
    report.merge(check_yb(&seq, 1)?);
    report.merge(check_yb(&seq, -1)?);
    let rows: Vec<Value> = (0..seq.matrix.size())
        .map(|i| {
            let cells: Vec<f64> = (seq.u_min..=seq.u_max).map(|u| seq.x_at(i, u).map(log2_abs).unwrap_or(f64::NAN)).collect();
            json!({"i": i + 1, "cells": cells})
        })
        .collect();
    Ok(
        json!({"u_max": seq.u_max, "truncated": seq.u_max < steps, "rows": rows, "pass": report.pass, "checked": report.checked, "violations": report.violations}),
    )
}

#[wasm_bindgen]
pub fn classify(text: &str) -> std::result::Result<String, JsError> {
    to_js(classify_json(text))
}

#[wasm_bindgen]
pub fn y_orbit(text: &str, level: i32, slices: i32, seed: u32) -> std::result::Result<String, JsError> {
    to_js(y_orbit_json(text, level as i64, slices as i64, seed as u64))
}

#[wasm_bindgen]
pub fn belt(text: &str, steps: i32, seed: u32) -> std::result::Result<String, JsError> {
    to_js(belt_json(text, steps as i64, seed as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_example() {
        let v = classify_json("4\n2 -1 0 0\n-3 2 -2 -2\n0 -1 2 -1\n0 -1 -1 2\n").unwrap();
        assert_eq!(v["d"], json!([3, 1, 2, 2]));
        assert_eq!(v["t"], 6);
    }

    #[test]
    fn a2_orbit_has_period_ten() {
        let v = y_orbit_json("2\n2 -1\n-1 2\n", 2, 24, 1).unwrap();
        assert_eq!(v["period"], 10);
        assert_eq!(v["twisted_period"], json!({"shift": 5, "permutation": [2, 1]}));
        assert_eq!(v["rows"].as_array().unwrap().len(), 2);
        assert_eq!(v["rows"][0]["cells"].as_array().unwrap().len(), 24);
    }

    #[test]
    fn wild_orbit_stops_at_the_budget() {
        let v = y_orbit_json("4\n2 -1 0 0\n-3 2 -2 -2\n0 -1 2 -1\n0 -1 -1 2\n", 2, 40, 0).unwrap();
        assert_eq!(v["truncated"], true);
        assert!(v["k_max"].as_i64().unwrap() < 39);
        let a2 = y_orbit_json("2\n2 -1\n-1 2\n", 2, 40, 0).unwrap();
        assert_eq!((a2["truncated"].clone(), a2["k_max"].clone()), (json!(false), json!(39)));
    }

    #[test]
    fn belt_checks_pass() {
        let v = belt_json("2\n0 1\n-1 0\n+: 1\n", 10, 3).unwrap();
        assert_eq!(v["pass"], true);
        assert_eq!(v["rows"][0]["cells"].as_array().unwrap().len(), 11);
        assert_eq!(v["truncated"], false);
        let seven = "7\n0 -2 2 0 0 0 0\n2 0 0 -1 -1 -1 -1\n-2 0 0 1 1 1 1\n0 1 -1 0 0 0 0\n0 1 -1 0 0 0 0\n0 1 -1 0 0 0 0\n0 1 -1 0 0 0 0\n+: 2 3\n";
        let w = belt_json(seven, 40, 0).unwrap();
        assert_eq!((w["truncated"].clone(), w["pass"].clone()), (json!(true), json!(true)));
    }

    #[test]
    fn log_scale_survives_huge_values() {
        let big = BigRational::new(BigInt::from(3).pow(2000), 7.into());
        let l = log2_abs(&big);
        assert!((l - (2000.0 * 3f64.log2() - 7f64.log2())).abs() < 1e-6);
        assert_eq!(log2_abs(&BigRational::new((-8).into(), 1.into())), 3.0);
    }

    #[test]
    fn bad_input_is_an_error() {
        assert!(classify_json("2\n2 -1\n").is_err());
        assert!(belt_json("2\n0 1\n-1 0\n", 3, 0).is_err());
    }
}
