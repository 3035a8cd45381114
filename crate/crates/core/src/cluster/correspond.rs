//! Restricted T-systems of simply laced matrices as belts of `B(C)` or of
//! the square product with a type A ladder.

use std::collections::BTreeMap;

use serde_json::json;

use super::belt::{in_class, run_sequence, symbolic_seed};
use super::{b_of_c, square_product, ExchangeMatrix};
use crate::cartan::CartanMatrix;
use crate::error::{Error, Result};
use crate::exactmath::{RationalFunction, Scalar};
use crate::report::Report;
use crate::table::{FactorList, LatticeVar, SystemKind, Window};
use crate::tsystem::{enumerate_relations, t_relation, TRelation};

/// Checks that the level-`level` restricted T-system of `cm` is the
/// `T(B)` system of the matching exchange matrix, on both parity classes,
/// and that the belt pulled back solves it. Nonbipartite input goes through
/// the bipartite double first.
pub fn correspondence_check(cm: &CartanMatrix, level: i64, steps: i64) -> Result<Report> {
    if !cm.is_simply_laced() {
        return Err(Error::NotSimplyLaced);
    }
    SystemKind::Restricted { level }.validate()?;
    let window = Window::new(-steps, steps)?;
    let config = json!({"level": level, "steps": steps});
    if cm.bipartition().is_some() {
        return Ok(bipartite_check(cm, level, window)?.with_config(config));
    }
    let (double, map) = cm.bipartite_double()?;
    let mut report = Report::new();
    let kind = SystemKind::Restricted { level };
    let relations = enumerate_relations(cm, kind, window)?;
    for rel in &relations {
        let (a, m, u) = (rel.center.a, rel.center.m, rel.center.k);
        let s_plus = (m + u).rem_euclid(2) == 0;
        let here = |v: LatticeVar, plus: bool| LatticeVar::new(if plus { map[v.a].0 } else { map[v.a].1 }, v.m, v.k);
        let image = TRelation {
            center: here(rel.center, s_plus),
            lhs: rel.lhs.map(|v| here(v, s_plus)),
            term_a: sorted(rel.term_a.iter().map(|&(v, e)| (here(v, s_plus), e)).collect()),
            term_m: sorted(rel.term_m.iter().map(|&(v, e)| (here(v, !s_plus), e)).collect()),
        };
        let target = t_relation(&double, kind, image.center.a, m, u)?;
        let same = image.lhs == target.lhs && image.term_a == sorted(target.term_a.clone()) && image.term_m == sorted(target.term_m.clone());
        report.record(same, || format!("double image of {}", describe(a, m, u)), || format!("{image:?}"), || format!("{target:?}"));
    }
    let doubled = enumerate_relations(&double, kind, window)?;
    let odd = doubled.iter().filter(|r| class_of(&double, r.center).is_ok_and(|c| c == -1)).count();
    report.record(odd == relations.len(), || "relation count".into(), || relations.len().to_string(), || odd.to_string());
    report.merge(bipartite_check(&double, level, window)?.labelled("double"));
    Ok(report.with_config(config))
}

fn describe(a: usize, m: i64, u: i64) -> String {
    format!("T-relation at ({}, {m}, {u})", a + 1)
}

fn sorted(mut f: FactorList) -> FactorList {
    f.sort();
    f
}

fn class_of(cm: &CartanMatrix, v: LatticeVar) -> Result<i64> {
    let parity = cm.bipartition().ok_or(Error::NotBipartite)?;
    let flip = if (v.m + 1 + v.k).rem_euclid(2) == 0 { 1 } else { -1 };
    Ok(parity.sign(v.a) * flip)
}

/// The exchange matrix for `cm` at `level`, with the node of `(a, m)`.
fn exchange_for(cm: &CartanMatrix, level: i64) -> Result<(ExchangeMatrix, impl Fn(usize, i64) -> usize)> {
    let parity = cm.bipartition().ok_or(Error::NotBipartite)?;
    let rungs = (level - 1) as usize;
    let b = if level == 2 {
        b_of_c(cm, &parity)?
    } else {
        let ladder = CartanMatrix::type_a(rungs);
        square_product(cm, &parity, &ladder, &ladder.bipartition().ok_or(Error::NotBipartite)?)?
    };
    Ok((b, move |a: usize, m: i64| a * rungs + (m - 1) as usize))
}

fn bipartite_check(cm: &CartanMatrix, level: i64, window: Window) -> Result<Report> {
    let kind = SystemKind::Restricted { level };
    let (b, node) = exchange_for(cm, level)?;
    let relations = enumerate_relations(cm, kind, window)?;
    let mut report = Report::new();

    // relation level: the two monomials of each side agree as an unordered pair
    let n = b.size();
    for rel in &relations {
        let c = rel.center;
        let i = node(c.a, c.m);
        let to_b = |f: &FactorList| sorted(f.iter().map(|&(v, e)| (LatticeVar::new(node(v.a, v.m), 0, v.k), e)).collect());
        let (ta, tm) = (to_b(&rel.term_a), to_b(&rel.term_m));
        let side = |positive: bool| {
            sorted(
                (0..n)
                    .filter(|&j| if positive { b.entry(j, i) > 0 } else { b.entry(j, i) < 0 })
                    .map(|j| (LatticeVar::new(j, 0, c.k), b.entry(j, i).unsigned_abs() as u32))
                    .collect(),
            )
        };
        let (pos, neg) = (side(true), side(false));
        let same = (ta == pos && tm == neg) || (ta == neg && tm == pos);
        let lhs_ok = rel.lhs == [c.shifted(-1), c.shifted(1)];
        report.record(same && lhs_ok, || describe(c.a, c.m, c.k), || format!("{ta:?} + {tm:?}"), || format!("{pos:?} + {neg:?}"));
        let class = class_of(cm, c)?;
        report.record(
            in_class(&b, i, c.k, class)?,
            || format!("class of {}", describe(c.a, c.m, c.k)),
            || class.to_string(),
            || "mismatched node class".into(),
        );
    }

    // value level: pull the belt back on each class and solve the relations centred on the other
    let seq = run_sequence(&symbolic_seed(b.clone()), window.k_min, window.k_max)?;
    for eps in [1, -1] {
        let mut table: BTreeMap<LatticeVar, RationalFunction> = BTreeMap::new();
        for a in 0..cm.rank() {
            for m in 1..level {
                for u in window.slices() {
                    let v = LatticeVar::new(a, m, u);
                    if class_of(cm, v)? == eps {
                        table.insert(v, seq.x_at(node(a, m), u)?.clone());
                    }
                }
            }
        }
        for rel in relations.iter().filter(|r| class_of(cm, r.center).is_ok_and(|c| c == -eps)) {
            let value = |f: &FactorList| -> Result<RationalFunction> {
                f.iter().try_fold(RationalFunction::one(), |acc, (v, e)| Ok(acc.mul(&table.get(v).ok_or(Error::MissingValue(*v))?.pow(*e))))
            };
            let lhs = table[&rel.lhs[0]].mul(&table[&rel.lhs[1]]);
            let rhs = value(&rel.term_a)?.add(&value(&rel.term_m)?);
            let c = rel.center;
            report.record(lhs.eq_exact(&rhs), || format!("pulled back {} (class {eps})", describe(c.a, c.m, c.k)), || lhs.render(), || rhs.render());
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a3_at_level_two() {
        let r = correspondence_check(&CartanMatrix::type_a(3), 2, 4).unwrap();
        assert!(r.pass && r.checked > 0, "{:?}", r.violations);
    }

    #[test]
    fn a2_at_level_three() {
        let r = correspondence_check(&CartanMatrix::type_a(2), 3, 4).unwrap();
        assert!(r.pass && r.checked > 0, "{:?}", r.violations);
    }

    #[test]
    fn three_cycle_through_the_double() {
        let c = CartanMatrix::new(vec![vec![2, -1, -1], vec![-1, 2, -1], vec![-1, -1, 2]]).unwrap();
        let r = correspondence_check(&c, 2, 3).unwrap();
        assert!(r.pass && r.checked > 0, "{:?}", r.violations);
    }

    #[test]
    fn rejects_non_simply_laced() {
        let c = CartanMatrix::new(vec![vec![2, -1], vec![-2, 2]]).unwrap();
        assert_eq!(correspondence_check(&c, 2, 3).unwrap_err(), Error::NotSimplyLaced);
    }
}
