//! Seeds, the bipartite belt `... μ- (B) μ+ (-B) μ- ...` and the checks on
//! the families it produces.

use std::collections::BTreeMap;

use num_rational::BigRational;
use rand::Rng;

use super::{mutate_matrix, ExchangeMatrix};
use crate::error::{Error, Result};
use crate::exactmath::{random_positive_rational, RationalFunction, Scalar, SemifieldElement};
use crate::report::Report;

/// Exchange matrix, cluster `x` and coefficient tuple `y`.
#[derive(Clone, Debug)]
pub struct Seed<X, Y> {
    pub matrix: ExchangeMatrix,
    pub x: Vec<X>,
    pub y: Vec<Y>,
}

/// The initial seed with generators `x_i` and `y_i`.
pub fn symbolic_seed(matrix: ExchangeMatrix) -> Seed<RationalFunction, SemifieldElement> {
    let n = matrix.size();
    Seed { matrix, x: (0..n).map(RationalFunction::var).collect(), y: (0..n).map(SemifieldElement::var).collect() }
}

/// A seed with random positive rationals in place of the generators.
pub fn numeric_seed<R: Rng + ?Sized>(matrix: ExchangeMatrix, rng: &mut R, bits: u32) -> Seed<BigRational, BigRational> {
    let n = matrix.size();
    let x = (0..n).map(|_| random_positive_rational(rng, bits)).collect();
    let y = (0..n).map(|_| random_positive_rational(rng, bits)).collect();
    Seed { matrix, x, y }
}

/// Largest `growth_bits * rank` that still runs exactly within seconds.
const GROWTH_LIMIT: u64 = 180;

/// Largest bit size of a value when the belt runs with every generator set
/// to 2. It grows with the degree of the symbolic expressions, so it is a
/// cheap predictor of their size.
pub fn growth_bits(matrix: &ExchangeMatrix, u_min: i64, u_max: i64) -> Result<u64> {
    let two = || BigRational::from_integer(2.into());
    let n = matrix.size();
    let seed = Seed { matrix: matrix.clone(), x: vec![two(); n], y: vec![two(); n] };
    let seq = run_sequence(&seed, u_min, u_max)?;
    let bits = |q: &BigRational| q.numer().bits() + q.denom().bits();
    Ok(seq.x.values().chain(seq.y.values()).map(bits).max().unwrap_or(0))
}

/// Whether a belt should run on numbers instead of symbols.
pub fn prefers_numeric(matrix: &ExchangeMatrix, u_min: i64, u_max: i64) -> Result<bool> {
    Ok(matrix.size() > 10 || growth_bits(matrix, u_min, u_max)? * matrix.size() as u64 > GROWTH_LIMIT)
}

fn signed_product<V: Scalar>(pairs: impl Iterator<Item = (i64, V)>, positive: bool) -> V {
    pairs.filter(|(e, _)| if positive { *e > 0 } else { *e < 0 }).fold(V::one(), |acc, (e, v)| acc.mul(&v.pow(e.unsigned_abs() as u32)))
}

/// Mutation at `k` of matrix, cluster and coefficients.
pub fn mutate_seed<X: Scalar, Y: Scalar>(seed: &Seed<X, Y>, k: usize) -> Result<Seed<X, Y>> {
    let n = seed.matrix.size();
    if k >= n {
        return Err(Error::IndexOutOfRange(k));
    }
    let b = &seed.matrix;
    let column = || (0..n).map(|j| (b.entry(j, k), seed.x[j].clone()));
    let exchange = signed_product(column(), true).add(&signed_product(column(), false));
    let mut x = seed.x.clone();
    x[k] = exchange.mul(&seed.x[k].try_inv().ok_or(Error::InverseOfZero)?);

    let yk = &seed.y[k];
    let yk_inv = yk.try_inv().ok_or(Error::InverseOfZero)?;
    let mut y = seed.y.clone();
    for (i, yi) in y.iter_mut().enumerate() {
        let bki = b.entry(k, i);
        if i == k {
            *yi = yk_inv.clone();
        } else if bki > 0 {
            let f = yk_inv.one_plus().pow(bki as u32).try_inv().ok_or(Error::InverseOfZero)?;
            *yi = yi.mul(&f);
        } else if bki < 0 {
            *yi = yi.mul(&yk.one_plus().pow(bki.unsigned_abs() as u32));
        }
    }
    Ok(Seed { matrix: mutate_matrix(b, k)?, x, y })
}

/// `x_i(u)` and `y_i(u)` on `u_min..=u_max`, keyed by `(i, u)`.
#[derive(Clone, Debug)]
pub struct SequenceResult<X, Y> {
    pub matrix: ExchangeMatrix,
    pub u_min: i64,
    pub u_max: i64,
    pub x: BTreeMap<(usize, i64), X>,
    pub y: BTreeMap<(usize, i64), Y>,
}

impl<X, Y> SequenceResult<X, Y> {
    pub fn x_at(&self, i: usize, u: i64) -> Result<&X> {
        self.x.get(&(i, u)).ok_or(Error::MissingEntry(i, u))
    }

    pub fn y_at(&self, i: usize, u: i64) -> Result<&Y> {
        self.y.get(&(i, u)).ok_or(Error::MissingEntry(i, u))
    }
}

/// Runs the belt from `seed` at `u = 0`: between `u` and `u + 1` the
/// composed mutation over `I+` if `u` is even, over `I-` if odd.
pub fn run_sequence<X: Scalar, Y: Scalar>(seed: &Seed<X, Y>, u_min: i64, u_max: i64) -> Result<SequenceResult<X, Y>> {
    if u_min > 0 || u_max < 0 {
        return Err(Error::EmptyWindow);
    }
    let parity = seed.matrix.require_belt_conditions()?.clone();
    let n = seed.matrix.size();
    let step = |s: &Seed<X, Y>, between: i64| -> Result<Seed<X, Y>> {
        let nodes = if between.rem_euclid(2) == 0 { parity.plus_nodes() } else { parity.minus_nodes() };
        nodes.into_iter().try_fold(s.clone(), |acc, k| mutate_seed(&acc, k))
    };
    let mut out = SequenceResult { matrix: seed.matrix.clone(), u_min, u_max, x: BTreeMap::new(), y: BTreeMap::new() };
    let mut record = |s: &Seed<X, Y>, u: i64| {
        for i in 0..n {
            out.x.insert((i, u), s.x[i].clone());
            out.y.insert((i, u), s.y[i].clone());
        }
    };
    record(seed, 0);
    let mut s = seed.clone();
    for u in 0..u_max {
        s = step(&s, u)?;
        record(&s, u + 1);
    }
    let mut s = seed.clone();
    for u in (u_min..0).rev() {
        s = step(&s, u)?;
        record(&s, u);
    }
    Ok(out)
}

/// `(i, u)` lies in the class `P_ε`: `sign(i) (-1)^u = ε`.
pub fn in_class(matrix: &ExchangeMatrix, i: usize, u: i64, eps: i64) -> Result<bool> {
    let parity = matrix.require_parity()?;
    let flip = if u.rem_euclid(2) == 0 { 1 } else { -1 };
    Ok(parity.sign(i) * flip == eps)
}

/// On `P+`: `x_i(u) = x_i(u-1)` and `y_i(u) = y_i(u+1)^{-1}`; on `P-` the
/// mirror statements.
pub fn parity_lemmas<X: Scalar, Y: Scalar>(seq: &SequenceResult<X, Y>) -> Result<Report> {
    let mut report = Report::new();
    for (&(i, u), x) in &seq.x {
        let dir = if in_class(&seq.matrix, i, u, 1)? { 1 } else { -1 };
        if let Some(other) = seq.x.get(&(i, u - dir)) {
            report.record(x.same(other), || format!("x-lemma at ({}, {u})", i + 1), || x.render(), || other.render());
        }
        let y = seq.y_at(i, u)?;
        if let Some(other) = seq.y.get(&(i, u + dir)) {
            let prod = y.mul(other);
            report.record(prod.same(&Y::one()), || format!("y-lemma at ({}, {u})", i + 1), || y.render(), || other.render());
        }
    }
    Ok(report)
}

/// `T_i(u-1) T_i(u+1) = ∏_{B_ji>0} T_j(u)^{B_ji} + ∏_{B_ji<0} T_j(u)^{-B_ji}`
/// at every centre whose neighbours are present.
pub fn tb_report<X: Scalar>(matrix: &ExchangeMatrix, t: &BTreeMap<(usize, i64), X>) -> Result<Report> {
    let n = matrix.size();
    let mut report = Report::new();
    for &(i, u) in t.keys() {
        let (Some(lo), Some(hi)) = (t.get(&(i, u - 1)), t.get(&(i, u + 1))) else { continue };
        let Ok(column) = (0..n).map(|j| Ok((matrix.entry(j, i), t.get(&(j, u)).ok_or(Error::MissingEntry(j, u))?.clone()))).collect::<Result<Vec<_>>>() else {
            continue;
        };
        let lhs = lo.mul(hi);
        let rhs = signed_product(column.iter().cloned(), true).add(&signed_product(column.into_iter(), false));
        report.record(lhs.same(&rhs), || format!("T(B) at ({}, {u})", i + 1), || lhs.render(), || rhs.render());
    }
    Ok(report)
}

pub fn check_tb<X: Scalar, Y>(seq: &SequenceResult<X, Y>) -> Result<Report> {
    tb_report(&seq.matrix, &seq.x)
}

/// `Y_i(u-1) Y_i(u+1) = ∏_{σB_ji>0} (1+Y_j(u))^{σB_ji} / ∏_{σB_ji<0} (1+Y_j(u)^{-1})^{-σB_ji}`
/// with `σ = ε sign(i)`, at centres in `P_{-ε}`.
pub fn yb_report<Y: Scalar>(matrix: &ExchangeMatrix, y: &BTreeMap<(usize, i64), Y>, eps: i64) -> Result<Report> {
    let parity = matrix.require_parity()?;
    let n = matrix.size();
    let mut report = Report::new();
    let mut centres: Vec<(usize, i64)> = y.keys().map(|&(i, u)| (i, u)).collect();
    centres.sort();
    for (i, u) in centres {
        if !in_class(matrix, i, u, -eps)? {
            continue;
        }
        let (Some(lo), Some(hi)) = (y.get(&(i, u - 1)), y.get(&(i, u + 1))) else { continue };
        let sigma = eps * parity.sign(i);
        let mut rhs = Y::one();
        let mut complete = true;
        for j in 0..n {
            let e = sigma * matrix.entry(j, i);
            if e == 0 {
                continue;
            }
            let Some(yj) = y.get(&(j, u)) else {
                complete = false;
                break;
            };
            if e > 0 {
                rhs = rhs.mul(&yj.one_plus().pow(e as u32));
            } else {
                let inv = yj.try_inv().ok_or(Error::InverseOfZero)?;
                rhs = rhs.mul(&inv.one_plus().pow(e.unsigned_abs() as u32).try_inv().ok_or(Error::InverseOfZero)?);
            }
        }
        if !complete {
            continue;
        }
        let lhs = lo.mul(hi);
        let label = if eps > 0 { "Y+(B)" } else { "Y-(B)" };
        report.record(lhs.same(&rhs), || format!("{label} at ({}, {u})", i + 1), || lhs.render(), || rhs.render());
    }
    Ok(report)
}

pub fn check_yb<X, Y: Scalar>(seq: &SequenceResult<X, Y>, eps: i64) -> Result<Report> {
    yb_report(&seq.matrix, &seq.y, eps)
}

/// Values keyed by node and belt time.
pub type NodeTable<X> = BTreeMap<(usize, i64), X>;

/// From a `T(B)` solution read on `P_ε`, builds `Y_i(u) = ∏_j T_j(u)^{σB_ji}`
/// with `σ = -ε sign(i)` at every `(i, u)` of `P_{-ε}`, checks both
/// expressions for `1 + Y` and `1 + Y^{-1}`, and that `Y` solves the
/// Y-system on `P_{-ε}`.
pub fn t_to_y_b<X: Scalar>(matrix: &ExchangeMatrix, t: &NodeTable<X>, eps: i64) -> Result<(NodeTable<X>, Report)> {
    let parity = matrix.require_parity()?;
    let n = matrix.size();
    let mut out = BTreeMap::new();
    let mut report = Report::new();
    for &(i, u) in t.keys() {
        if !in_class(matrix, i, u, -eps)? {
            continue;
        }
        let sigma = -eps * parity.sign(i);
        let Ok(column) = (0..n)
            .filter(|&j| matrix.entry(j, i) != 0)
            .map(|j| Ok((sigma * matrix.entry(j, i), t.get(&(j, u)).ok_or(Error::MissingEntry(j, u))?.clone())))
            .collect::<Result<Vec<_>>>()
        else {
            continue;
        };
        let num = signed_product(column.iter().cloned(), true);
        let den = signed_product(column.iter().cloned(), false);
        let den_inv = den.try_inv().ok_or(Error::MissingEntry(i, u))?;
        let num_inv = num.try_inv().ok_or(Error::MissingEntry(i, u))?;
        let y = num.mul(&den_inv);
        if let (Some(lo), Some(hi)) = (t.get(&(i, u - 1)), t.get(&(i, u + 1))) {
            let tt = lo.mul(hi);
            let one_plus = y.one_plus();
            let expect = tt.mul(&den_inv);
            report.record(one_plus.same(&expect), || format!("1+Y at ({}, {u})", i + 1), || one_plus.render(), || expect.render());
            let one_plus_inv = y.try_inv().ok_or(Error::InverseOfZero)?.one_plus();
            let expect = tt.mul(&num_inv);
            report.record(one_plus_inv.same(&expect), || format!("1+1/Y at ({}, {u})", i + 1), || one_plus_inv.render(), || expect.render());
        }
        out.insert((i, u), y);
    }
    report.merge(yb_report(matrix, &out, -eps)?);
    Ok((out, report))
}

/// Every cluster variable is a Laurent polynomial in the initial cluster.
pub fn laurent_check<Y>(seq: &SequenceResult<RationalFunction, Y>) -> Report {
    let mut report = Report::new();
    for (&(i, u), x) in &seq.x {
        report.record(x.is_laurent(), || format!("Laurent at ({}, {u})", i + 1), || x.render(), || "not a Laurent polynomial".into());
    }
    report
}

#[cfg(test)]
mod tests {
    use super::super::tests::seven_node;
    use super::super::{b_of_c, square_product};
    use super::*;
    use crate::cartan::CartanMatrix;
    use crate::exactmath::Assignment;
    use rand::SeedableRng;

    fn b_of(c: &CartanMatrix) -> ExchangeMatrix {
        b_of_c(c, &c.bipartition().unwrap()).unwrap()
    }

    fn a2_square() -> ExchangeMatrix {
        let c = CartanMatrix::type_a(2);
        let p = c.bipartition().unwrap();
        square_product(&c, &p, &c, &p).unwrap()
    }

    #[test]
    fn hand_mutation_of_a2() {
        let s = symbolic_seed(b_of(&CartanMatrix::type_a(2)));
        let m = mutate_seed(&s, 0).unwrap();
        let x1 = RationalFunction::one().add(&RationalFunction::var(1)).div(&RationalFunction::var(0)).unwrap();
        assert!(m.x[0].eq_exact(&x1));
        assert!(m.x[1].eq_exact(&s.x[1]));
        assert!(m.y[0].eq_exact(&SemifieldElement::var(0).inv()));
        let y1 = SemifieldElement::var(0);
        let y2 = SemifieldElement::var(1).mul(&y1).mul(&y1.one_plus().inv());
        assert!(m.y[1].eq_exact(&y2));
        let back = mutate_seed(&m, 0).unwrap();
        assert_eq!(back.matrix, s.matrix);
        assert!(back.x.iter().zip(&s.x).all(|(a, b)| a.eq_exact(b)));
        assert!(back.y.iter().zip(&s.y).all(|(a, b)| a.eq_exact(b)));
    }

    #[test]
    fn seed_mutation_is_involutive_on_seven_nodes() {
        let s = symbolic_seed(seven_node());
        for k in 0..7 {
            let back = mutate_seed(&mutate_seed(&s, k).unwrap(), k).unwrap();
            assert_eq!(back.matrix, s.matrix);
            assert!(back.x.iter().zip(&s.x).all(|(a, b)| a.eq_exact(b)));
            assert!(back.y.iter().zip(&s.y).all(|(a, b)| a.eq_exact(b)));
        }
    }

    #[test]
    fn a2_belt_has_period_five_in_x() {
        let seq = run_sequence(&symbolic_seed(b_of(&CartanMatrix::type_a(2))), -2, 10).unwrap();
        // pentagon recurrence: the belt returns to the initial cluster, swapped, after five steps
        assert!(seq.x_at(0, 10).unwrap().eq_exact(seq.x_at(0, 0).unwrap()));
        assert!(seq.x_at(0, 5).unwrap().eq_exact(seq.x_at(1, 0).unwrap()));
        assert_eq!(seq.x.len(), 26);
        assert!(seq.x_at(0, -1).unwrap().eq_exact(&RationalFunction::var(0)));
    }

    #[test]
    fn belt_lemmas_and_systems() {
        for b in [b_of(&CartanMatrix::type_a(2)), b_of(&CartanMatrix::type_a(3)), a2_square()] {
            let seq = run_sequence(&symbolic_seed(b.clone()), -2, 8).unwrap();
            let lemmas = parity_lemmas(&seq).unwrap();
            assert!(lemmas.pass && lemmas.checked > 0, "{lemmas:?}");
            let tb = check_tb(&seq).unwrap();
            assert!(tb.pass && tb.checked == b.size() * 9, "{tb:?}");
            for eps in [1, -1] {
                let yb = check_yb(&seq, eps).unwrap();
                assert!(yb.pass && yb.checked > 0, "{b:?} {eps}: {yb:?}");
                let (y, report) = t_to_y_b(&b, &seq.x, eps).unwrap();
                assert!(report.pass && !y.is_empty(), "{report:?}");
            }
            assert!(laurent_check(&seq).pass);
        }
    }

    #[test]
    fn seven_node_belt_satisfies_y_systems() {
        let seq = run_sequence(&symbolic_seed(seven_node()), 0, 2).unwrap();
        assert!(check_yb(&seq, 1).unwrap().pass && check_yb(&seq, -1).unwrap().pass);
        assert!(check_tb(&seq).unwrap().pass && parity_lemmas(&seq).unwrap().pass);
    }

    #[test]
    fn numeric_belt_matches_evaluated_symbolic_belt() {
        let b = b_of(&CartanMatrix::type_a(3));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let num = numeric_seed(b.clone(), &mut rng, 8);
        let at = Assignment::new(num.x.clone());
        let sym = run_sequence(&symbolic_seed(b), 0, 6).unwrap();
        let seq = run_sequence(&num, 0, 6).unwrap();
        for (key, x) in &seq.x {
            assert_eq!(&sym.x[key].evaluate(&at).unwrap(), x);
        }
        assert!(check_tb(&seq).unwrap().pass && check_yb(&seq, 1).unwrap().pass && check_yb(&seq, -1).unwrap().pass);
    }

    #[test]
    fn perturbed_family_fails() {
        let seq = run_sequence(&symbolic_seed(b_of(&CartanMatrix::type_a(2))), 0, 6).unwrap();
        let mut x = seq.x.clone();
        x.insert((0, 3), x[&(0, 3)].mul(&RationalFunction::var(1)));
        let r = tb_report(&seq.matrix, &x).unwrap();
        assert!(!r.pass, "{r:?}");
        let mut y = seq.y.clone();
        let (key, val) = y.iter().find(|(&(i, u), _)| in_class(&seq.matrix, i, u, 1).unwrap() && u == 3).map(|(k, v)| (*k, v.clone())).unwrap();
        y.insert(key, val.mul(&SemifieldElement::var(0)));
        assert!(!yb_report(&seq.matrix, &y, 1).unwrap().pass);
    }

    #[test]
    fn belt_refuses_bad_matrices() {
        let b = ExchangeMatrix::new(vec![vec![0, 1], vec![-1, 0]]).unwrap();
        assert!(matches!(run_sequence(&symbolic_seed(b.clone()), 0, 2), Err(Error::NoParity)));
        let bad = b.with_parity(crate::Parity::new(vec![true, true])).unwrap();
        assert!(matches!(run_sequence(&symbolic_seed(bad), 0, 2), Err(Error::ConditionsViolated(_))));
    }

    #[test]
    fn growth_separates_finite_from_wild() {
        // finite type stays bounded, the seven-node belt blows up at u = 3
        let a4 = b_of(&CartanMatrix::type_a(4));
        assert_eq!(growth_bits(&a4, 0, 8).unwrap(), growth_bits(&a4, 0, 16).unwrap());
        assert!(!prefers_numeric(&a4, -8, 16).unwrap());
        assert!(!prefers_numeric(&seven_node(), 0, 2).unwrap());
        assert!(prefers_numeric(&seven_node(), 0, 3).unwrap());
    }
}
