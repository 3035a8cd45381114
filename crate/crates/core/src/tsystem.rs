//! T-systems: relation generation, verification, Cauchy propagation for the
//! restricted systems, and the two telescoping identities behind the T-to-Y
//! map.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use rand::Rng;

use crate::cartan::CartanMatrix;
use crate::error::{Error, Result};
use crate::exactmath::{random_nonzero_rational, Scalar};
use crate::report::Report;
use crate::table::{collect_factors, FactorList, LatticeVar, Policy, SystemKind, ValueTable, Window};

/// `T(lhs0) T(lhs1) = ∏ term_a + ∏ term_m`, boundary units already removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TRelation {
    pub center: LatticeVar,
    pub lhs: [LatticeVar; 2],
    pub term_a: FactorList,
    pub term_m: FactorList,
}

impl TRelation {
    pub fn variables(&self) -> impl Iterator<Item = LatticeVar> + '_ {
        self.lhs.iter().copied().chain(self.term_a.iter().chain(&self.term_m).map(|f| f.0))
    }
}

impl fmt::Display for TRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T-relation at {}", self.center)
    }
}

/// Raw factors of `S^{(b)}_m` at slice `k` for a node with `d_b = db`;
/// level-0 factors are units and are left out.
fn s_factors(db: i64, b: usize, m: i64, k: i64) -> impl Iterator<Item = LatticeVar> {
    (1..=db).filter_map(move |kp| {
        let e = (m - kp).div_euclid(db);
        let level = 1 + e;
        (level != 0).then(|| LatticeVar::new(b, level, k + 2 * kp - 1 - m + e * db))
    })
}

/// Factors of `S^{(b)}_m(k)`.
pub fn s_term(cm: &CartanMatrix, b: usize, m: i64, k: i64) -> Result<FactorList> {
    cm.require_tamely_laced()?;
    Ok(collect_factors(s_factors(cm.d(b), b, m, k)))
}

/// The monomial `M^{(a)}_m(k)` read off the two defining cases.
pub fn m_term(cm: &CartanMatrix, a: usize, m: i64, k: i64) -> Result<FactorList> {
    cm.require_tamely_laced()?;
    Ok(m_factors(cm, a, m, k))
}

pub(crate) fn m_factors(cm: &CartanMatrix, a: usize, m: i64, k: i64) -> FactorList {
    let da = cm.d(a);
    if da > 1 {
        collect_factors(cm.neighbors(a).map(|b| LatticeVar::new(b, da / cm.d(b) * m, k)))
    } else {
        collect_factors(cm.neighbors(a).flat_map(|b| s_factors(cm.d(b), b, m, k)))
    }
}

/// The same monomial through the single product formula over `b ∼ a` and
/// `1 ≤ k' ≤ -C_ab`.
pub fn m_term_unified(cm: &CartanMatrix, a: usize, m: i64, k: i64) -> Result<FactorList> {
    cm.require_tamely_laced()?;
    let da = cm.d(a);
    let mut vars = Vec::new();
    for b in cm.neighbors(a) {
        let (cab, cba, db) = (cm.entry(a, b), cm.entry(b, a), cm.d(b));
        for kp in 1..=-cab {
            let e = (da * (m - kp)).div_euclid(db);
            let level = -cba + e;
            if level == 0 {
                continue;
            }
            // d_b * ((1 - 2k') / C_ab) is an integer: either C_ab = -1, or
            // C_ab = -d_b by tameness.
            let step = db * (1 - 2 * kp) / cab;
            let shift = step + db * (-cba + e - 1) - da * m;
            vars.push(LatticeVar::new(b, level, k + shift));
        }
    }
    Ok(collect_factors(vars))
}

/// Exponent map `G(·; a, m, k)` of the unified form.
pub fn g_exponents(cm: &CartanMatrix, a: usize, m: i64, k: i64) -> Result<BTreeMap<LatticeVar, u32>> {
    Ok(m_term_unified(cm, a, m, k)?.into_iter().collect())
}

fn check_level(cm: &CartanMatrix, kind: SystemKind, a: usize, m: i64) -> Result<()> {
    let max = match kind {
        SystemKind::Restricted { .. } => kind.max_level(cm, a),
        SystemKind::Unrestricted { .. } => i64::MAX,
    };
    if a >= cm.rank() || m < 1 || m > max {
        return Err(Error::LevelOutOfRange { a, m });
    }
    Ok(())
}

/// The relation centred at `(a, m, k)` with `T_0 = 1` and, for restricted
/// systems, `T^{(b)}_{t_b ℓ} = 1` substituted.
pub fn t_relation(cm: &CartanMatrix, kind: SystemKind, a: usize, m: i64, k: i64) -> Result<TRelation> {
    cm.require_tamely_laced()?;
    check_level(cm, kind, a, m)?;
    Ok(t_relation_unchecked(cm, kind, a, m, k))
}

pub(crate) fn t_relation_unchecked(cm: &CartanMatrix, kind: SystemKind, a: usize, m: i64, k: i64) -> TRelation {
    let d = cm.d(a);
    let center = LatticeVar::new(a, m, k);
    let term_a = collect_factors([m - 1, m + 1].into_iter().filter(|&l| !kind.is_unit(cm, a, l)).map(|l| center.at_level(l)));
    let term_m = m_factors(cm, a, m, k).into_iter().filter(|(v, _)| !kind.is_unit(cm, v.a, v.m)).collect();
    TRelation { center, lhs: [center.shifted(-d), center.shifted(d)], term_a, term_m }
}

/// Every relation whose variables all lie on the window (levels within each
/// node's range, slices within `window`).
pub fn enumerate_relations(cm: &CartanMatrix, kind: SystemKind, window: Window) -> Result<Vec<TRelation>> {
    cm.require_tamely_laced()?;
    kind.validate()?;
    let inside = |v: LatticeVar| window.contains(v.k) && v.m >= 1 && v.m <= kind.max_level(cm, v.a);
    let mut out = Vec::new();
    for a in 0..cm.rank() {
        for m in 1..=kind.max_level(cm, a) {
            for k in window.slices() {
                let rel = t_relation_unchecked(cm, kind, a, m, k);
                if rel.variables().all(inside) {
                    out.push(rel);
                }
            }
        }
    }
    Ok(out)
}

pub(crate) fn product<V: Scalar>(values: &ValueTable<V>, factors: &FactorList) -> Result<V> {
    let mut acc = V::one();
    for (v, e) in factors {
        acc = acc.mul(&values.require(v)?.pow(*e));
    }
    Ok(acc)
}

/// Both sides of a relation at the given values.
pub fn t_sides<V: Scalar>(values: &ValueTable<V>, rel: &TRelation) -> Result<(V, V)> {
    let lhs = values.require(&rel.lhs[0])?.mul(values.require(&rel.lhs[1])?);
    let rhs = product(values, &rel.term_a)?.add(&product(values, &rel.term_m)?);
    Ok((lhs, rhs))
}

/// Checks every relation exactly; violations carry both sides.
pub fn check_t_solution<V: Scalar>(values: &ValueTable<V>, relations: &[TRelation]) -> Result<Report> {
    let mut report = Report::new();
    for rel in relations {
        let (lhs, rhs) = t_sides(values, rel)?;
        report.record(lhs.same(&rhs), || rel.to_string(), || lhs.render(), || rhs.render());
    }
    Ok(report)
}

/// Slab of Cauchy data for node `a`: slices `k_min .. k_min + 2 d_a`.
pub(crate) fn in_slab(cm: &CartanMatrix, window: Window, v: &LatticeVar) -> bool {
    v.k >= window.k_min && v.k < window.k_min + 2 * cm.d(v.a) && v.k <= window.k_max
}

/// Fills a table seeded with Cauchy data slice by slice, larger `d_a` first
/// within a slice, solving `T(k + d_a) = (A + M)(k) / T(k - d_a)`.
pub fn solve_t<V: Scalar>(cm: &CartanMatrix, kind: SystemKind, window: Window, mut table: ValueTable<V>) -> Result<ValueTable<V>> {
    let mut order: Vec<usize> = (0..cm.rank()).collect();
    order.sort_by_key(|&a| (-cm.d(a), a));
    for s in window.slices() {
        for &a in &order {
            let d = cm.d(a);
            if s < window.k_min + 2 * d {
                continue;
            }
            for m in 1..=kind.max_level(cm, a) {
                let target = LatticeVar::new(a, m, s);
                let rel = t_relation_unchecked(cm, kind, a, m, s - d);
                let fetch = |v: &LatticeVar| table.get(v).ok_or(Error::UnschedulableDependency { target, blocking: *v });
                for v in rel.term_a.iter().chain(&rel.term_m).map(|f| &f.0).chain([&rel.lhs[0]]) {
                    fetch(v)?;
                }
                let rhs = product(&table, &rel.term_a)?.add(&product(&table, &rel.term_m)?);
                let below = table.require(&rel.lhs[0])?;
                let value = rhs.mul(&below.try_inv().ok_or(Error::ZeroDivisor(rel.lhs[0]))?);
                if value.is_zero() {
                    return Err(Error::ZeroDivisor(target));
                }
                table.insert(target, value);
            }
        }
    }
    Ok(table)
}

/// Cauchy propagation for the level-`level` restricted T-system.
///
/// Cauchy data for node `a` are all levels on slices `k_min .. k_min + 2 d_a`;
/// entries of `initial` there are used as given, missing ones are drawn at
/// random (and redrawn when the solve hits a zero). Entries of `initial`
/// outside the slab are ignored. Fails with `UnschedulableDependency` when a
/// factor is needed before its slice is filled, which happens once some
/// `d_a ≥ 3` node has a `d = 1` neighbour.
pub fn propagate_t<R: Rng + ?Sized>(
    cm: &CartanMatrix,
    level: i64,
    window: Window,
    initial: &ValueTable<BigRational>,
    rng: &mut R,
    policy: Policy,
) -> Result<ValueTable<BigRational>> {
    cm.require_tamely_laced()?;
    let kind = SystemKind::Restricted { level };
    kind.validate()?;
    let slab: Vec<LatticeVar> = kind.variables(cm, window).into_iter().filter(|v| in_slab(cm, window, v)).collect();
    let mut attempt = 0;
    loop {
        let mut table = ValueTable::new();
        let mut drew = false;
        for v in &slab {
            let value = match initial.get(v) {
                Some(x) => x.clone(),
                None => {
                    drew = true;
                    random_nonzero_rational(rng, policy.bits)
                }
            };
            if Scalar::is_zero(&value) {
                return Err(Error::ZeroDivisor(*v));
            }
            table.insert(*v, value);
        }
        match solve_t(cm, kind, window, table) {
            Err(Error::ZeroDivisor(_)) if drew && attempt < policy.max_retries => attempt += 1,
            other => return other,
        }
    }
}

fn value_at<V: Scalar>(values: &ValueTable<V>, b: usize, m: i64, k: i64) -> Result<V> {
    if m == 0 {
        return Ok(V::one());
    }
    values.require(&LatticeVar::new(b, m, k)).cloned()
}

fn ratio<V: Scalar>(num: V, den: V, at: LatticeVar) -> Result<V> {
    Ok(num.mul(&den.try_inv().ok_or(Error::ZeroDivisor(at))?))
}

/// `T_m(k - s) T_m(k + s) / (T_{m-1}(k) T_{m+1}(k))` for node `b`.
fn t_quotient<V: Scalar>(values: &ValueTable<V>, b: usize, m: i64, k: i64, s: i64, step: i64) -> Result<V> {
    let num = value_at(values, b, m, k - s)?.mul(&value_at(values, b, m, k + s)?);
    let den = value_at(values, b, m - step, k)?.mul(&value_at(values, b, m + step, k)?);
    ratio(num, den, LatticeVar::new(b, m, k))
}

/// The first telescoping identity for step `p`, checked at every centre
/// `(m, k)` with `m` in `levels` and `k` in `window`, on arbitrary values of
/// node `b` (`T_0 = 1`). No system is imposed on the values.
pub fn identity_check_1<V: Scalar>(p: i64, b: usize, levels: std::ops::RangeInclusive<i64>, window: Window, values: &ValueTable<V>) -> Result<bool> {
    for m in levels {
        for k in window.slices() {
            let lhs = t_quotient(values, b, p * m, k, p, p)?;
            let mut rhs = V::one();
            for j in (-p + 1)..=(p - 1) {
                for kp in 1..=(p - j.abs()) {
                    let kt = k + p - j.abs() + 1 - 2 * kp;
                    rhs = rhs.mul(&t_quotient(values, b, p * m + j, kt, 1, 1)?);
                }
            }
            if !lhs.same(&rhs) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn s_value<V: Scalar>(values: &ValueTable<V>, db: i64, b: usize, m: i64, k: i64) -> Result<V> {
    let mut acc = V::one();
    for v in s_factors(db, b, m, k) {
        acc = acc.mul(values.require(&v)?);
    }
    Ok(acc)
}

/// The second telescoping identity, for the S-product of a node with
/// `d_b = db`: the S-quotient equals the T-quotient at level `m / d_b` when
/// `d_b | m`, and 1 otherwise.
pub fn identity_check_2<V: Scalar>(db: i64, b: usize, levels: std::ops::RangeInclusive<i64>, window: Window, values: &ValueTable<V>) -> Result<bool> {
    for m in levels {
        for k in window.slices() {
            let num = s_value(values, db, b, m, k - 1)?.mul(&s_value(values, db, b, m, k + 1)?);
            let den = s_value(values, db, b, m - 1, k)?.mul(&s_value(values, db, b, m + 1, k)?);
            let lhs = ratio(num, den, LatticeVar::new(b, m, k))?;
            let rhs = if m % db == 0 { t_quotient(values, b, m / db, k, db, 1)? } else { V::one() };
            if !lhs.same(&rhs) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Random nonzero values for node `b` on levels `1..=max_level` and slices
/// of `window` widened by `margin` on both sides.
pub fn random_node_table<R: Rng + ?Sized>(rng: &mut R, b: usize, max_level: i64, window: Window, margin: i64, bits: u32) -> ValueTable<BigRational> {
    let mut t = ValueTable::new();
    for m in 1..=max_level {
        for k in (window.k_min - margin)..=(window.k_max + margin) {
            t.insert(LatticeVar::new(b, m, k), random_nonzero_rational(rng, bits));
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }
    fn v(a: usize, m: i64, k: i64) -> LatticeVar {
        LatticeVar::new(a, m, k)
    }
    fn example44() -> CartanMatrix {
        CartanMatrix::new(vec![vec![2, -1, 0, 0], vec![-3, 2, -2, -2], vec![0, -1, 2, -1], vec![0, -1, -1, 2]]).unwrap()
    }
    fn b2() -> CartanMatrix {
        CartanMatrix::new(vec![vec![2, -1], vec![-2, 2]]).unwrap()
    }
    fn g2() -> CartanMatrix {
        CartanMatrix::new(vec![vec![2, -1], vec![-3, 2]]).unwrap()
    }
    fn a1() -> CartanMatrix {
        CartanMatrix::new(vec![vec![2]]).unwrap()
    }

    #[test]
    fn s_term_shapes() {
        // d_b = 1, 2, 3 through G2- and B2-like matrices (node 0 carries d > 1)
        assert_eq!(s_term(&CartanMatrix::type_a(2), 1, 4, 7).unwrap(), vec![(v(1, 4, 7), 1)]);
        assert_eq!(s_term(&b2(), 0, 6, 0).unwrap(), vec![(v(0, 3, -1), 1), (v(0, 3, 1), 1)]);
        assert_eq!(s_term(&b2(), 0, 7, 0).unwrap(), vec![(v(0, 3, 0), 1), (v(0, 4, 0), 1)]);
        let mut expect = vec![(v(0, 2, -1), 1), (v(0, 2, 1), 1), (v(0, 3, 0), 1)];
        expect.sort();
        assert_eq!(s_term(&g2(), 0, 7, 0).unwrap(), expect);
        assert_eq!(s_term(&g2(), 0, 1, 0).unwrap(), vec![(v(0, 1, 0), 1)]);
    }

    #[test]
    fn m_term_examples() {
        assert!(m_term(&a1(), 0, 3, 0).unwrap().is_empty());
        assert_eq!(m_term(&CartanMatrix::type_a(2), 0, 2, 5).unwrap(), vec![(v(1, 2, 5), 1)]);
        assert_eq!(m_term(&example44(), 0, 1, 0).unwrap(), vec![(v(1, 3, 0), 1)]);
        let affine = CartanMatrix::new(vec![vec![2, -2], vec![-2, 2]]).unwrap();
        assert_eq!(m_term(&affine, 0, 1, 0), Err(Error::NotTamelyLaced));
    }

    #[test]
    fn restricted_relations() {
        let rel = t_relation(&a1(), SystemKind::Restricted { level: 2 }, 0, 1, 3).unwrap();
        assert_eq!(rel.lhs, [v(0, 1, 2), v(0, 1, 4)]);
        assert!(rel.term_a.is_empty() && rel.term_m.is_empty());

        let rel = t_relation(&CartanMatrix::type_a(2), SystemKind::Restricted { level: 2 }, 0, 1, 0).unwrap();
        assert!(rel.term_a.is_empty());
        assert_eq!(rel.term_m, vec![(v(1, 1, 0), 1)]);

        let rel = t_relation(&CartanMatrix::type_a(2), SystemKind::Restricted { level: 4 }, 0, 3, 0).unwrap();
        assert_eq!(rel.term_a, vec![(v(0, 2, 0), 1)]);
        assert_eq!(t_relation(&a1(), SystemKind::Restricted { level: 2 }, 0, 2, 0), Err(Error::LevelOutOfRange { a: 0, m: 2 }));
    }

    #[test]
    fn relation_counts() {
        let w = Window::new(0, 3).unwrap();
        let kind = SystemKind::Restricted { level: 2 };
        assert_eq!(enumerate_relations(&a1(), kind, w).unwrap().len(), 2);
        assert_eq!(enumerate_relations(&CartanMatrix::type_a(2), kind, w).unwrap().len(), 4);
        let rels = enumerate_relations(&example44(), kind, Window::new(0, 4).unwrap()).unwrap();
        assert!(rels.iter().all(|r| r.center.a != 0));
    }

    #[test]
    fn a1_level_two_solution_check() {
        let rels = enumerate_relations(&a1(), SystemKind::Restricted { level: 2 }, Window::new(0, 3).unwrap()).unwrap();
        let mut t: ValueTable<BigRational> = [q(1, 1), q(3, 1), q(2, 1), q(2, 3)].into_iter().enumerate().map(|(k, x)| (v(0, 1, k as i64), x)).collect();
        assert!(check_t_solution(&t, &rels).unwrap().pass);
        t.insert(v(0, 1, 2), q(5, 1));
        let r = check_t_solution(&t, &rels).unwrap();
        assert_eq!(r.violations.len(), 1);

        let a2 = CartanMatrix::type_a(2);
        let w = Window::new(0, 3).unwrap();
        let kind = SystemKind::Restricted { level: 2 };
        let ones: ValueTable<BigRational> = kind.variables(&a2, w).into_iter().map(|x| (x, q(1, 1))).collect();
        assert!(!check_t_solution(&ones, &enumerate_relations(&a2, kind, w).unwrap()).unwrap().pass);
    }

    #[test]
    fn a1_propagation() {
        let init: ValueTable<BigRational> = [(v(0, 1, 0), q(1, 1)), (v(0, 1, 1), q(3, 1))].into_iter().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = propagate_t(&a1(), 2, Window::new(0, 4).unwrap(), &init, &mut rng, Policy::default()).unwrap();
        let got: Vec<_> = (0..=4).map(|k| t.get(&v(0, 1, k)).unwrap().clone()).collect();
        assert_eq!(got, vec![q(1, 1), q(3, 1), q(2, 1), q(2, 3), q(1, 1)]);
    }

    #[test]
    fn propagation_is_self_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (cm, level) in [(CartanMatrix::type_a(2), 2), (CartanMatrix::type_a(3), 3), (b2(), 2), (b2(), 3)] {
            let w = Window::new(0, 24).unwrap();
            let t = propagate_t(&cm, level, w, &ValueTable::new(), &mut rng, Policy::default()).unwrap();
            let kind = SystemKind::Restricted { level };
            assert_eq!(t.len(), kind.variables(&cm, w).len());
            let rels = enumerate_relations(&cm, kind, w).unwrap();
            assert!(!rels.is_empty());
            assert!(check_t_solution(&t, &rels).unwrap().pass);
        }
    }

    #[test]
    fn large_symmetrizer_is_unschedulable() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let err = propagate_t(&example44(), 2, Window::new(0, 20).unwrap(), &ValueTable::new(), &mut rng, Policy::default());
        assert!(matches!(err, Err(Error::UnschedulableDependency { .. })), "{err:?}");
    }

    #[test]
    fn identities_on_random_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let w = Window::new(0, 9).unwrap();
        for p in 1..=3 {
            let t = random_node_table(&mut rng, 0, 4 * p, w, 3 * p, 8);
            assert!(identity_check_1(p, 0, 1..=3, w, &t).unwrap(), "p = {p}");
        }
        for db in 1..=3 {
            let t = random_node_table(&mut rng, 0, 6, w, 4, 8);
            assert!(identity_check_2(db, 0, 1..=3 * db, w, &t).unwrap(), "d_b = {db}");
        }
    }

    fn tame_matrices() -> Vec<CartanMatrix> {
        vec![example44(), b2(), g2(), CartanMatrix::type_a(3), a1()]
    }

    proptest! {
        #[test]
        fn unified_form_agrees(which in 0usize..5, a in 0usize..4, m in 1i64..9, k in -20i64..20) {
            let cm = &tame_matrices()[which];
            let a = a % cm.rank();
            let plain = m_term(cm, a, m, k).unwrap();
            prop_assert_eq!(&plain, &m_term_unified(cm, a, m, k).unwrap());
            let g: FactorList = g_exponents(cm, a, m, k).unwrap().into_iter().collect();
            prop_assert_eq!(&plain, &g);
        }

        #[test]
        fn factor_counts_and_reach(which in 0usize..5, a in 0usize..4, m in 3i64..12, k in -5i64..5) {
            let cm = &tame_matrices()[which];
            let a = a % cm.rank();
            for b in 0..cm.rank() {
                let n: u32 = s_term(cm, b, m, k).unwrap().iter().map(|f| f.1).sum();
                prop_assert_eq!(n as i64, cm.d(b));
            }
            let factors = m_term(cm, a, m, k).unwrap();
            if cm.d(a) == 1 {
                let n: u32 = factors.iter().map(|f| f.1).sum();
                prop_assert_eq!(n as i64, cm.neighbors(a).map(|b| cm.d(b)).sum::<i64>());
            }
            for (v, _) in &factors {
                prop_assert!((v.k - k).abs() <= cm.d(a).max(cm.d(v.a) - 1));
            }
        }

        #[test]
        fn restricted_boundary_is_substituted(which in 0usize..5, level in 2i64..4, k in -3i64..3) {
            let cm = &tame_matrices()[which];
            let kind = SystemKind::Restricted { level };
            for a in 0..cm.rank() {
                let top = kind.max_level(cm, a);
                for m in [1, top] {
                    let rel = t_relation(cm, kind, a, m, k).unwrap();
                    for v in rel.variables() {
                        prop_assert!(v.m >= 1 && v.m < cm.t_of(v.a) * level);
                    }
                }
            }
        }
    }
}
