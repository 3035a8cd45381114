//! Y-systems: relation generation (direct and through the transposed
//! exponent map), verification, Cauchy propagation, the T-to-Y map and the
//! Y-to-T reconstruction.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use num_rational::BigRational;
use rand::Rng;
use serde::Serialize;

use crate::cartan::CartanMatrix;
use crate::error::{Error, Result};
use crate::exactmath::{random_nonzero_rational, Scalar};
use crate::report::Report;
use crate::table::{collect_factors, FactorList, LatticeVar, Policy, SystemKind, ValueTable, Window};
use crate::tsystem::{g_exponents, in_slab, m_factors, product, t_relation_unchecked};

/// `Y(lhs0) Y(lhs1) = ∏ (1 + Y)^e / ∏ (1 + Y⁻¹)^e` with `numerator` listing
/// the `(1 + Y)` factors and `denominator` the `(1 + Y⁻¹)` factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YRelation {
    pub center: LatticeVar,
    pub lhs: [LatticeVar; 2],
    pub numerator: FactorList,
    pub denominator: FactorList,
}

impl YRelation {
    pub fn variables(&self) -> impl Iterator<Item = LatticeVar> + '_ {
        self.lhs.iter().copied().chain(self.numerator.iter().chain(&self.denominator).map(|f| f.0))
    }
}

impl fmt::Display for YRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Y-relation at {}", self.center)
    }
}

fn z_factors(b: usize, p: i64, m: i64, k: i64) -> impl Iterator<Item = LatticeVar> {
    ((-p + 1)..=(p - 1)).flat_map(move |j| (1..=(p - j.abs())).map(move |kp| LatticeVar::new(b, p * m + j, k + p - j.abs() + 1 - 2 * kp)))
}

/// The `p²` factors `(1 + Y^{(b)}_{pm+j})` of `Z^{(b)}_{p,m}(k)`, before any
/// boundary substitution.
pub fn z_term(b: usize, p: i64, m: i64, k: i64) -> FactorList {
    collect_factors(z_factors(b, p, m, k))
}

fn numerator_vars(cm: &CartanMatrix, a: usize, m: i64, k: i64) -> Vec<LatticeVar> {
    let da = cm.d(a);
    if da > 1 {
        cm.neighbors(a).flat_map(|b| z_factors(b, da / cm.d(b), m, k)).collect()
    } else {
        cm.neighbors(a).filter(|&b| m % cm.d(b) == 0).map(|b| LatticeVar::new(b, m / cm.d(b), k)).collect()
    }
}

fn finish(cm: &CartanMatrix, kind: SystemKind, a: usize, m: i64, k: i64, numerator: Vec<LatticeVar>) -> YRelation {
    let center = LatticeVar::new(a, m, k);
    let d = cm.d(a);
    let numerator = collect_factors(numerator.into_iter().filter(|v| !kind.is_unit(cm, v.a, v.m)));
    let denominator = collect_factors([m - 1, m + 1].into_iter().filter(|&l| !kind.is_unit(cm, a, l)).map(|l| center.at_level(l)));
    YRelation { center, lhs: [center.shifted(-d), center.shifted(d)], numerator, denominator }
}

fn check_level(cm: &CartanMatrix, kind: SystemKind, a: usize, m: i64) -> Result<()> {
    let ok = a < cm.rank() && m >= 1 && (!kind.is_restricted() || m <= kind.max_level(cm, a));
    if ok {
        Ok(())
    } else {
        Err(Error::LevelOutOfRange { a, m })
    }
}

/// The relation centred at `(a, m, k)`, with `Y_0⁻¹ = 0` and, for restricted
/// systems, `Y_{t_a ℓ}⁻¹ = 0`.
pub fn y_relation(cm: &CartanMatrix, kind: SystemKind, a: usize, m: i64, k: i64) -> Result<YRelation> {
    cm.require_tamely_laced()?;
    check_level(cm, kind, a, m)?;
    Ok(y_relation_unchecked(cm, kind, a, m, k))
}

fn y_relation_unchecked(cm: &CartanMatrix, kind: SystemKind, a: usize, m: i64, k: i64) -> YRelation {
    finish(cm, kind, a, m, k, numerator_vars(cm, a, m, k))
}

/// The same relation with the numerator read off the transposed exponents:
/// `(1 + Y^{(b)}_l(v))` appears as often as `T^{(a)}_m(k)` does in the
/// monomial `M^{(b)}_l(v)`.
pub fn y_relation_via_transpose(cm: &CartanMatrix, kind: SystemKind, a: usize, m: i64, k: i64) -> Result<YRelation> {
    cm.require_tamely_laced()?;
    check_level(cm, kind, a, m)?;
    let target = LatticeVar::new(a, m, k);
    let reach = cm.max_d() + 1;
    let mut numerator = Vec::new();
    for b in cm.neighbors(a) {
        let top = (m + 1) * cm.max_d() + 1;
        for l in 1..=top {
            if kind.is_restricted() && l > kind.max_level(cm, b) {
                break;
            }
            for v in (k - reach)..=(k + reach) {
                if let Some(&e) = g_exponents(cm, b, l, v)?.get(&target) {
                    numerator.extend(std::iter::repeat_n(LatticeVar::new(b, l, v), e as usize));
                }
            }
        }
    }
    Ok(finish(cm, kind, a, m, k, numerator))
}

/// Every relation centred on the system's levels with all its variables on
/// the window's slices. Unrestricted relations may reach into the collar.
pub fn enumerate_y_relations(cm: &CartanMatrix, kind: SystemKind, window: Window) -> Result<Vec<YRelation>> {
    cm.require_tamely_laced()?;
    kind.validate()?;
    let inside = |v: LatticeVar| window.contains(v.k) && v.m >= 1 && (!kind.is_restricted() || v.m <= kind.max_level(cm, v.a));
    let mut out = Vec::new();
    for a in 0..cm.rank() {
        for m in 1..=kind.max_level(cm, a) {
            for k in window.slices() {
                let rel = y_relation_unchecked(cm, kind, a, m, k);
                if rel.variables().all(inside) {
                    out.push(rel);
                }
            }
        }
    }
    Ok(out)
}

fn inverse<V: Scalar>(x: &V, at: LatticeVar) -> Result<V> {
    x.try_inv().ok_or(Error::ZeroDivisor(at))
}

/// Right-hand side of a relation, `None` when a factor is absent.
fn y_rhs<V: Scalar>(values: &ValueTable<V>, rel: &YRelation) -> Result<Option<V>> {
    let mut num = V::one();
    for (v, e) in &rel.numerator {
        match values.get(v) {
            Some(y) => num = num.mul(&y.one_plus().pow(*e)),
            None => return Ok(None),
        }
    }
    let mut den = V::one();
    for (v, e) in &rel.denominator {
        match values.get(v) {
            Some(y) => den = den.mul(&inverse(y, *v)?.one_plus().pow(*e)),
            None => return Ok(None),
        }
    }
    Ok(Some(num.mul(&inverse(&den, rel.center)?)))
}

pub fn check_y_solution<V: Scalar>(values: &ValueTable<V>, relations: &[YRelation]) -> Result<Report> {
    let mut report = Report::new();
    for rel in relations {
        let lhs = values.require(&rel.lhs[0])?.mul(values.require(&rel.lhs[1])?);
        for v in rel.numerator.iter().chain(&rel.denominator) {
            values.require(&v.0)?;
        }
        let rhs = y_rhs(values, rel)?.expect("all factors present");
        report.record(lhs.same(&rhs), || rel.to_string(), || lhs.render(), || rhs.render());
    }
    Ok(report)
}

/// Levels above the cap of node `b` read by relations centred at or below
/// the caps of an m-capped unrestricted system.
pub fn collar_levels(cm: &CartanMatrix, m_cap: i64, b: usize) -> std::ops::RangeInclusive<i64> {
    let top = cm.t_of(b) * m_cap;
    let reach = cm.neighbors(b).filter(|&a| cm.d(a) > 1).map(|a| cm.d(a) / cm.d(b) - 1).max().unwrap_or(0);
    (top + 1)..=(top + reach.max(1))
}

/// Slice-major solve of `Y(k + d_a) = RHS(k) / Y(k - d_a)` for every level
/// of the system; collar values must already be present.
pub fn solve_y<V: Scalar>(cm: &CartanMatrix, kind: SystemKind, window: Window, mut table: ValueTable<V>) -> Result<ValueTable<V>> {
    for s in window.slices() {
        for a in 0..cm.rank() {
            let d = cm.d(a);
            if s < window.k_min + 2 * d {
                continue;
            }
            for m in 1..=kind.max_level(cm, a) {
                let target = LatticeVar::new(a, m, s);
                let rel = y_relation_unchecked(cm, kind, a, m, s - d);
                if let Some(gap) = rel.variables().find(|v| *v != target && !table.contains(v)) {
                    return Err(Error::MissingValue(gap));
                }
                let rhs = y_rhs(&table, &rel)?.expect("all factors present");
                let value = rhs.mul(&inverse(table.require(&rel.lhs[0])?, rel.lhs[0])?);
                if value.is_zero() {
                    return Err(Error::ZeroDivisor(target));
                }
                table.insert(target, value);
            }
        }
    }
    Ok(table)
}

/// Cauchy propagation from the slab `k_min .. k_min + 2 d_a` of every node.
///
/// An m-capped unrestricted system also takes its collar (the levels just
/// above each cap that the top relations read) as given data on every
/// slice; any collar extends upwards to a full solution, so the result is a
/// window of a genuine unrestricted solution. Missing data are drawn at
/// random, never `-1` since `1 + Y` must stay invertible, and redrawn when a
/// zero shows up.
pub fn propagate_y<R: Rng + ?Sized>(
    cm: &CartanMatrix,
    kind: SystemKind,
    window: Window,
    initial: &ValueTable<BigRational>,
    rng: &mut R,
    policy: Policy,
) -> Result<ValueTable<BigRational>> {
    cm.require_tamely_laced()?;
    kind.validate()?;
    let mut slab: Vec<LatticeVar> = kind.variables(cm, window).into_iter().filter(|v| in_slab(cm, window, v)).collect();
    if let SystemKind::Unrestricted { m_cap } = kind {
        for b in 0..cm.rank() {
            for m in collar_levels(cm, m_cap, b) {
                slab.extend(window.slices().map(|k| LatticeVar::new(b, m, k)));
            }
        }
    }
    let minus_one = -unit();
    let mut attempt = 0;
    loop {
        let mut table = ValueTable::new();
        let mut drew = false;
        for v in &slab {
            let value = match initial.get(v) {
                Some(x) => x.clone(),
                None => {
                    drew = true;
                    loop {
                        let x = random_nonzero_rational(rng, policy.bits);
                        if x != minus_one {
                            break x;
                        }
                    }
                }
            };
            if Scalar::is_zero(&value) {
                return Err(Error::ZeroDivisor(*v));
            }
            table.insert(*v, value);
        }
        match solve_y(cm, kind, window, table) {
            Err(Error::ZeroDivisor(_)) if drew && attempt < policy.max_retries => attempt += 1,
            other => return other,
        }
    }
}

/// `Y = M / (T_{m-1} T_{m+1})` at `v` with units substituted, plus both
/// sides of `1 + Y = T(k-d)T(k+d) / (T_{m-1}T_{m+1})` and
/// `1 + Y⁻¹ = T(k-d)T(k+d) / M` when the shifted values exist.
struct TtoYPoint<V> {
    y: V,
    sides: Option<[(V, V); 2]>,
}

fn t_to_y_at<V: Scalar>(cm: &CartanMatrix, kind: SystemKind, t: &ValueTable<V>, v: LatticeVar) -> Result<Option<TtoYPoint<V>>> {
    let rel = t_relation_unchecked(cm, kind, v.a, v.m, v.k);
    if !rel.term_a.iter().chain(&rel.term_m).all(|f| t.contains(&f.0)) {
        return Ok(None);
    }
    let m = product(t, &rel.term_m)?;
    let adj = product(t, &rel.term_a)?;
    let y = m.mul(&inverse(&adj, v)?);
    if y.is_zero() {
        return Err(Error::ZeroDivisor(v));
    }
    let sides = match (t.get(&rel.lhs[0]), t.get(&rel.lhs[1])) {
        (Some(lo), Some(hi)) => {
            let shifted = lo.mul(hi);
            let plus = (y.one_plus(), shifted.mul(&inverse(&adj, v)?));
            let minus = (inverse(&y, v)?.one_plus(), shifted.mul(&inverse(&m, v)?));
            Some([plus, minus])
        }
        _ => None,
    };
    Ok(Some(TtoYPoint { y, sides }))
}

/// The T-to-Y map on every position where its factors are present, with a
/// report on the companion identities for `1 + Y` and `1 + Y⁻¹` and, for
/// restricted systems, on the boundary cancellation.
pub fn t_to_y<V: Scalar>(cm: &CartanMatrix, kind: SystemKind, t: &ValueTable<V>) -> Result<(ValueTable<V>, Report)> {
    cm.require_tamely_laced()?;
    kind.validate()?;
    let mut y = ValueTable::new();
    let mut report = Report::new();
    for &v in t.keys() {
        if v.m < 1 || (kind.is_restricted() && v.m > kind.max_level(cm, v.a)) {
            continue;
        }
        let Some(point) = t_to_y_at(cm, kind, t, v)? else { continue };
        if let Some([plus, minus]) = &point.sides {
            for (label, (l, r)) in [("1+Y", plus), ("1+1/Y", minus)] {
                report.record(l.same(r), || format!("{label} at {v}"), || l.render(), || r.render());
            }
        }
        y.insert(v, point.y);
    }
    if let (SystemKind::Restricted { level }, Some(span)) = (kind, t.span()) {
        report.merge(boundary_check(cm, level, span)?);
    }
    Ok((y, report))
}

/// The boundary quantity `M_{t_a ℓ}(k) / (T_{t_a ℓ}(k-d) T_{t_a ℓ}(k+d))`
/// under unit boundary values: it is exactly 1 when every factor is a unit,
/// which is what is checked.
pub fn boundary_check(cm: &CartanMatrix, level: i64, window: Window) -> Result<Report> {
    let kind = SystemKind::Restricted { level };
    kind.validate()?;
    let mut report = Report::new();
    for a in 0..cm.rank() {
        let top = cm.t_of(a) * level;
        for k in window.slices() {
            let at = LatticeVar::new(a, top, k);
            let factors = m_factors(cm, a, top, k);
            let stray = factors.iter().map(|f| f.0).chain([at.shifted(-cm.d(a)), at.shifted(cm.d(a))]).find(|v| !kind.is_unit(cm, v.a, v.m));
            let ok = stray.is_none();
            report.record(ok, || format!("boundary at {at}"), || stray.map_or("1/1".into(), |v| format!("non-unit {v}")), || "1/1".into());
        }
    }
    Ok(report)
}

/// The three pointwise identities linking a T-family and a Y-family:
/// `Y = M / (T_{m-1}T_{m+1})`, `1 + Y = T(k-d)T(k+d) / (T_{m-1}T_{m+1})` and
/// `1 + Y⁻¹ = T(k-d)T(k+d) / M`, checked wherever every factor exists.
pub fn claim_identities_check<V: Scalar>(cm: &CartanMatrix, kind: SystemKind, t: &ValueTable<V>, y: &ValueTable<V>) -> Result<Report> {
    let mut report = Report::new();
    for (v, given) in y.iter() {
        let Some(point) = t_to_y_at(cm, kind, t, *v)? else { continue };
        report.record(given.same(&point.y), || format!("Y from T at {v}"), || given.render(), || point.y.render());
        if let Some([(_, plus), (_, minus)]) = point.sides {
            let one_plus = given.one_plus();
            report.record(one_plus.same(&plus), || format!("1+Y at {v}"), || one_plus.render(), || plus.render());
            let inv_plus = inverse(given, *v)?.one_plus();
            report.record(inv_plus.same(&minus), || format!("1+1/Y at {v}"), || inv_plus.render(), || minus.render());
        }
    }
    Ok(report)
}

/// How the free level-1 values of the reconstruction are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FreeChoice {
    Random,
    Unit,
}

impl std::str::FromStr for FreeChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(FreeChoice::Random),
            "unit" => Ok(FreeChoice::Unit),
            _ => Err(Error::Parse(format!("free choice must be random or unit, got {s:?}"))),
        }
    }
}

/// Output of [`y_to_t`]: every determined T-value, the slices on which all
/// level-1 values are determined, and the data needed to reproduce the run.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub t: ValueTable<BigRational>,
    pub determined: Window,
    pub origin: i64,
    pub free: FreeChoice,
}

struct Builder<'a> {
    cm: &'a CartanMatrix,
    y: &'a ValueTable<BigRational>,
    origin: i64,
    free: HashMap<LatticeVar, BigRational>,
    memo: HashMap<LatticeVar, Option<BigRational>>,
    active: HashSet<LatticeVar>,
}

impl Builder<'_> {
    fn y(&self, a: usize, m: i64, k: i64) -> Option<&BigRational> {
        self.y.get(&LatticeVar::new(a, m, k))
    }

    fn demand(&mut self, v: LatticeVar) -> Result<Option<BigRational>> {
        if v.m == 0 {
            return Ok(Some(unit()));
        }
        if let Some(x) = self.free.get(&v) {
            return Ok(Some(x.clone()));
        }
        if let Some(x) = self.memo.get(&v) {
            return Ok(x.clone());
        }
        if !self.active.insert(v) {
            return Err(Error::UnschedulableDependency { target: v, blocking: v });
        }
        let value = self.rule(v);
        self.active.remove(&v);
        let value = value?;
        self.memo.insert(v, value.clone());
        Ok(value)
    }

    fn all(&mut self, vars: &FactorList) -> Result<Option<BigRational>> {
        let mut acc = unit();
        for (v, e) in vars {
            match self.demand(*v)? {
                Some(x) => acc *= x.pow(*e as i32),
                None => return Ok(None),
            }
        }
        Ok(Some(acc))
    }

    /// Level 1 outside the free slab extends outwards from the relation
    /// centred `d_a` inside; higher levels come from the `1 + Y` identity.
    fn rule(&mut self, v: LatticeVar) -> Result<Option<BigRational>> {
        let d = self.cm.d(v.a);
        if v.m == 1 {
            let (center, other) = if v.k >= self.origin + d { (v.k - d, v.k - 2 * d) } else { (v.k + d, v.k + 2 * d) };
            let Some(y) = self.y(v.a, 1, center).cloned() else { return Ok(None) };
            let Some(m) = self.all(&m_factors(self.cm, v.a, 1, center))? else { return Ok(None) };
            let Some(other) = self.demand(LatticeVar::new(v.a, 1, other))? else { return Ok(None) };
            let value = (unit() + y.recip()) * m / nonzero(other, v)?;
            return nonzero(value, v).map(Some);
        }
        let Some(y) = self.y(v.a, v.m - 1, v.k).cloned() else { return Ok(None) };
        let below = LatticeVar::new(v.a, v.m - 1, v.k);
        let (Some(lo), Some(hi)) = (self.demand(below.shifted(-d))?, self.demand(below.shifted(d))?) else { return Ok(None) };
        let Some(base) = self.demand(below.at_level(v.m - 2))? else { return Ok(None) };
        let den = nonzero((unit() + y) * base, v)?;
        nonzero(lo * hi / den, v).map(Some)
    }
}

fn unit() -> BigRational {
    BigRational::from_integer(1.into())
}

fn nonzero(x: BigRational, at: LatticeVar) -> Result<BigRational> {
    if Scalar::is_zero(&x) {
        Err(Error::ZeroDivisor(at))
    } else {
        Ok(x)
    }
}

/// Reconstructs a T-family from a solution of an m-capped unrestricted
/// Y-system.
///
/// Level-1 values on `origin - d_a <= k < origin + d_a` (with `origin` the
/// window midpoint) are free; every other level-1 value is pushed outwards
/// by the level-1 `1 + Y⁻¹` relation and higher levels follow from the
/// `1 + Y` relation. The level-1 groups are extended in increasing order of
/// `d_a`, so a node with a larger symmetrizer entry only starts once its
/// smaller neighbours reach far enough. Values whose inputs leave the
/// Y-window are left out.
pub fn y_to_t<R: Rng + ?Sized>(
    cm: &CartanMatrix,
    kind: SystemKind,
    y: &ValueTable<BigRational>,
    window: Window,
    free: FreeChoice,
    rng: &mut R,
    policy: Policy,
) -> Result<Reconstruction> {
    cm.require_tamely_laced()?;
    let SystemKind::Unrestricted { m_cap } = kind else { return Err(Error::RestrictedReconstruction) };
    kind.validate()?;
    let origin = window.k_min + (window.width() - 1) / 2;
    let mut attempt = 0;
    loop {
        let mut slab = HashMap::new();
        for a in 0..cm.rank() {
            let d = cm.d(a);
            for k in (origin - d)..(origin + d) {
                let value = match free {
                    FreeChoice::Random => random_nonzero_rational(rng, policy.bits),
                    FreeChoice::Unit => unit(),
                };
                slab.insert(LatticeVar::new(a, 1, k), value);
            }
        }
        let mut builder = Builder { cm, y, origin, free: slab, memo: HashMap::new(), active: HashSet::new() };
        match build(&mut builder, cm, m_cap, window) {
            Ok(t) => {
                let determined = determined_window(cm, &t, origin, window);
                return Ok(Reconstruction { t, determined, origin, free });
            }
            Err(Error::ZeroDivisor(_)) if free == FreeChoice::Random && attempt < policy.max_retries => attempt += 1,
            Err(e) => return Err(e),
        }
    }
}

fn build(builder: &mut Builder, cm: &CartanMatrix, m_cap: i64, window: Window) -> Result<ValueTable<BigRational>> {
    let origin = builder.origin;
    let groups: BTreeSet<i64> = cm.symmetrizer().iter().copied().collect();
    for &reach in &groups {
        for a in (0..cm.rank()).filter(|&a| cm.d(a) <= reach) {
            for k in (origin - reach)..(origin + reach) {
                let v = LatticeVar::new(a, 1, k);
                if builder.demand(v)?.is_none() {
                    return Err(Error::WindowTooNarrow(v));
                }
            }
        }
    }
    let mut t = ValueTable::new();
    for a in 0..cm.rank() {
        for m in 1..=(cm.t_of(a) * m_cap + 1) {
            for k in window.slices() {
                let v = LatticeVar::new(a, m, k);
                if let Some(x) = builder.demand(v)? {
                    t.insert(v, x);
                }
            }
        }
    }
    Ok(t)
}

fn determined_window(cm: &CartanMatrix, t: &ValueTable<BigRational>, origin: i64, window: Window) -> Window {
    let full = |k: i64| (0..cm.rank()).all(|a| t.contains(&LatticeVar::new(a, 1, k)));
    let mut lo = origin;
    while lo > window.k_min && full(lo - 1) {
        lo -= 1;
    }
    let mut hi = origin;
    while hi < window.k_max && full(hi + 1) {
        hi += 1;
    }
    Window { k_min: lo, k_max: hi }
}
