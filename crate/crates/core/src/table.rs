//! Lattice variables, windows and value tables shared by the T- and Y-systems.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cartan::CartanMatrix;
use crate::error::{Error, Result};

/// Variable `X^{(a)}_m(k/t)`: node `a` (0-based), level `m`, scaled spectral
/// coordinate `k`. Ordered by `(a, m, k)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeVar {
    pub a: usize,
    pub m: i64,
    pub k: i64,
}

impl LatticeVar {
    pub const fn new(a: usize, m: i64, k: i64) -> Self {
        LatticeVar { a, m, k }
    }

    pub fn shifted(self, dk: i64) -> Self {
        LatticeVar { k: self.k + dk, ..self }
    }

    pub fn at_level(self, m: i64) -> Self {
        LatticeVar { m, ..self }
    }
}

/// Nodes print 1-based, as in the text formats.
impl fmt::Display for LatticeVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(a={}, m={}, k={})", self.a + 1, self.m, self.k)
    }
}

impl fmt::Debug for LatticeVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A product of variables with positive integer exponents, kept sorted and
/// merged so that equal products compare equal.
pub type FactorList = Vec<(LatticeVar, u32)>;

pub fn collect_factors<I: IntoIterator<Item = LatticeVar>>(vars: I) -> FactorList {
    let mut map: BTreeMap<LatticeVar, u32> = BTreeMap::new();
    for v in vars {
        *map.entry(v).or_default() += 1;
    }
    map.into_iter().collect()
}

/// Inclusive range of slices `k_min..=k_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub k_min: i64,
    pub k_max: i64,
}

impl Window {
    pub fn new(k_min: i64, k_max: i64) -> Result<Self> {
        if k_min > k_max {
            return Err(Error::EmptyWindow);
        }
        Ok(Window { k_min, k_max })
    }

    pub fn contains(&self, k: i64) -> bool {
        (self.k_min..=self.k_max).contains(&k)
    }

    pub fn slices(&self) -> impl Iterator<Item = i64> {
        self.k_min..=self.k_max
    }

    pub fn width(&self) -> i64 {
        self.k_max - self.k_min + 1
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.k_min, self.k_max)
    }
}

/// Restricted level-`level` system, or the unrestricted system truncated so
/// that node `a` carries levels `1..=t_a * m_cap`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum SystemKind {
    Restricted { level: i64 },
    Unrestricted { m_cap: i64 },
}

impl SystemKind {
    /// Highest level carrying a variable of node `a`.
    pub fn max_level(&self, cm: &CartanMatrix, a: usize) -> i64 {
        match *self {
            SystemKind::Restricted { level } => cm.t_of(a) * level - 1,
            SystemKind::Unrestricted { m_cap } => cm.t_of(a) * m_cap,
        }
    }

    /// Whether `(b, m)` is a boundary unit (level 0, or `t_b * level` for a
    /// restricted system).
    pub fn is_unit(&self, cm: &CartanMatrix, b: usize, m: i64) -> bool {
        match *self {
            SystemKind::Restricted { level } => m == 0 || m == cm.t_of(b) * level,
            SystemKind::Unrestricted { .. } => m == 0,
        }
    }

    pub fn is_restricted(&self) -> bool {
        matches!(self, SystemKind::Restricted { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SystemKind::Restricted { level } if level < 2 => Err(Error::Parse(format!("restricted level must be at least 2, got {level}"))),
            SystemKind::Unrestricted { m_cap } if m_cap < 1 => Err(Error::Parse(format!("m-cap must be positive, got {m_cap}"))),
            _ => Ok(()),
        }
    }

    /// Every variable `(a, m, k)` of the system on `window`.
    pub fn variables(&self, cm: &CartanMatrix, window: Window) -> Vec<LatticeVar> {
        let mut out = Vec::new();
        for a in 0..cm.rank() {
            for m in 1..=self.max_level(cm, a) {
                out.extend(window.slices().map(|k| LatticeVar::new(a, m, k)));
            }
        }
        out
    }
}

/// Resampling policy for randomly chosen data that hits a zero divisor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Policy {
    pub max_retries: u32,
    pub bits: u32,
}

impl Default for Policy {
    fn default() -> Self {
        Policy { max_retries: 16, bits: crate::exactmath::DEFAULT_BITS }
    }
}

/// Values of lattice variables. Boundary units are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueTable<V> {
    values: BTreeMap<LatticeVar, V>,
}

impl<V> Default for ValueTable<V> {
    fn default() -> Self {
        ValueTable { values: BTreeMap::new() }
    }
}

impl<V> ValueTable<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: &LatticeVar) -> Option<&V> {
        self.values.get(v)
    }

    pub fn require(&self, v: &LatticeVar) -> Result<&V> {
        self.values.get(v).ok_or(Error::MissingValue(*v))
    }

    pub fn insert(&mut self, v: LatticeVar, value: V) -> Option<V> {
        self.values.insert(v, value)
    }

    pub fn contains(&self, v: &LatticeVar) -> bool {
        self.values.contains_key(v)
    }

    pub fn remove(&mut self, v: &LatticeVar) -> Option<V> {
        self.values.remove(v)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LatticeVar, &V)> {
        self.values.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &LatticeVar> {
        self.values.keys()
    }

    /// Smallest window containing every stored slice.
    pub fn span(&self) -> Option<Window> {
        let lo = self.values.keys().map(|v| v.k).min()?;
        let hi = self.values.keys().map(|v| v.k).max()?;
        Some(Window { k_min: lo, k_max: hi })
    }

    pub fn map<W>(&self, mut f: impl FnMut(&V) -> W) -> ValueTable<W> {
        ValueTable { values: self.values.iter().map(|(k, v)| (*k, f(v))).collect() }
    }

    pub fn try_map<W>(&self, mut f: impl FnMut(&V) -> Result<W>) -> Result<ValueTable<W>> {
        let mut out = BTreeMap::new();
        for (k, v) in &self.values {
            out.insert(*k, f(v)?);
        }
        Ok(ValueTable { values: out })
    }

    pub fn restricted_to(&self, keep: impl Fn(&LatticeVar) -> bool) -> Self
    where
        V: Clone,
    {
        ValueTable { values: self.values.iter().filter(|(k, _)| keep(k)).map(|(k, v)| (*k, v.clone())).collect() }
    }
}

impl<V> FromIterator<(LatticeVar, V)> for ValueTable<V> {
    fn from_iter<I: IntoIterator<Item = (LatticeVar, V)>>(iter: I) -> Self {
        ValueTable { values: iter.into_iter().collect() }
    }
}

impl<V> IntoIterator for ValueTable<V> {
    type Item = (LatticeVar, V);
    type IntoIter = std::collections::btree_map::IntoIter<LatticeVar, V>;
    fn into_iter(self) -> Self::IntoIter {
        self.values.into_iter()
    }
}
