//! Empirical period detection on Y-system orbits.

use num_rational::BigRational;
use rand::Rng;
use serde::Serialize;

use crate::cartan::CartanMatrix;
use crate::error::Result;
use crate::table::{LatticeVar, Policy, SystemKind, ValueTable, Window};
use crate::tsystem::in_slab;
use crate::ysystem::propagate_y;

/// Outcome of a scan: the first shift returning the initial slab to itself,
/// and the first shift returning it up to a node permutation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodScan {
    pub period: Option<i64>,
    pub twisted_period: Option<(i64, Vec<usize>)>,
    pub slices: i64,
}

/// Propagates random initial data over `max_period` slices past the slab
/// and reports the smallest shift reproducing the slab.
pub fn scan_period<R: Rng + ?Sized>(cm: &CartanMatrix, kind: SystemKind, max_period: i64, rng: &mut R, policy: Policy) -> Result<PeriodScan> {
    let slab_width = 2 * cm.max_d();
    let window = Window::new(0, slab_width + max_period - 1)?;
    let y = propagate_y(cm, kind, window, &ValueTable::new(), rng, policy)?;
    Ok(detect(cm, kind, window, &y, max_period))
}

/// Period detection on an already propagated table.
pub fn detect(cm: &CartanMatrix, kind: SystemKind, window: Window, y: &ValueTable<BigRational>, max_period: i64) -> PeriodScan {
    let slab: Vec<LatticeVar> = kind.variables(cm, window).into_iter().filter(|v| in_slab(cm, window, v)).collect();
    let matches = |shift: i64, perm: &[usize]| {
        slab.iter().all(|v| {
            let moved = LatticeVar::new(perm[v.a], v.m, v.k + shift);
            kind.max_level(cm, moved.a) == kind.max_level(cm, v.a) && cm.d(moved.a) == cm.d(v.a) && y.get(&moved).is_some_and(|x| Some(x) == y.get(v))
        })
    };
    let identity: Vec<usize> = (0..cm.rank()).collect();
    let period = (1..=max_period).find(|&p| matches(p, &identity));
    let twisted_period = (1..=max_period).find_map(|p| permutations(cm.rank()).into_iter().find(|perm| matches(p, perm)).map(|perm| (p, perm)));
    PeriodScan { period, twisted_period, slices: window.width() }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n > 6 {
        return vec![(0..n).collect()];
    }
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    permute(&mut current, 0, &mut out);
    out.sort();
    out
}

fn permute(v: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
    if start == v.len() {
        out.push(v.clone());
        return;
    }
    for i in start..v.len() {
        v.swap(start, i);
        permute(v, start + 1, out);
        v.swap(start, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn scan(cm: &CartanMatrix, level: i64, max: i64, seed: u64) -> PeriodScan {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        scan_period(cm, SystemKind::Restricted { level }, max, &mut rng, Policy::default()).unwrap()
    }

    #[test]
    fn a1_level_two_has_period_four() {
        // Y(k-1) Y(k+1) = 1 with no neighbours
        let s = scan(&CartanMatrix::type_a(1), 2, 8, 1);
        assert_eq!(s.period, Some(4));
    }

    #[test]
    fn a2_level_two_returns_within_ten() {
        for seed in [1, 2, 3] {
            let s = scan(&CartanMatrix::type_a(2), 2, 12, seed);
            assert_eq!(s.period, Some(10));
            assert_eq!(s.twisted_period, Some((5, vec![1, 0])));
        }
    }

    #[test]
    fn no_period_within_a_short_scan() {
        let s = scan(&CartanMatrix::type_a(3), 2, 4, 9);
        assert_eq!(s.period, None);
    }
}
