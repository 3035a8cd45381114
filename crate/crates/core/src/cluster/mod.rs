//! Exchange matrices, seed mutation and the bipartite mutation belt.

mod belt;
mod correspond;

pub use belt::{
    check_tb, check_yb, growth_bits, in_class, laurent_check, mutate_seed, numeric_seed, parity_lemmas, prefers_numeric, run_sequence, symbolic_seed, t_to_y_b,
    tb_report, yb_report, Seed, SequenceResult,
};
pub use correspond::correspondence_check;

use std::fmt;

use crate::cartan::{balancing_diagonal, CartanMatrix, Parity};
use crate::error::{Error, Result};

/// A skew-symmetrizable integer matrix with its minimal skew-symmetrizer
/// and, once known, a parity split `I = I+ ⊔ I-`.
#[derive(Clone, PartialEq, Eq)]
pub struct ExchangeMatrix {
    entries: Vec<Vec<i64>>,
    d: Vec<i64>,
    parity: Option<Parity>,
}

impl ExchangeMatrix {
    pub fn new(entries: Vec<Vec<i64>>) -> Result<Self> {
        let n = entries.len();
        for (i, row) in entries.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSkewSymmetrizable(format!("row {} has {} entries, expected {n}", i + 1, row.len())));
            }
        }
        for i in 0..n {
            if entries[i][i] != 0 {
                return Err(Error::NotSkewSymmetrizable(format!("B[{0}][{0}] = {1} != 0", i + 1, entries[i][i])));
            }
            for j in 0..i {
                let (a, b) = (entries[i][j], entries[j][i]);
                if a.signum() != -b.signum() {
                    return Err(Error::NotSkewSymmetrizable(format!(
                        "B[{}][{}] = {a} and B[{}][{}] = {b} do not have opposite signs",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        let d = balancing_diagonal(&entries, -1).map_err(|e| match e {
            Error::NotSymmetrizable(msg) => Error::NotSkewSymmetrizable(msg),
            other => other,
        })?;
        Ok(ExchangeMatrix { entries, d, parity: None })
    }

    pub fn with_parity(mut self, parity: Parity) -> Result<Self> {
        if parity.len() != self.size() {
            return Err(Error::IndexOutOfRange(parity.len()));
        }
        self.parity = Some(parity);
        Ok(self)
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    pub fn skew_symmetrizer(&self) -> &[i64] {
        &self.d
    }

    pub fn parity(&self) -> Option<&Parity> {
        self.parity.as_ref()
    }

    pub fn require_parity(&self) -> Result<&Parity> {
        self.parity.as_ref().ok_or(Error::NoParity)
    }

    pub fn negated(&self) -> Self {
        let entries = self.entries.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        ExchangeMatrix { entries, d: self.d.clone(), parity: self.parity.clone() }
    }

    /// Nonzero entries only between `I+` and `I-`.
    pub fn check_b1(&self) -> Result<bool> {
        let p = self.require_parity()?;
        let n = self.size();
        Ok((0..n).all(|i| (0..n).all(|j| self.entries[i][j] == 0 || p.is_plus(i) != p.is_plus(j))))
    }

    /// `μ+(B) = μ-(B) = -B` by composed mutation.
    pub fn check_b2(&self) -> Result<bool> {
        let p = self.require_parity()?;
        let neg = self.negated();
        Ok([p.plus_nodes(), p.minus_nodes()].iter().all(|nodes| {
            let mut m = self.clone();
            for &k in nodes {
                m = mutate_matrix(&m, k).expect("index in range");
            }
            m.entries == neg.entries
        }))
    }

    /// The bilinear form of `μ± = -B`: for `i, j` of equal sign, the sums of
    /// `B_ik B_kj` over positive and over negative paths agree.
    pub fn check_bb(&self) -> Result<bool> {
        let p = self.require_parity()?;
        let n = self.size();
        for i in 0..n {
            for j in (0..n).filter(|&j| p.is_plus(j) == p.is_plus(i)) {
                let (mut pos, mut neg) = (0, 0);
                for k in 0..n {
                    let (a, b) = (self.entries[i][k], self.entries[k][j]);
                    if a > 0 && b > 0 {
                        pos += a * b;
                    } else if a < 0 && b < 0 {
                        neg += a * b;
                    }
                }
                if pos != neg {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Fails with `ConditionsViolated` unless the belt conditions hold.
    pub fn require_belt_conditions(&self) -> Result<&Parity> {
        if !self.check_b1()? {
            return Err(Error::ConditionsViolated("entries inside a parity class".into()));
        }
        if !self.check_b2()? {
            return Err(Error::ConditionsViolated("composed mutation is not -B".into()));
        }
        self.require_parity()
    }
}

impl fmt::Debug for ExchangeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.entries)?;
        if let Some(p) = &self.parity {
            write!(f, " {p:?}")?;
        }
        Ok(())
    }
}

/// Matrix mutation at `k`; symmetrizer and parity are carried over.
pub fn mutate_matrix(e: &ExchangeMatrix, k: usize) -> Result<ExchangeMatrix> {
    let n = e.size();
    if k >= n {
        return Err(Error::IndexOutOfRange(k));
    }
    let b = &e.entries;
    let entries = (0..n)
        .map(|i| (0..n).map(|j| if i == k || j == k { -b[i][j] } else { b[i][j] + (b[i][k].abs() * b[k][j] + b[i][k] * b[k][j].abs()) / 2 }).collect())
        .collect();
    Ok(ExchangeMatrix { entries, d: e.d.clone(), parity: e.parity.clone() })
}

/// `B(C)`: `-C_ij` from `I+` to `I-`, `C_ij` from `I-` to `I+`, zero
/// otherwise, with the bipartition of `C` as parity.
pub fn b_of_c(cm: &CartanMatrix, parity: &Parity) -> Result<ExchangeMatrix> {
    check_bipartition(cm, parity)?;
    let n = cm.rank();
    let entries = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match (parity.is_plus(i), parity.is_plus(j)) {
                    (true, false) => -cm.entry(i, j),
                    (false, true) => cm.entry(i, j),
                    _ => 0,
                })
                .collect()
        })
        .collect();
    ExchangeMatrix::new(entries)?.with_parity(parity.clone())
}

fn check_bipartition(cm: &CartanMatrix, parity: &Parity) -> Result<()> {
    if parity.len() != cm.rank() {
        return Err(Error::NotBipartite);
    }
    for i in 0..cm.rank() {
        if cm.neighbors(i).any(|j| parity.is_plus(i) == parity.is_plus(j)) {
            return Err(Error::NotBipartite);
        }
    }
    Ok(())
}

/// The square product `B(C) □ B(C')` on `I × I'`, pair `(i, i')` stored at
/// index `i * |I'| + i'`, with parity `(++) ⊔ (--)` as `+`.
pub fn square_product(cm: &CartanMatrix, parity: &Parity, cm2: &CartanMatrix, parity2: &Parity) -> Result<ExchangeMatrix> {
    check_bipartition(cm, parity)?;
    check_bipartition(cm2, parity2)?;
    let (n, n2) = (cm.rank(), cm2.rank());
    let size = n * n2;
    let sign = |i: usize, i2: usize| (parity.is_plus(i), parity2.is_plus(i2));
    let mut entries = vec![vec![0i64; size]; size];
    for i in 0..n {
        for i2 in 0..n2 {
            for j in 0..n {
                for j2 in 0..n2 {
                    let (si, sj) = (sign(i, i2), sign(j, j2));
                    let same_col = i2 == j2 && i != j;
                    let same_row = i == j && i2 != j2;
                    let value = match (si, sj) {
                        ((false, true), (true, true)) | ((true, false), (false, false)) if same_col => -cm.entry(i, j),
                        ((true, true), (false, true)) | ((false, false), (true, false)) if same_col => cm.entry(i, j),
                        ((true, true), (true, false)) | ((false, false), (false, true)) if same_row => -cm2.entry(i2, j2),
                        ((true, false), (true, true)) | ((false, true), (false, false)) if same_row => cm2.entry(i2, j2),
                        _ => 0,
                    };
                    entries[i * n2 + i2][j * n2 + j2] = value;
                }
            }
        }
    }
    let plus = (0..size).map(|x| parity.is_plus(x / n2) == parity2.is_plus(x % n2)).collect();
    ExchangeMatrix::new(entries)?.with_parity(Parity::new(plus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn seven_node() -> ExchangeMatrix {
        let mut b = vec![vec![0i64; 7]; 7];
        let mut set = |i: usize, j: usize, v: i64| {
            b[i - 1][j - 1] = v;
            b[j - 1][i - 1] = -v;
        };
        set(2, 1, 2);
        set(1, 3, 2);
        for j in 4..=7 {
            set(3, j, 1);
            set(j, 2, 1);
        }
        ExchangeMatrix::new(b).unwrap().with_parity(Parity::from_plus(7, &[1, 2]).unwrap()).unwrap()
    }

    fn a2() -> (CartanMatrix, Parity) {
        let c = CartanMatrix::type_a(2);
        let p = c.bipartition().unwrap();
        (c, p)
    }

    #[test]
    fn seven_node_example_satisfies_conditions() {
        let e = seven_node();
        assert_eq!((e.check_b1(), e.check_b2(), e.check_bb()), (Ok(true), Ok(true), Ok(true)));
        assert_eq!(e.skew_symmetrizer(), &[1; 7]);
    }

    #[test]
    fn b_of_a2() {
        let (c, p) = a2();
        let b = b_of_c(&c, &p).unwrap();
        assert_eq!(b.entries(), &[vec![0, 1], vec![-1, 0]]);
        let mu = mutate_matrix(&b, 0).unwrap();
        assert_eq!(mu.entries(), b.negated().entries());
        assert!(b.check_b1().unwrap() && b.check_b2().unwrap());
    }

    #[test]
    fn b_of_c_keeps_the_symmetrizer() {
        for entries in [vec![vec![2, -1], vec![-2, 2]], vec![vec![2, -1], vec![-3, 2]], vec![vec![2, -2], vec![-2, 2]]] {
            let c = CartanMatrix::new(entries).unwrap();
            let b = b_of_c(&c, &c.bipartition().unwrap()).unwrap();
            assert_eq!(b.skew_symmetrizer(), c.symmetrizer());
            assert!(b.check_b2().unwrap() && b.check_bb().unwrap());
        }
    }

    #[test]
    fn non_bipartite_input_is_rejected() {
        let (c, _) = a2();
        assert_eq!(b_of_c(&c, &Parity::new(vec![true, true])), Err(Error::NotBipartite));
        assert_eq!(seven_node().negated().with_parity(Parity::new(vec![true; 7])).unwrap().check_b1(), Ok(false));
        assert_eq!(ExchangeMatrix::new(vec![vec![0, 1], vec![-1, 0]]).unwrap().check_b1(), Err(Error::NoParity));
    }

    #[test]
    fn square_of_a2() {
        let (c, p) = a2();
        let b = square_product(&c, &p, &c, &p).unwrap();
        assert_eq!(b.size(), 4);
        assert!(b.check_b1().unwrap() && b.check_bb().unwrap() && b.check_b2().unwrap());
        // (++) = index 0, (+-) = 1, (-+) = 2, (--) = 3; arrows (+-)→(--)→(-+)→(++)→(+-)
        assert_eq!(b.entries(), &[vec![0, 1, -1, 0], vec![-1, 0, 0, 1], vec![1, 0, 0, -1], vec![0, -1, 1, 0]]);
        assert_eq!(b.parity().unwrap().plus_nodes(), vec![0, 3]);
    }

    #[test]
    fn square_product_symmetrizer() {
        let c = CartanMatrix::new(vec![vec![2, -1], vec![-2, 2]]).unwrap();
        let a3 = CartanMatrix::type_a(3);
        let b = square_product(&c, &c.bipartition().unwrap(), &a3, &a3.bipartition().unwrap()).unwrap();
        let expect: Vec<i64> = (0..6).map(|x| c.symmetrizer()[x / 3]).collect();
        assert_eq!(b.skew_symmetrizer(), &expect[..]);
        assert!(b.check_b1().unwrap() && b.check_b2().unwrap());
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(matches!(ExchangeMatrix::new(vec![vec![0, 1], vec![1, 0]]), Err(Error::NotSkewSymmetrizable(_))));
        assert!(matches!(ExchangeMatrix::new(vec![vec![1, 0], vec![0, 0]]), Err(Error::NotSkewSymmetrizable(_))));
        let cyc = vec![vec![0, 1, -2], vec![-1, 0, 1], vec![1, -1, 0]];
        assert!(matches!(ExchangeMatrix::new(cyc), Err(Error::NotSkewSymmetrizable(_))));
        assert_eq!(mutate_matrix(&seven_node(), 7), Err(Error::IndexOutOfRange(7)));
    }

    /// Random skew-symmetrizable matrix `S D` (S skew-symmetric) whose
    /// nonzero entries run between the two classes of a random split.
    pub(crate) fn parity_consistent() -> impl Strategy<Value = ExchangeMatrix> {
        (2usize..=6)
            .prop_flat_map(|n| (Just(n), prop::collection::vec(any::<bool>(), n), prop::collection::vec(1i64..=2, n), prop::collection::vec(-2i64..=2, n * n)))
            .prop_map(|(n, plus, d, s)| {
                let mut b = vec![vec![0; n]; n];
                for i in 0..n {
                    for j in 0..i {
                        if plus[i] != plus[j] {
                            b[i][j] = s[i * n + j] * d[j];
                            b[j][i] = -s[i * n + j] * d[i];
                        }
                    }
                }
                ExchangeMatrix::new(b).unwrap().with_parity(Parity::new(plus)).unwrap()
            })
    }

    fn any_skew() -> impl Strategy<Value = ExchangeMatrix> {
        (2usize..=5).prop_flat_map(|n| (Just(n), prop::collection::vec(1i64..=3, n), prop::collection::vec(-2i64..=2, n * n))).prop_map(|(n, d, s)| {
            let mut b = vec![vec![0; n]; n];
            for i in 0..n {
                for j in 0..i {
                    b[i][j] = s[i * n + j] * d[j];
                    b[j][i] = -s[i * n + j] * d[i];
                }
            }
            ExchangeMatrix::new(b).unwrap()
        })
    }

    proptest! {
        #[test]
        fn mutation_is_an_involution(e in any_skew(), k in 0usize..5) {
            let k = k % e.size();
            let once = mutate_matrix(&e, k).unwrap();
            prop_assert_eq!(once.skew_symmetrizer(), e.skew_symmetrizer());
            // the carried symmetrizer still skew-symmetrizes
            let d = once.skew_symmetrizer();
            for i in 0..e.size() {
                for j in 0..e.size() {
                    prop_assert_eq!(d[i] * once.entry(i, j), -d[j] * once.entry(j, i));
                }
                prop_assert_eq!(once.entry(k, i), -e.entry(k, i));
            }
            prop_assert_eq!(mutate_matrix(&once, k).unwrap(), e);
        }

        #[test]
        fn b2_and_bb_agree(e in parity_consistent()) {
            prop_assert!(e.check_b1().unwrap());
            prop_assert_eq!(e.check_b2().unwrap(), e.check_bb().unwrap());
        }

        #[test]
        fn composed_mutation_order_is_irrelevant(e in parity_consistent(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut nodes = e.parity().unwrap().plus_nodes();
            let apply = |nodes: &[usize]| nodes.iter().fold(e.clone(), |m, &k| mutate_matrix(&m, k).unwrap());
            let first = apply(&nodes);
            nodes.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(apply(&nodes), first);
        }
    }
}
