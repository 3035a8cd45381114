//! Generalized Cartan matrices: validation, symmetrizer, classification and
//! the bipartite double.

use std::collections::VecDeque;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;

use crate::error::{Error, Result};

/// Sign assignment `I = I+ ⊔ I-`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Parity {
    plus: Vec<bool>,
}

impl Parity {
    pub fn new(plus: Vec<bool>) -> Self {
        Parity { plus }
    }

    /// Builds the split from the 0-based indices of `I+`.
    pub fn from_plus(n: usize, plus_nodes: &[usize]) -> Result<Self> {
        let mut plus = vec![false; n];
        for &i in plus_nodes {
            *plus.get_mut(i).ok_or(Error::IndexOutOfRange(i))? = true;
        }
        Ok(Parity { plus })
    }

    pub fn len(&self) -> usize {
        self.plus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plus.is_empty()
    }

    pub fn is_plus(&self, i: usize) -> bool {
        self.plus[i]
    }

    /// `+1` on `I+`, `-1` on `I-`.
    pub fn sign(&self, i: usize) -> i64 {
        if self.plus[i] {
            1
        } else {
            -1
        }
    }

    pub fn nodes(&self, sign: i64) -> Vec<usize> {
        (0..self.plus.len()).filter(|&i| self.sign(i) == sign).collect()
    }

    pub fn plus_nodes(&self) -> Vec<usize> {
        self.nodes(1)
    }

    pub fn minus_nodes(&self) -> Vec<usize> {
        self.nodes(-1)
    }

    pub fn flipped(&self) -> Self {
        Parity { plus: self.plus.iter().map(|p| !p).collect() }
    }
}

impl fmt::Debug for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one_based = |v: Vec<usize>| v.into_iter().map(|i| i + 1).collect::<Vec<_>>();
        write!(f, "+{:?} -{:?}", one_based(self.plus_nodes()), one_based(self.minus_nodes()))
    }
}

/// A validated symmetrizable generalized Cartan matrix together with its
/// minimal symmetrizer `d` (gcd 1), `t = lcm(d)` and `t_a = t / d_a`.
#[derive(Clone, PartialEq, Eq)]
pub struct CartanMatrix {
    entries: Vec<Vec<i64>>,
    d: Vec<i64>,
    t: i64,
    t_a: Vec<i64>,
}

impl CartanMatrix {
    pub fn new(entries: Vec<Vec<i64>>) -> Result<Self> {
        let r = entries.len();
        if r == 0 {
            return Err(Error::NotGeneralizedCartan("empty matrix".into()));
        }
        for (i, row) in entries.iter().enumerate() {
            if row.len() != r {
                return Err(Error::NotGeneralizedCartan(format!("row {} has {} entries, expected {r}", i + 1, row.len())));
            }
        }
        for i in 0..r {
            if entries[i][i] != 2 {
                return Err(Error::NotGeneralizedCartan(format!("C[{0}][{0}] = {1} != 2", i + 1, entries[i][i])));
            }
            for j in 0..r {
                if i == j {
                    continue;
                }
                if entries[i][j] > 0 {
                    return Err(Error::NotGeneralizedCartan(format!("C[{}][{}] = {} > 0", i + 1, j + 1, entries[i][j])));
                }
                if (entries[i][j] == 0) != (entries[j][i] == 0) {
                    return Err(Error::NotGeneralizedCartan(format!("C[{}][{}] and C[{}][{}] are not simultaneously zero", i + 1, j + 1, j + 1, i + 1)));
                }
            }
        }
        let d = balancing_diagonal(&entries, 1)?;
        let t = d.iter().fold(1, |acc, &x| acc.lcm(&x));
        let t_a = d.iter().map(|&x| t / x).collect();
        Ok(CartanMatrix { entries, d, t, t_a })
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    pub fn symmetrizer(&self) -> &[i64] {
        &self.d
    }

    pub fn d(&self, a: usize) -> i64 {
        self.d[a]
    }

    pub fn max_d(&self) -> i64 {
        self.d.iter().copied().max().unwrap_or(1)
    }

    pub fn t(&self) -> i64 {
        self.t
    }

    /// `t_a = t / d_a`.
    pub fn t_of(&self, a: usize) -> i64 {
        self.t_a[a]
    }

    pub fn t_all(&self) -> &[i64] {
        &self.t_a
    }

    /// `a ∼ b`, i.e. `C_ab < 0`.
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        a != b && self.entries[a][b] < 0
    }

    pub fn neighbors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.rank()).filter(move |&b| self.adjacent(a, b))
    }

    /// If `C_ij < -1` then `d_i = -C_ji = 1`.
    pub fn is_tamely_laced(&self) -> bool {
        let r = self.rank();
        (0..r).all(|i| (0..r).all(|j| self.entries[i][j] >= -1 || (self.d[i] == 1 && self.entries[j][i] == -1)))
    }

    pub fn require_tamely_laced(&self) -> Result<()> {
        if self.is_tamely_laced() {
            Ok(())
        } else {
            Err(Error::NotTamelyLaced)
        }
    }

    pub fn is_simply_laced(&self) -> bool {
        let r = self.rank();
        (0..r).all(|i| (0..r).all(|j| i == j || self.entries[i][j] >= -1))
    }

    pub fn is_connected(&self) -> bool {
        components(self).iter().all(|&c| c == 0)
    }

    /// Two-colouring of the Dynkin diagram, the lowest index of each
    /// component coloured `+`. `None` if there is an odd cycle.
    pub fn bipartition(&self) -> Option<Parity> {
        let r = self.rank();
        let mut sign: Vec<Option<bool>> = vec![None; r];
        for start in 0..r {
            if sign[start].is_some() {
                continue;
            }
            sign[start] = Some(true);
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                let si = sign[i].unwrap();
                for j in self.neighbors(i) {
                    match sign[j] {
                        None => {
                            sign[j] = Some(!si);
                            queue.push_back(j);
                        }
                        Some(sj) if sj == si => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(Parity::new(sign.into_iter().map(Option::unwrap).collect()))
    }

    /// The bipartite double `C#` on indices `i+ = i`, `i- = r + i`, together
    /// with the index map `a ↦ (a+, a-)`. Diagonal pairs `(i+, i-)` get no
    /// edge.
    pub fn bipartite_double(&self) -> Result<(CartanMatrix, Vec<(usize, usize)>)> {
        if !self.is_simply_laced() {
            return Err(Error::NotSimplyLaced);
        }
        if self.bipartition().is_some() {
            return Err(Error::AlreadyBipartite);
        }
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let r = self.rank();
        let mut e = vec![vec![0; 2 * r]; 2 * r];
        for i in 0..r {
            e[i][i] = 2;
            e[r + i][r + i] = 2;
            for j in 0..r {
                if i != j {
                    e[i][r + j] = self.entries[i][j];
                    e[r + i][j] = self.entries[i][j];
                }
            }
        }
        let map = (0..r).map(|a| (a, r + a)).collect();
        Ok((CartanMatrix::new(e)?, map))
    }

    /// Simultaneous row/column permutation: entry `(i, j)` of the result is
    /// `C[perm[i]][perm[j]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<CartanMatrix> {
        let r = self.rank();
        let e = (0..r).map(|i| (0..r).map(|j| self.entries[perm[i]][perm[j]]).collect()).collect();
        CartanMatrix::new(e)
    }

    /// Type `A_n` with the standard numbering.
    pub fn type_a(n: usize) -> CartanMatrix {
        let e = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match i.abs_diff(j) {
                        0 => 2,
                        1 => -1,
                        _ => 0,
                    })
                    .collect()
            })
            .collect();
        CartanMatrix::new(e).expect("type A is a Cartan matrix")
    }
}

impl fmt::Debug for CartanMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CartanMatrix").field("entries", &self.entries).field("d", &self.d).field("t", &self.t).finish()
    }
}

/// Component label of each node (label = lowest index in the component).
fn components(cm: &CartanMatrix) -> Vec<usize> {
    let r = cm.rank();
    let mut label = vec![usize::MAX; r];
    for start in 0..r {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = start;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for j in cm.neighbors(i) {
                if label[j] == usize::MAX {
                    label[j] = start;
                    queue.push_back(j);
                }
            }
        }
    }
    label
}

/// Propagates `d_j / d_i = C_ij / C_ji` over each component, clears
/// denominators and divides out the gcd.
/// Minimal positive `d` with `d_i c_ij = sign * d_j c_ji`, normalised to gcd 1
/// on each connected component.
pub(crate) fn balancing_diagonal(c: &[Vec<i64>], sign: i64) -> Result<Vec<i64>> {
    let r = c.len();
    let mut ratio: Vec<Option<Ratio<i64>>> = vec![None; r];
    let mut d = vec![0i64; r];
    for start in 0..r {
        if ratio[start].is_some() {
            continue;
        }
        ratio[start] = Some(Ratio::from_integer(1));
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let di = ratio[i].unwrap();
            for j in 0..r {
                if i == j || c[i][j] == 0 {
                    continue;
                }
                let dj = di * Ratio::new(c[i][j], sign * c[j][i]);
                match ratio[j] {
                    None => {
                        ratio[j] = Some(dj);
                        comp.push(j);
                        queue.push_back(j);
                    }
                    Some(old) if old != dj => {
                        return Err(Error::NotSymmetrizable(format!("inconsistent ratio around a cycle through nodes {} and {}", i + 1, j + 1)));
                    }
                    Some(_) => {}
                }
            }
        }
        let den = comp.iter().fold(1i64, |acc, &i| acc.lcm(ratio[i].unwrap().denom()));
        let ints: Vec<i64> = comp.iter().map(|&i| (ratio[i].unwrap() * den).to_integer()).collect();
        let g = ints.iter().fold(0i64, |acc, &x| acc.gcd(&x));
        for (&i, &x) in comp.iter().zip(&ints) {
            d[i] = x / g;
        }
    }
    Ok(d)
}
