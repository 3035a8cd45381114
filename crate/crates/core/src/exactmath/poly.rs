use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::Assignment;
use crate::error::{Error, Result};

/// Exponent vector over the generator universe. Trailing zeros are trimmed
/// so vectors of different declared lengths compare equal when they agree;
/// this is what lets polynomials over different universes mix freely.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<i32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn new(mut exps: Vec<i32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial(exps)
    }

    pub fn var(i: usize, e: i32) -> Self {
        let mut v = vec![0; i + 1];
        v[i] = e;
        Monomial::new(v)
    }

    pub fn exp(&self, i: usize) -> i32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn exps(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn zip_with(&self, other: &Monomial, f: impl Fn(i32, i32) -> i32) -> Monomial {
        let n = self.0.len().max(other.0.len());
        Monomial::new((0..n).map(|i| f(self.exp(i), other.exp(i))).collect())
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn componentwise_min(&self, other: &Monomial) -> Monomial {
        self.zip_with(other, i32::min)
    }

    pub fn componentwise_max(&self, other: &Monomial) -> Monomial {
        self.zip_with(other, i32::max)
    }

    pub fn inv(&self) -> Monomial {
        Monomial(self.0.iter().map(|e| -e).collect())
    }

    pub fn scale(&self, k: i32) -> Monomial {
        Monomial::new(self.0.iter().map(|e| e * k).collect())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&e| e >= 0)
    }

    /// Componentwise `self <= other`, i.e. `self` divides `other` in the
    /// polynomial ring.
    pub fn divides(&self, other: &Monomial) -> bool {
        let n = self.0.len().max(other.0.len());
        (0..n).all(|i| self.exp(i) <= other.exp(i))
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic order with x0 > x1 > ... on padded vectors.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.0.len().max(other.0.len());
        for i in 0..n {
            match self.exp(i).cmp(&other.exp(i)) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Sparse Laurent polynomial with rational coefficients. Zero coefficients
/// are never stored.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        LaurentPoly::monomial(Monomial::one(), c)
    }

    pub fn from_int(c: i64) -> Self {
        LaurentPoly::constant(BigRational::from_integer(c.into()))
    }

    pub fn var(i: usize) -> Self {
        LaurentPoly::monomial(Monomial::var(i, 1), BigRational::one())
    }

    pub fn monomial(m: Monomial, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LaurentPoly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, BigRational)>>(it: I) -> Self {
        let mut p = LaurentPoly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().next().is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    /// Lex-leading term.
    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> BigRational {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, c: &BigRational) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn shift(&self, m: &Monomial) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> LaurentPoly {
        let mut acc = LaurentPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Componentwise minimum exponent over all terms (the monomial content).
    pub fn min_exponents(&self) -> Monomial {
        let mut it = self.terms.keys();
        let first = match it.next() {
            Some(m) => m.clone(),
            None => return Monomial::one(),
        };
        it.fold(first, |acc, m| acc.componentwise_min(m))
    }

    pub fn max_exponents(&self) -> Monomial {
        let mut it = self.terms.keys();
        let first = match it.next() {
            Some(m) => m.clone(),
            None => return Monomial::one(),
        };
        it.fold(first, |acc, m| acc.componentwise_max(m))
    }

    pub fn num_vars(&self) -> usize {
        self.terms.keys().map(Monomial::len).max().unwrap_or(0)
    }

    /// Highest generator index with a nonzero exponent somewhere.
    pub fn max_var(&self) -> Option<usize> {
        let n = self.num_vars();
        (0..n).rev().find(|&i| self.terms.keys().any(|m| m.exp(i) != 0))
    }

    pub fn degree_in(&self, v: usize) -> i32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    /// Splits into coefficients of powers of generator `v`.
    pub fn coefficients_in(&self, v: usize) -> BTreeMap<i32, LaurentPoly> {
        let mut out: BTreeMap<i32, LaurentPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            let rest = m.div(&Monomial::var(v, e));
            out.entry(e).or_default().add_term(rest, c.clone());
        }
        out
    }

    pub fn coefficient_in(&self, v: usize, e: i32) -> LaurentPoly {
        LaurentPoly::from_terms(self.terms.iter().filter(|(m, _)| m.exp(v) == e).map(|(m, c)| (m.div(&Monomial::var(v, e)), c.clone())))
    }

    /// Positive rational `c` such that `self / c` has coprime integer
    /// coefficients.
    pub fn integer_content(&self) -> BigRational {
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        if num_gcd.is_zero() {
            return BigRational::one();
        }
        BigRational::new(num_gcd, den_lcm)
    }

    pub fn all_coefficients_positive(&self) -> bool {
        self.terms.values().all(|c| c.is_positive())
    }

    pub fn all_exponents_nonnegative(&self) -> bool {
        self.terms.keys().all(Monomial::is_nonnegative)
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<BigRational> {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let x = a.get(i).ok_or(Error::IncompleteAssignment(i))?;
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                } else {
                    if x.is_zero() {
                        return Err(Error::EvalDivisionByZero);
                    }
                    t /= num_traits::pow(x.clone(), (-e) as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Splits `self = mono * poly` with `poly` free of monomial factors and
    /// all exponents nonnegative.
    pub fn split_monomial(&self) -> (Monomial, LaurentPoly) {
        let m = self.min_exponents();
        (m.clone(), self.shift(&m.inv()))
    }
}

/// Exact quotient `p / q` in the Laurent ring, or `None` when `q` does not
/// divide `p`. Monomials are units, so both sides are normalized to
/// polynomials without monomial factors and divided there.
pub fn laurent_divide_exact(p: &LaurentPoly, q: &LaurentPoly) -> Result<Option<LaurentPoly>> {
    if q.is_zero() {
        return Err(Error::DivisionByZeroPoly);
    }
    if p.is_zero() {
        return Ok(Some(LaurentPoly::zero()));
    }
    let (mp, pp) = p.split_monomial();
    let (mq, qq) = q.split_monomial();
    Ok(poly_divide_exact(&pp, &qq).map(|h| h.shift(&mp.div(&mq))))
}

/// Exact division of polynomials with nonnegative exponents; `None` if the
/// division leaves a remainder.
pub(crate) fn poly_divide_exact(p: &LaurentPoly, q: &LaurentPoly) -> Option<LaurentPoly> {
    let (lm_q, lc_q) = q.leading()?;
    let (lm_q, lc_q) = (lm_q.clone(), lc_q.clone());
    if q.num_terms() == 1 {
        let inv = lc_q.recip();
        let minv = lm_q.inv();
        let out = LaurentPoly { terms: p.terms.iter().map(|(m, c)| (m.mul(&minv), c * &inv)).collect() };
        return out.all_exponents_nonnegative().then_some(out);
    }
    let mut rem = p.clone();
    let mut quot = LaurentPoly::zero();
    while let Some((lm_r, lc_r)) = rem.leading() {
        if !lm_q.divides(lm_r) {
            return None;
        }
        let m = lm_r.div(&lm_q);
        let c = lc_r / &lc_q;
        for (qm, qc) in &q.terms {
            rem.add_term(qm.mul(&m), -(qc * &c));
        }
        quot.add_term(m, c);
    }
    Some(quot)
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let (mut big, small) = if self.terms.len() >= rhs.terms.len() { (self.clone(), rhs) } else { (rhs.clone(), self) };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $f(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let mut parts = Vec::new();
            if !a.is_one() || m.is_one() {
                parts.push(a.to_string());
            }
            for (i, &e) in m.exps().iter().enumerate() {
                match e {
                    0 => {}
                    1 => parts.push(format!("x{}", i + 1)),
                    _ => parts.push(format!("x{}^{}", i + 1, e)),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> LaurentPoly {
        LaurentPoly::var(i)
    }
    fn c(v: i64) -> LaurentPoly {
        LaurentPoly::from_int(v)
    }

    #[test]
    fn difference_of_squares() {
        let p = &(&x(0) + &c(1)) * &(&x(0) - &c(1));
        assert_eq!(p, &x(0).pow(2) - &c(1));
    }

    #[test]
    fn laurent_cancellation() {
        let xinv = LaurentPoly::monomial(Monomial::var(0, -1), BigRational::one());
        assert!((&xinv * &x(0)).is_one());
    }

    #[test]
    fn two_variable_expansion() {
        let p = &(&c(1) + &x(0)) * &(&c(1) + &x(1));
        let expect = &(&(&c(1) + &x(0)) + &x(1)) + &(&x(0) * &x(1));
        assert_eq!(p, expect);
        assert_eq!(p.num_terms(), 4);
    }

    #[test]
    fn exact_division_cases() {
        let p = &x(0).pow(2) - &c(1);
        let q = &x(0) - &c(1);
        assert_eq!(laurent_divide_exact(&p, &q).unwrap(), Some(&x(0) + &c(1)));

        // (x + y) / x = 1 + x^-1 y
        let p = &x(0) + &x(1);
        let expect = &c(1) + &LaurentPoly::monomial(Monomial::new(vec![-1, 1]), BigRational::one());
        assert_eq!(laurent_divide_exact(&p, &x(0)).unwrap(), Some(expect));

        let p = &x(0) + &c(1);
        let q = &x(0) + &c(2);
        assert_eq!(laurent_divide_exact(&p, &q).unwrap(), None);

        assert_eq!(laurent_divide_exact(&p, &LaurentPoly::zero()), Err(Error::DivisionByZeroPoly));
    }

    #[test]
    fn monomial_order_is_lex() {
        let a = Monomial::new(vec![1, 0]);
        let b = Monomial::new(vec![0, 5]);
        assert!(a > b);
        assert!(Monomial::new(vec![1]) > Monomial::new(vec![1, -1]));
        assert_eq!(Monomial::new(vec![2, 0, 0]), Monomial::new(vec![2]));
    }

    #[test]
    fn integer_content_clears_denominators() {
        let p = LaurentPoly::from_terms([(Monomial::one(), BigRational::new(2.into(), 3.into())), (Monomial::var(0, 1), BigRational::new(4.into(), 9.into()))]);
        assert_eq!(p.integer_content(), BigRational::new(2.into(), 9.into()));
    }
}
