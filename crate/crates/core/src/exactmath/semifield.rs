use std::fmt;

use num_rational::BigRational;
use num_traits::One;

use super::gcd::laurent_gcd;
use super::poly::{laurent_divide_exact, LaurentPoly, Monomial};
use super::Assignment;
use crate::error::{Error, Result};

/// Element of the universal semifield: a ratio of polynomials with strictly
/// positive coefficients and nonnegative exponents. There is no subtraction,
/// so positivity is preserved by every operation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SemifieldElement {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl SemifieldElement {
    /// Fails if either side is zero or has a nonpositive coefficient or a
    /// negative exponent.
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self> {
        for p in [&num, &den] {
            if p.is_zero() || !p.all_coefficients_positive() || !p.all_exponents_nonnegative() {
                return Err(Error::Parse(format!("not subtraction-free: {p}")));
            }
        }
        Ok(Self::reduce(num, den))
    }

    pub fn one() -> Self {
        SemifieldElement { num: LaurentPoly::one(), den: LaurentPoly::one() }
    }

    pub fn var(i: usize) -> Self {
        SemifieldElement { num: LaurentPoly::var(i), den: LaurentPoly::one() }
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    fn reduce(num: LaurentPoly, den: LaurentPoly) -> Self {
        let common = num.min_exponents().componentwise_min(&den.min_exponents());
        let (num, den) = if common.is_one() {
            (num, den)
        } else {
            let inv = common.inv();
            (num.shift(&inv), den.shift(&inv))
        };
        let (num, den) = cancel_positive(num, den);
        let inv = den.integer_content().recip();
        let num = num.scale(&inv);
        let den = den.scale(&inv);
        let out = SemifieldElement { num, den };
        debug_assert!(out.is_valid());
        out
    }

    fn is_valid(&self) -> bool {
        [&self.num, &self.den].iter().all(|p| !p.is_zero() && p.all_coefficients_positive() && p.all_exponents_nonnegative())
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::reduce(&self.num + &o.num, self.den.clone());
        }
        Self::reduce(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::reduce(&self.num * &o.num, &self.den * &o.den)
    }

    pub fn inv(&self) -> Self {
        let inv = self.num.integer_content().recip();
        SemifieldElement { num: self.den.scale(&inv), den: self.num.scale(&inv) }
    }

    /// `1 + self`.
    pub fn one_plus(&self) -> Self {
        Self::reduce(&self.den + &self.num, self.den.clone())
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let k = e.unsigned_abs() as u32;
        SemifieldElement { num: base.num.pow(k), den: base.den.pow(k) }
    }

    pub fn eq_exact(&self, o: &Self) -> bool {
        &self.num * &o.den == &o.num * &self.den
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<BigRational> {
        let d = self.den.evaluate(a)?;
        if d == num_traits::Zero::zero() {
            return Err(Error::EvalDivisionByZero);
        }
        Ok(self.num.evaluate(a)? / d)
    }

    pub fn monomial(m: &Monomial) -> Self {
        let pos = Monomial::new(m.exps().iter().map(|&e| e.max(0)).collect());
        let neg = Monomial::new(m.exps().iter().map(|&e| (-e).max(0)).collect());
        SemifieldElement { num: LaurentPoly::monomial(pos, BigRational::one()), den: LaurentPoly::monomial(neg, BigRational::one()) }
    }
}

/// Cancels the polynomial gcd, unless that would expose a negative
/// coefficient (e.g. (x^3 + 1)/(x + 1)); then the input pair is kept.
fn cancel_positive(num: LaurentPoly, den: LaurentPoly) -> (LaurentPoly, LaurentPoly) {
    let g = laurent_gcd(&num, &den);
    if g.is_one() {
        return (num, den);
    }
    let n = laurent_divide_exact(&num, &g).unwrap().expect("gcd divides numerator");
    let d = laurent_divide_exact(&den, &g).unwrap().expect("gcd divides denominator");
    let ok = [&n, &d].iter().all(|p| p.all_coefficients_positive() && p.all_exponents_nonnegative());
    if ok {
        (n, d)
    } else {
        (num, den)
    }
}

impl fmt::Display for SemifieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for SemifieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y(i: usize) -> SemifieldElement {
        SemifieldElement::var(i)
    }

    #[test]
    fn inverse_and_one_plus() {
        let inv = y(0).inv();
        assert!(inv.num().is_one());
        assert_eq!(inv.den(), &LaurentPoly::var(0));

        let op = y(0).one_plus();
        assert_eq!(op.num(), &(&LaurentPoly::one() + &LaurentPoly::var(0)));
        assert!(op.den().is_one());

        let opi = y(0).inv().one_plus();
        assert_eq!(opi.num(), &(&LaurentPoly::var(0) + &LaurentPoly::one()));
        assert_eq!(opi.den(), &LaurentPoly::var(0));
    }

    #[test]
    fn belt_coefficient_cancels() {
        // y2 * y1/(1+y1) then 1 + inverse and back: (1+y1+y1y2)/(y1 y2)
        let y21 = y(1).mul(&y(0).inv().one_plus().inv());
        let s = y21.inv().one_plus();
        let expect_num = &(&LaurentPoly::one() + &LaurentPoly::var(0)) + &(&LaurentPoly::var(0) * &LaurentPoly::var(1));
        assert_eq!(s.num(), &expect_num);
        assert_eq!(s.den(), &(&LaurentPoly::var(0) * &LaurentPoly::var(1)));
    }

    #[test]
    fn keeps_positive_representation() {
        let x = LaurentPoly::var(0);
        let num = &x.pow(3) + &LaurentPoly::one();
        let den = &x + &LaurentPoly::one();
        let e = SemifieldElement::new(num.clone(), den.clone()).unwrap();
        assert_eq!(e.num(), &num);
        assert_eq!(e.den(), &den);
        assert!(SemifieldElement::new(&x - &LaurentPoly::one(), LaurentPoly::one()).is_err());
    }

    #[test]
    fn equality_is_cross_multiplication() {
        assert!(!y(0).eq_exact(&y(0).inv()));
        let a = y(0).mul(&y(1)).mul(&y(1).inv());
        assert!(a.eq_exact(&y(0)));
    }
}
