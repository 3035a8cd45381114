use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};

use super::gcd::laurent_gcd;
use super::poly::{laurent_divide_exact, LaurentPoly, Monomial};
use super::Assignment;
use crate::error::{Error, Result};

/// Quotient of Laurent polynomials.
///
/// Canonical form: the denominator is a polynomial without monomial factor,
/// with coprime integer coefficients and positive leading coefficient; all
/// scalars and monomials live in the numerator, and numerator and
/// denominator share no polynomial factor.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RationalFunction {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZeroPoly);
        }
        Ok(Self::reduce(num, den))
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        RationalFunction { num: p, den: LaurentPoly::one() }
    }

    pub fn one() -> Self {
        Self::from_poly(LaurentPoly::one())
    }

    pub fn var(i: usize) -> Self {
        Self::from_poly(LaurentPoly::var(i))
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_poly(LaurentPoly::constant(c))
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn reduce(num: LaurentPoly, den: LaurentPoly) -> Self {
        if num.is_zero() {
            return RationalFunction { num, den: LaurentPoly::one() };
        }
        let (m_den, den) = den.split_monomial();
        let num = num.shift(&m_den.inv());
        // exact division is much cheaper than a gcd and is the common case
        // for cluster variables
        if !den.is_one() {
            if let Ok(Some(q)) = laurent_divide_exact(&num, &den) {
                return RationalFunction { num: q, den: LaurentPoly::one() };
            }
        }
        let g = laurent_gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            let n = laurent_divide_exact(&num, &g).unwrap().expect("gcd divides numerator");
            let d = laurent_divide_exact(&den, &g).unwrap().expect("gcd divides denominator");
            (n, d)
        };
        // den may have picked up a monomial from the Laurent quotient
        let (m2, den) = den.split_monomial();
        let num = num.shift(&m2.inv());
        let mut c = den.integer_content();
        if den.leading_coeff().is_negative() {
            c = -c;
        }
        let inv = c.recip();
        RationalFunction { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::reduce(&self.num + &o.num, self.den.clone());
        }
        Self::reduce(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }

    pub fn neg(&self) -> Self {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::reduce(&self.num * &o.num, &self.den * &o.den)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.num.is_zero() {
            return Err(Error::InverseOfZero);
        }
        Ok(Self::reduce(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    /// Exact equality by cross-multiplication.
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

    /// Laurent polynomial value, if the denominator divides the numerator.
    pub fn as_laurent(&self) -> Option<LaurentPoly> {
        laurent_divide_exact(&self.num, &self.den).ok().flatten()
    }

    pub fn is_laurent(&self) -> bool {
        self.as_laurent().is_some()
    }

    pub fn monomial(m: Monomial) -> Self {
        Self::from_poly(LaurentPoly::monomial(m, BigRational::one()))
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> RationalFunction {
        RationalFunction::var(i)
    }
    fn c(v: i64) -> RationalFunction {
        RationalFunction::constant(BigRational::from_integer(v.into()))
    }

    #[test]
    fn fraction_sum_reduces() {
        // 1/x + 1/y = (x + y)/(x y)
        let s = x(0).inv().unwrap().add(&x(1).inv().unwrap());
        let expect = x(0).add(&x(1)).div(&x(0).mul(&x(1))).unwrap();
        assert!(s.eq_exact(&expect));
        assert_eq!(s, expect);
    }

    #[test]
    fn inverse_swaps() {
        let f = x(0).div(&c(1).add(&x(1))).unwrap();
        let g = f.inv().unwrap();
        assert!(g.eq_exact(&c(1).add(&x(1)).div(&x(0)).unwrap()));
        assert!(f.mul(&g).eq_exact(&RationalFunction::one()));
        assert_eq!(RationalFunction::from_poly(LaurentPoly::zero()).inv(), Err(Error::InverseOfZero));
    }

    #[test]
    fn unreduced_inputs_cancel() {
        let num = &LaurentPoly::var(0).pow(2) - &LaurentPoly::one();
        let den = &LaurentPoly::var(0) - &LaurentPoly::one();
        let f = RationalFunction::new(num, den).unwrap();
        assert!(f.eq_exact(&x(0).add(&c(1))));
        assert!(f.den().is_one());
        assert!(!x(0).eq_exact(&x(0).inv().unwrap()));
    }

    #[test]
    fn evaluation() {
        let f = c(1).add(&x(1)).div(&x(0)).unwrap();
        let a = Assignment::from_ints(&[2, 3]);
        assert_eq!(f.evaluate(&a).unwrap(), BigRational::from_integer(2.into()));
        let g = x(0).sub(&c(1)).inv().unwrap();
        assert_eq!(g.evaluate(&Assignment::from_ints(&[1])), Err(Error::EvalDivisionByZero));
        let h = x(0).inv().unwrap();
        let half = Assignment::new(vec![BigRational::new(1.into(), 2.into())]);
        assert_eq!(h.evaluate(&half).unwrap(), BigRational::from_integer(2.into()));
    }
}
