//! Exact arithmetic: big rationals, sparse Laurent polynomials, rational
//! functions and subtraction-free semifield elements.

pub mod dump;
mod gcd;
pub mod poly;
pub mod ratfunc;
pub mod semifield;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

pub use gcd::laurent_gcd;
pub use poly::{laurent_divide_exact, LaurentPoly, Monomial};
pub use ratfunc::RationalFunction;
pub use semifield::SemifieldElement;

use crate::error::{Error, Result};

/// Default numerator/denominator size for random data.
pub const DEFAULT_BITS: u32 = 8;

/// Values of the generators, indexed by generator.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment(Vec<BigRational>);

impl Assignment {
    pub fn new(values: Vec<BigRational>) -> Self {
        Assignment(values)
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Assignment(values.iter().map(|&v| BigRational::from_integer(v.into())).collect())
    }

    pub fn get(&self, i: usize) -> Option<&BigRational> {
        self.0.get(i)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, bits: u32) -> Self {
        Assignment((0..n).map(|_| random_nonzero_rational(rng, bits)).collect())
    }
}

/// Uniform numerator in `[-2^bits, 2^bits] \ {0}`, denominator in `[1, 2^bits]`.
/// `bits` is at most 62.
pub fn random_nonzero_rational<R: Rng + ?Sized>(rng: &mut R, bits: u32) -> BigRational {
    assert!(bits <= 62, "at most 62 bits");
    let bound = 1i64 << bits;
    let num = loop {
        let n = rng.gen_range(-bound..=bound);
        if n != 0 {
            break n;
        }
    };
    let den = rng.gen_range(1..=bound);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Strictly positive variant, used where the data must stay in a semifield.
pub fn random_positive_rational<R: Rng + ?Sized>(rng: &mut R, bits: u32) -> BigRational {
    random_nonzero_rational(rng, bits).abs()
}

/// Always `p/q`, also for integers.
pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// The arithmetic the recurrences need: multiplication, inversion and
/// subtraction-free addition. Implemented by exact numbers, rational
/// functions and semifield elements alike.
pub trait Scalar: Clone + fmt::Debug {
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// `None` when the value is zero.
    fn try_inv(&self) -> Option<Self>;
    fn is_zero(&self) -> bool;
    /// Exact equality.
    fn same(&self, o: &Self) -> bool;
    /// Text form for reports and dumps.
    fn render(&self) -> String;

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    fn one_plus(&self) -> Self {
        Self::one().add(self)
    }
}

/// Evaluation homomorphism into Q.
pub trait Evaluate {
    fn evaluate(&self, a: &Assignment) -> Result<BigRational>;
}

impl Scalar for BigRational {
    fn one() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn try_inv(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn same(&self, o: &Self) -> bool {
        self == o
    }
    fn render(&self) -> String {
        format_rational(self)
    }
    fn pow(&self, e: u32) -> Self {
        num_traits::pow(self.clone(), e as usize)
    }
}

impl Evaluate for BigRational {
    fn evaluate(&self, _: &Assignment) -> Result<BigRational> {
        Ok(self.clone())
    }
}

impl Scalar for RationalFunction {
    fn one() -> Self {
        RationalFunction::one()
    }
    fn add(&self, o: &Self) -> Self {
        RationalFunction::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        RationalFunction::mul(self, o)
    }
    fn try_inv(&self) -> Option<Self> {
        self.inv().ok()
    }
    fn is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
    fn same(&self, o: &Self) -> bool {
        self.eq_exact(o)
    }
    fn render(&self) -> String {
        self.to_string()
    }
    fn pow(&self, e: u32) -> Self {
        RationalFunction::new(self.num().pow(e), self.den().pow(e)).expect("nonzero denominator")
    }
}

impl Evaluate for RationalFunction {
    fn evaluate(&self, a: &Assignment) -> Result<BigRational> {
        RationalFunction::evaluate(self, a)
    }
}

impl Scalar for SemifieldElement {
    fn one() -> Self {
        SemifieldElement::one()
    }
    fn add(&self, o: &Self) -> Self {
        SemifieldElement::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        SemifieldElement::mul(self, o)
    }
    fn try_inv(&self) -> Option<Self> {
        Some(self.inv())
    }
    fn is_zero(&self) -> bool {
        false
    }
    fn same(&self, o: &Self) -> bool {
        self.eq_exact(o)
    }
    fn render(&self) -> String {
        self.to_string()
    }
    fn pow(&self, e: u32) -> Self {
        SemifieldElement::pow(self, e as i64)
    }
    fn one_plus(&self) -> Self {
        SemifieldElement::one_plus(self)
    }
}

impl Evaluate for SemifieldElement {
    fn evaluate(&self, a: &Assignment) -> Result<BigRational> {
        SemifieldElement::evaluate(self, a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_rationals_are_reproducible_and_nonzero() {
        let mut a = ChaCha8Rng::seed_from_u64(11);
        let mut b = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let p = random_nonzero_rational(&mut a, DEFAULT_BITS);
            assert_eq!(p, random_nonzero_rational(&mut b, DEFAULT_BITS));
            assert!(!Zero::is_zero(&p));
            assert!(p.numer().abs() <= BigInt::from(256));
            assert!(p.denom() <= &BigInt::from(256));
        }
    }

    #[test]
    fn rational_text_roundtrip() {
        let q = BigRational::new((-6).into(), 4.into());
        assert_eq!(format_rational(&q), "-3/2");
        assert_eq!(parse_rational("-3/2").unwrap(), q);
        assert_eq!(parse_rational("5").unwrap(), BigRational::from_integer(5.into()));
        assert!(parse_rational("1/0").is_err());
    }

    fn poly3() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec(((-2i32..3, -2i32..3, 0i32..2), -5i64..6), 0..5)
            .prop_map(|ts| LaurentPoly::from_terms(ts.into_iter().map(|((a, b, c), k)| (Monomial::new(vec![a, b, c]), BigRational::from_integer(k.into())))))
    }

    fn assignment() -> impl Strategy<Value = Assignment> {
        prop::collection::vec((1i64..20, 1i64..20, any::<bool>()), 3)
            .prop_map(|v| Assignment::new(v.into_iter().map(|(n, d, s)| BigRational::new(if s { n } else { -n }.into(), d.into())).collect()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]

        #[test]
        fn ring_axioms(a in poly3(), b in poly3(), c in poly3()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
        }

        #[test]
        fn evaluation_is_a_homomorphism(a in poly3(), b in poly3(), x in assignment()) {
            let (ea, eb) = (a.evaluate(&x).unwrap(), b.evaluate(&x).unwrap());
            prop_assert_eq!((&a * &b).evaluate(&x).unwrap(), &ea * &eb);
            prop_assert_eq!((&a + &b).evaluate(&x).unwrap(), &ea + &eb);
        }

        #[test]
        fn rational_function_evaluation(a in poly3(), b in poly3(), c in poly3(), x in assignment()) {
            prop_assume!(!b.is_zero() && !c.is_zero());
            let f = RationalFunction::new(a.clone(), b.clone()).unwrap();
            let g = RationalFunction::new(c.clone(), b.clone()).unwrap();
            if let (Ok(ef), Ok(eg)) = (f.evaluate(&x), g.evaluate(&x)) {
                prop_assert_eq!(f.mul(&g).evaluate(&x).unwrap(), &ef * &eg);
                prop_assert_eq!(RationalFunction::add(&f, &g).evaluate(&x).unwrap(), &ef + &eg);
            }
        }

        /// eq_exact agrees with evaluation at 20 random assignments.
        #[test]
        fn eq_exact_matches_sampling(a in poly3(), b in poly3(), c in poly3(), seed in any::<u64>()) {
            prop_assume!(!b.is_zero() && !c.is_zero());
            let f = RationalFunction::new(&a * &c, &b * &c).unwrap();
            let g = RationalFunction::new(a.clone(), b.clone()).unwrap();
            let h = RationalFunction::new(&a + &c, b.clone()).unwrap();
            prop_assert!(f.eq_exact(&g));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut differs = false;
            for _ in 0..20 {
                let x = Assignment::random(&mut rng, 3, DEFAULT_BITS);
                if let (Ok(u), Ok(v), Ok(w)) = (f.evaluate(&x), g.evaluate(&x), h.evaluate(&x)) {
                    prop_assert_eq!(&u, &v);
                    differs |= v != w;
                }
            }
            prop_assert_eq!(differs, !g.eq_exact(&h));
        }

        #[test]
        fn semifield_results_stay_positive(e in prop::collection::vec(0u8..4, 1..8)) {
            let mut acc = SemifieldElement::var(0);
            for op in e {
                acc = match op {
                    0 => acc.one_plus(),
                    1 => acc.inv(),
                    2 => acc.mul(&SemifieldElement::var(1).one_plus()),
                    _ => SemifieldElement::add(&acc, &SemifieldElement::var(2)),
                };
                prop_assert!(acc.num().all_coefficients_positive() && acc.den().all_coefficients_positive());
                prop_assert!(acc.num().all_exponents_nonnegative() && acc.den().all_exponents_nonnegative());
            }
        }
    }
}
