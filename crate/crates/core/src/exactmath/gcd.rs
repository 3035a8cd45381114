//! Multivariate polynomial gcd over Q by recursive primitive PRS.
//!
//! Inputs are treated as elements of the Laurent ring: monomial content is
//! stripped first, so the result is a genuine polynomial with no monomial
//! factor, coprime integer coefficients and a positive leading coefficient.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::{poly_divide_exact, LaurentPoly};

/// gcd in the Laurent ring over Q, normalized as described in the module doc.
/// `gcd(0, 0)` is 0.
pub fn laurent_gcd(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    if a.is_zero() && b.is_zero() {
        return LaurentPoly::zero();
    }
    if a.is_zero() {
        return normalize(&b.split_monomial().1);
    }
    if b.is_zero() {
        return normalize(&a.split_monomial().1);
    }
    let (_, pa) = a.split_monomial();
    let (_, pb) = b.split_monomial();
    gcd_rec(&pa, &pb)
}

/// Integer-primitive with positive lex-leading coefficient.
pub(crate) fn normalize(p: &LaurentPoly) -> LaurentPoly {
    if p.is_zero() {
        return LaurentPoly::zero();
    }
    let mut c = p.integer_content();
    if p.leading_coeff().is_negative() {
        c = -c;
    }
    p.scale(&c.recip())
}

fn exact(p: &LaurentPoly, q: &LaurentPoly) -> LaurentPoly {
    poly_divide_exact(p, q).expect("gcd divides its argument")
}

fn gcd_rec(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    if a.is_zero() {
        return normalize(b);
    }
    if b.is_zero() {
        return normalize(a);
    }
    let v = match (a.max_var(), b.max_var()) {
        (None, _) | (_, None) => return LaurentPoly::one(),
        (Some(x), Some(y)) => x.max(y),
    };
    if provably_coprime(a, b, v + 1) {
        return LaurentPoly::one();
    }
    let da = a.degree_in(v);
    let db = b.degree_in(v);
    if da == 0 {
        return gcd_rec(a, &content_in(b, v));
    }
    if db == 0 {
        return gcd_rec(&content_in(a, v), b);
    }
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let g_content = gcd_rec(&ca, &cb);
    let pa = exact(a, &ca);
    let pb = exact(b, &cb);

    let (mut r0, mut r1) = if da >= db { (pa, pb) } else { (pb, pa) };
    let g_prim = loop {
        let r = pseudo_remainder(&r0, &r1, v);
        if r.is_zero() {
            break r1;
        }
        if r.degree_in(v) == 0 {
            break LaurentPoly::one();
        }
        let pr = exact(&r, &content_in(&r, v));
        r0 = r1;
        r1 = normalize(&pr);
    };
    normalize(&(&g_content * &g_prim))
}

/// gcd of the coefficients of `p` viewed as a polynomial in generator `v`.
fn content_in(p: &LaurentPoly, v: usize) -> LaurentPoly {
    let mut g = LaurentPoly::zero();
    for c in p.coefficients_in(v).into_values() {
        g = gcd_rec(&g, &c);
        if g.is_one() {
            break;
        }
    }
    g
}

const PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64) -> u64 {
    pow_mod(a, PRIME - 2)
}

fn residue(c: &BigRational) -> Option<u64> {
    let p = BigInt::from(PRIME);
    let n = c.numer().mod_floor(&p).to_u64()?;
    let d = c.denom().mod_floor(&p).to_u64()?;
    (d != 0).then(|| mul_mod(n, inv_mod(d)))
}

/// Image of `p` modulo the prime as a univariate polynomial in `v`, with
/// every other generator `i` set to `point[i]`. Coefficients in ascending
/// degree; `None` if a denominator vanishes.
fn image(p: &LaurentPoly, v: usize, point: &[u64]) -> Option<Vec<u64>> {
    let mut out = vec![0; p.degree_in(v).max(0) as usize + 1];
    for (m, c) in p.terms() {
        let mut t = residue(c)?;
        for (i, &e) in m.exps().iter().enumerate() {
            if i != v && e != 0 {
                let x = if e > 0 { point[i] } else { inv_mod(point[i]) };
                t = mul_mod(t, pow_mod(x, e.unsigned_abs() as u64));
            }
        }
        let k = m.exp(v).max(0) as usize;
        out[k] = (out[k] + t) % PRIME;
    }
    Some(out)
}

fn trim(p: &mut Vec<u64>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

/// Degree of the univariate gcd over the prime field; inputs nonzero.
fn image_gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let inv = inv_mod(*b.last().unwrap());
        while a.len() >= b.len() {
            let q = mul_mod(*a.last().unwrap(), inv);
            let shift = a.len() - b.len();
            for (i, &bc) in b.iter().enumerate() {
                a[i + shift] = (a[i + shift] + PRIME - mul_mod(q, bc)) % PRIME;
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len() - 1
}

/// True only if gcd(a, b) is a constant. For each generator, the gcd of the
/// images at a random point bounds the degree of the true gcd, as long as
/// both leading coefficients survive; a zero bound in every generator is a
/// proof. A pseudo-random point keeps the outcome deterministic.
fn provably_coprime(a: &LaurentPoly, b: &LaurentPoly, nvars: usize) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(nvars as u64);
    (0..nvars).all(|v| {
        let (da, db) = (a.degree_in(v), b.degree_in(v));
        if da <= 0 || db <= 0 {
            return true;
        }
        (0..3).any(|_| {
            let point: Vec<u64> = (0..nvars).map(|_| rng.gen_range(1..PRIME)).collect();
            match (image(a, v, &point), image(b, v, &point)) {
                (Some(ia), Some(ib)) if !ia[da as usize].is_zero() && !ib[db as usize].is_zero() => image_gcd_degree(ia, ib) == 0,
                _ => false,
            }
        })
    })
}

fn pseudo_remainder(a: &LaurentPoly, b: &LaurentPoly, v: usize) -> LaurentPoly {
    use super::poly::Monomial;
    let db = b.degree_in(v);
    let lc_b = b.coefficient_in(v, db);
    let mut r = a.clone();
    while !r.is_zero() {
        let dr = r.degree_in(v);
        if dr < db {
            break;
        }
        let lc_r = r.coefficient_in(v, dr);
        let shifted = (&lc_r * b).shift(&Monomial::var(v, dr - db));
        r = &(&lc_b * &r) - &shifted;
        // Keep coefficient growth in check; the remainder is only needed up
        // to a unit.
        if !r.is_zero() {
            let c = r.integer_content();
            if !c.is_one() {
                r = r.scale(&c.recip());
            }
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::poly::laurent_divide_exact;
    use proptest::prelude::*;

    fn x(i: usize) -> LaurentPoly {
        LaurentPoly::var(i)
    }
    fn c(v: i64) -> LaurentPoly {
        LaurentPoly::from_int(v)
    }

    #[test]
    fn univariate_common_factor() {
        let a = &x(0).pow(2) - &c(1);
        let b = &(&x(0) - &c(1)) * &(&x(0) + &c(3));
        assert_eq!(laurent_gcd(&a, &b), &x(0) - &c(1));
    }

    #[test]
    fn coprime_gives_one() {
        let a = &x(0) + &x(1);
        let b = &x(0) + &c(1);
        assert!(laurent_gcd(&a, &b).is_one());
    }

    #[test]
    fn ignores_monomials_and_scalars() {
        let f = &(&x(0) * &x(1)) + &c(1);
        let a = (&f * &x(0)).scale(&num_rational::BigRational::from_integer(6.into()));
        let b = &f * &x(1).pow(3);
        assert_eq!(laurent_gcd(&a, &b), f);
    }

    #[test]
    fn cluster_style_factors() {
        // 1 + y1 + y1 y2 appears in belt coefficients of type A2.
        let f = &(&c(1) + &x(0)) + &(&x(0) * &x(1));
        let g = &c(1) + &x(1);
        let h = &c(1) + &x(0);
        let a = &f * &g;
        let b = &(&f * &h) * &h;
        assert_eq!(laurent_gcd(&a, &b), f);
    }

    #[test]
    fn coprimality_proof() {
        let f = &(&x(0) * &x(1)) + &c(1);
        let g = &x(0) + &x(2).pow(2);
        assert!(provably_coprime(&f, &g, 3));
        assert!(!provably_coprime(&(&f * &g), &(&f * &x(1)), 3));
        // a shared factor free of the top generator
        assert!(!provably_coprime(&(&f * &x(2)), &(&f * &(&x(2) + &c(1))), 3));
    }

    #[test]
    fn dense_coprime_pair_is_fast() {
        // took minutes through the remainder sequence alone
        let p = |s: &[(i32, i32, i32, i64)]| {
            LaurentPoly::from_terms(
                s.iter().map(|&(a, b, d, k)| (super::super::poly::Monomial::new(vec![a, b, d]), num_rational::BigRational::from_integer(k.into()))),
            )
        };
        let a = p(&[(4, -2, 1, 15), (3, -3, 0, 3), (1, 1, 2, -25), (1, 0, 2, 10), (0, 2, 2, 20), (0, 0, 1, -5), (0, -1, 1, 2), (-1, 1, 1, 4)]);
        let b = p(&[
            (4, 4, 2, 16),
            (4, 0, 2, 32),
            (4, -4, 2, 16),
            (1, 4, 2, 32),
            (1, 0, 2, 32),
            (0, 0, 1, 8),
            (0, -4, 1, 8),
            (-2, 4, 2, 16),
            (-3, 0, 1, 8),
            (-4, -4, 0, 1),
        ]);
        assert!(laurent_gcd(&a, &b).is_one());
    }

    fn small_poly() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec(((0i32..3, 0i32..3, 0i32..2), -3i64..4), 1..4).prop_map(|ts| {
            LaurentPoly::from_terms(
                ts.into_iter().map(|((a, b, d), k)| (super::super::poly::Monomial::new(vec![a, b, d]), num_rational::BigRational::from_integer(k.into()))),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn gcd_divides_both_and_absorbs_common_factor(f in small_poly(), g in small_poly(), h in small_poly()) {
            prop_assume!(!f.is_zero() && !g.is_zero() && !h.is_zero());
            let a = &f * &g;
            let b = &f * &h;
            let d = laurent_gcd(&a, &b);
            prop_assert!(laurent_divide_exact(&a, &d).unwrap().is_some());
            prop_assert!(laurent_divide_exact(&b, &d).unwrap().is_some());
            prop_assert!(laurent_divide_exact(&d, &f.split_monomial().1).unwrap().is_some()
                || f.as_constant().is_some() || f.is_monomial());
        }
    }
}
