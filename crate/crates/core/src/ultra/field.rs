//! Discretely valued fields with exact arithmetic.

use alloc::vec::Vec;
use core::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

/// A field with a discrete valuation `v` and absolute value `|x| = q^{-v(x)}`.
///
/// Elements are plain values; all operations go through the field so that
/// backends may carry parameters such as the prime.
pub trait ValuedField: Clone + Debug {
    type Elem: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// `None` for zero.
    fn valuation(&self, a: &Self::Elem) -> Option<i64>;
    /// An element of valuation one.
    fn uniformizer(&self) -> Self::Elem;
    /// `ln q`.
    fn log_base(&self) -> f64;
    /// Pseudo-random element with small height, zero included.
    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|ib| self.mul(a, &ib))
    }

    fn pow(&self, a: &Self::Elem, k: i64) -> Option<Self::Elem> {
        let base = if k < 0 { self.inv(a)? } else { a.clone() };
        let mut acc = self.one();
        for _ in 0..k.unsigned_abs() {
            acc = self.mul(&acc, &base);
        }
        Some(acc)
    }
}

/// `p`-adic valuation of a nonzero integer.
fn int_valuation(n: &BigInt, p: &BigInt) -> i64 {
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// The rationals with the `p`-adic valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAdic {
    p: u64,
    prime: BigInt,
}

impl PAdic {
    /// Panics unless `p` is prime.
    pub fn new(p: u64) -> Self {
        assert!(p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0), "{p} is not prime");
        Self { p, prime: BigInt::from(p) }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn ratio(&self, num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }
}

impl ValuedField for PAdic {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_int(&self, n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn valuation(&self, a: &BigRational) -> Option<i64> {
        if a.is_zero() {
            return None;
        }
        Some(int_valuation(a.numer(), &self.prime) - int_valuation(a.denom(), &self.prime))
    }
    fn uniformizer(&self) -> BigRational {
        BigRational::from_integer(self.prime.clone())
    }
    fn log_base(&self) -> f64 {
        num_traits::Float::ln(self.p as f64)
    }
    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        let num: i64 = rng.gen_range(-9..=9);
        let den: i64 = rng.gen_range(1..=9);
        let shift: i64 = rng.gen_range(-2..=2);
        let x = BigRational::new(num.into(), den.into());
        x * self.pow(&self.uniformizer(), shift).expect("p is invertible")
    }
}

/// Polynomial over the rationals, coefficients from degree 0 upwards, with
/// no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(alloc::vec![c])
    }

    /// `T^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = alloc::vec![BigRational::zero(); k + 1];
        coeffs[k] = BigRational::one();
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Order of vanishing at `T = 0`.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    fn lead(&self) -> &BigRational {
        self.coeffs.last().expect("nonzero polynomial")
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = BigRational::zero();
        Poly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn neg(&self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = alloc::vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Euclidean division; panics on division by zero.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let mut rem = self.coeffs.clone();
        let mut quot = alloc::vec![BigRational::zero(); self.coeffs.len().saturating_sub(dd)];
        let lead = d.lead().clone();
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1 - dd;
            let c = &rem[rem.len() - 1] / &lead;
            for (j, b) in d.coeffs.iter().enumerate() {
                let t = &c * b;
                rem[k + j] -= t;
            }
            quot[k] = c;
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        (Poly::new(quot), Poly::new(rem))
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            let l = a.lead().recip();
            a.scale(&l)
        }
    }
}

/// Element of `Q(T)` in lowest terms with monic denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        if num.is_zero() {
            return Some(Self { num, den: Poly::constant(BigRational::one()) });
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let l = den.lead().recip();
        Some(Self { num: num.scale(&l), den: den.scale(&l) })
    }

    pub fn from_poly(p: Poly) -> Self {
        Self::new(p, Poly::constant(BigRational::one())).expect("unit denominator")
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }
}

/// The field `Q(T)` with the `T`-adic valuation and `|x| = e^{-ord_T x}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TAdic;

impl ValuedField for TAdic {
    type Elem = RatFunc;

    fn zero(&self) -> RatFunc {
        RatFunc::from_poly(Poly::zero())
    }
    fn one(&self) -> RatFunc {
        RatFunc::from_poly(Poly::constant(BigRational::one()))
    }
    fn from_int(&self, n: i64) -> RatFunc {
        RatFunc::from_poly(Poly::constant(BigRational::from_integer(n.into())))
    }
    fn add(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        let num = a.num.mul(&b.den).add(&b.num.mul(&a.den));
        RatFunc::new(num, a.den.mul(&b.den)).expect("nonzero denominators")
    }
    fn sub(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        self.add(a, &self.neg(b))
    }
    fn mul(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        RatFunc::new(a.num.mul(&b.num), a.den.mul(&b.den)).expect("nonzero denominators")
    }
    fn neg(&self, a: &RatFunc) -> RatFunc {
        RatFunc { num: a.num.neg(), den: a.den.clone() }
    }
    fn inv(&self, a: &RatFunc) -> Option<RatFunc> {
        if a.num.is_zero() {
            None
        } else {
            RatFunc::new(a.den.clone(), a.num.clone())
        }
    }
    fn is_zero(&self, a: &RatFunc) -> bool {
        a.num.is_zero()
    }
    fn valuation(&self, a: &RatFunc) -> Option<i64> {
        let n = a.num.order()? as i64;
        let d = a.den.order().expect("nonzero denominator") as i64;
        Some(n - d)
    }
    fn uniformizer(&self) -> RatFunc {
        RatFunc::from_poly(Poly::monomial(1))
    }
    fn log_base(&self) -> f64 {
        1.0
    }
    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> RatFunc {
        let mut poly = || {
            let deg = rng.gen_range(0..=2usize);
            let coeffs = (0..=deg)
                .map(|_| BigRational::from_integer(rng.gen_range(-4i64..=4).into()))
                .collect();
            Poly::new(coeffs)
        };
        let num = poly();
        let mut den = poly();
        if den.is_zero() {
            den = Poly::constant(BigRational::one());
        }
        let shift: i64 = rng.gen_range(-2..=2);
        let base = RatFunc::new(num, den).expect("nonzero denominator");
        self.mul(&base, &self.pow(&self.uniformizer(), shift).expect("T is invertible"))
    }
}
