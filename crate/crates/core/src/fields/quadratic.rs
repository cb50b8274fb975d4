//! Elements `a + b·√r` of a real quadratic field ℚ(√r).

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact element `a + b·√r` with `a, b` rational.
///
/// `r = 0` marks a pure rational that has not been attached to a field yet
/// (the result of `zero()`/`one()`); it combines with any `r`.
#[derive(Clone, Debug)]
pub struct QuadNum {
    a: BigRational,
    b: BigRational,
    r: u64,
}

impl QuadNum {
    pub fn new(a: BigRational, b: BigRational, r: u64) -> Self {
        assert!(r != 0 || b.is_zero(), "irrational part needs a radicand");
        QuadNum { a, b, r }
    }

    pub fn rational(a: BigRational) -> Self {
        QuadNum { a, b: BigRational::zero(), r: 0 }
    }

    pub fn from_ints(a: i64, b: i64, r: u64) -> Self {
        QuadNum::new(BigRational::from_integer(a.into()), BigRational::from_integer(b.into()), r)
    }

    /// `√r` itself.
    pub fn sqrt_r(r: u64) -> Self {
        QuadNum::from_ints(0, 1, r)
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn radicand(&self) -> u64 {
        self.r
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn with_radicand(mut self, r: u64) -> Self {
        if self.r == 0 {
            self.r = r;
        }
        self
    }

    fn join(r1: u64, r2: u64) -> u64 {
        match (r1, r2) {
            (0, r) | (r, 0) => r,
            (x, y) if x == y => x,
            (x, y) => panic!("mixing ℚ(√{x}) and ℚ(√{y})"),
        }
    }

    pub fn conjugate(&self) -> Self {
        QuadNum { a: self.a.clone(), b: -self.b.clone(), r: self.r }
    }

    /// Field norm `a² − r·b²`; nonzero for nonzero elements since `r` is square-free.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - BigRational::from_integer(self.r.into()) * &self.b * &self.b
    }

    /// Exact sign of the real embedding with `√r > 0`.
    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == 0 || sa == sb {
            return if sa != 0 { sa } else { sb };
        }
        if sa == 0 {
            return sb;
        }
        // opposite signs: compare a² with r·b²
        let lhs = &self.a * &self.a;
        let rhs = BigRational::from_integer(self.r.into()) * &self.b * &self.b;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Real embedding evaluated in double precision.
    pub fn to_f64(&self) -> f64 {
        embed(self, 80)
    }
}

fn sign_of(x: &BigRational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// `a + b·√r` with `√r` replaced by its `bits`-bit truncation `⌊√r·2^bits⌋ / 2^bits`.
///
/// The approximation error is at most `|b|·2^-bits`, so the result is monotone
/// in `bits` in the sense that the error bound only shrinks.
pub fn embed(x: &QuadNum, bits: u32) -> f64 {
    if x.b.is_zero() {
        return x.a.to_f64().unwrap_or(f64::NAN);
    }
    let scaled = BigUint::from(x.r) << (2 * bits as usize);
    let root = scaled.sqrt();
    let approx = BigRational::new(BigInt::from(root), BigInt::one() << bits as usize);
    let value = &x.a + &x.b * approx;
    value.to_f64().unwrap_or(f64::NAN)
}

impl PartialEq for QuadNum {
    fn eq(&self, other: &Self) -> bool {
        // a₁ − a₂ = (b₂ − b₁)√r has a rational left side, so with √r irrational
        // both sides vanish: equality is componentwise.
        self.a == other.a && self.b == other.b && (self.b.is_zero() || self.r == other.r)
    }
}

impl Eq for QuadNum {}

impl Hash for QuadNum {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.a.hash(state);
        self.b.hash(state);
        if !self.b.is_zero() {
            self.r.hash(state);
        }
    }
}

impl PartialOrd for QuadNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadNum {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).signum().cmp(&0)
    }
}

impl Add for QuadNum {
    type Output = QuadNum;
    fn add(self, rhs: QuadNum) -> QuadNum {
        let r = QuadNum::join(self.r, rhs.r);
        QuadNum { a: self.a + rhs.a, b: self.b + rhs.b, r }
    }
}

impl Sub for QuadNum {
    type Output = QuadNum;
    fn sub(self, rhs: QuadNum) -> QuadNum {
        let r = QuadNum::join(self.r, rhs.r);
        QuadNum { a: self.a - rhs.a, b: self.b - rhs.b, r }
    }
}

impl Mul for QuadNum {
    type Output = QuadNum;
    fn mul(self, rhs: QuadNum) -> QuadNum {
        let r = QuadNum::join(self.r, rhs.r);
        let rr = BigRational::from_integer(r.into());
        let a = &self.a * &rhs.a + rr * &self.b * &rhs.b;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        QuadNum { a, b, r }
    }
}

impl Div for QuadNum {
    type Output = QuadNum;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: QuadNum) -> QuadNum {
        let n = rhs.norm();
        assert!(!n.is_zero(), "division by zero in ℚ(√r)");
        let num = self * rhs.conjugate();
        QuadNum { a: num.a / &n, b: num.b / &n, r: num.r }
    }
}

impl Neg for QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        QuadNum { a: -self.a, b: -self.b, r: self.r }
    }
}

impl Zero for QuadNum {
    fn zero() -> Self {
        QuadNum::rational(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for QuadNum {
    fn one() -> Self {
        QuadNum::rational(BigRational::one())
    }
}

impl From<BigRational> for QuadNum {
    fn from(a: BigRational) -> Self {
        QuadNum::rational(a)
    }
}

impl fmt::Display for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", super::format_rational(&self.a));
        }
        let b = super::format_rational(&self.b);
        if self.a.is_zero() {
            write!(f, "{}*sqrt({})", b, self.r)
        } else if self.b.is_negative() {
            write!(f, "{}{}*sqrt({})", super::format_rational(&self.a), b, self.r)
        } else {
            write!(f, "{}+{}*sqrt({})", super::format_rational(&self.a), b, self.r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> QuadNum {
        QuadNum::from_ints(a, b, 2)
    }

    #[test]
    fn arithmetic_in_q_sqrt2() {
        // (1 + √2)(−1 + √2) = 1
        assert_eq!(q(1, 1) * q(-1, 1), QuadNum::one());
        assert_eq!(QuadNum::one() / q(1, 1), q(-1, 1));
        assert_eq!(q(3, -2).norm(), BigRational::from_integer(1.into()));
    }

    #[test]
    fn exact_sign() {
        assert_eq!(q(3, -2).signum(), 1); // 3 − 2√2 ≈ 0.17
        assert_eq!(q(-3, 2).signum(), -1);
        assert_eq!(q(1, -1).signum(), -1);
        assert_eq!(q(0, 0).signum(), 0);
        assert!(q(1, 1) > q(2, 0));
    }

    #[test]
    fn embedding_values() {
        assert_eq!(embed(&q(0, 0), 64), 0.0);
        assert!((embed(&q(1, 1), 64) - 2.414_213_562_373_095).abs() < 1e-15);
        assert!((embed(&q(3, -2), 64) - 0.171_572_875_253_809_9).abs() < 1e-15);
    }

    #[test]
    fn embedding_error_shrinks_with_precision() {
        let x = q(3, -2);
        let exact = 3.0 - 2.0 * 2f64.sqrt();
        let mut prev = f64::INFINITY;
        for bits in [4, 8, 16, 32, 64] {
            let err = (embed(&x, bits) - exact).abs();
            assert!(err <= prev + 1e-15);
            assert!(err <= 2.0 * 2f64.powi(-(bits as i32)) + 1e-15);
            prev = err;
        }
    }

    #[test]
    fn display_round_trip_shape() {
        assert_eq!(q(1, 1).to_string(), "1+1*sqrt(2)");
        assert_eq!(q(3, -2).to_string(), "3-2*sqrt(2)");
        assert_eq!(q(0, 5).to_string(), "5*sqrt(2)");
    }
}
