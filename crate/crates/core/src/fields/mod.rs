//! Local fields and their scalars.
//!
//! Exact rationals carry p-adic valuations; ℚ(√r) elements are compared
//! exactly and embedded into ℝ with `√r > 0`; real and complex values are
//! plain IEEE doubles.

mod quadratic;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use quadratic::{embed as quad_embed_bits, QuadNum};

/// Which local field a computation lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldKind {
    Real,
    Complex,
    Padic { p: u64 },
    /// ℚ(√r) with its real embedding.
    Quadratic { r: u64 },
    /// 𝔽_q((t)); never constructible.
    LaurentSeries { q: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FieldDesc {
    kind: FieldKind,
}

impl FieldDesc {
    pub fn new(kind: FieldKind) -> Result<Self> {
        match kind {
            FieldKind::Padic { p } if !is_prime(p) => {
                Err(Error::invalid(format!("p = {p} is not prime")))
            }
            FieldKind::Quadratic { r } if r < 2 || !is_square_free(r) => {
                Err(Error::invalid(format!("r = {r} is not a square-free integer ≥ 2")))
            }
            FieldKind::LaurentSeries { q } => Err(Error::unsupported(format!(
                "𝔽_{q}((t)) is not implemented"
            ))),
            _ => Ok(FieldDesc { kind }),
        }
    }

    pub fn real() -> Self {
        FieldDesc { kind: FieldKind::Real }
    }

    pub fn complex() -> Self {
        FieldDesc { kind: FieldKind::Complex }
    }

    pub fn padic(p: u64) -> Result<Self> {
        Self::new(FieldKind::Padic { p })
    }

    pub fn quadratic(r: u64) -> Result<Self> {
        Self::new(FieldKind::Quadratic { r })
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn is_archimedean(&self) -> bool {
        !matches!(self.kind, FieldKind::Padic { .. })
    }

    pub fn prime(&self) -> Option<u64> {
        match self.kind {
            FieldKind::Padic { p } => Some(p),
            _ => None,
        }
    }

    pub fn radicand(&self) -> Option<u64> {
        match self.kind {
            FieldKind::Quadratic { r } => Some(r),
            _ => None,
        }
    }

    /// Base `q` of the absolute value: `e` for Archimedean fields, `p` for ℚ_p.
    pub fn base(&self) -> f64 {
        match self.kind {
            FieldKind::Padic { p } => p as f64,
            _ => std::f64::consts::E,
        }
    }

    pub fn ln_base(&self) -> f64 {
        self.base().ln()
    }
}

impl<'de> Deserialize<'de> for FieldDesc {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let kind = FieldKind::deserialize(d)?;
        FieldDesc::new(kind).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FieldKind::Real => write!(f, "R"),
            FieldKind::Complex => write!(f, "C"),
            FieldKind::Padic { p } => write!(f, "Q_{p}"),
            FieldKind::Quadratic { r } => write!(f, "Q(sqrt({r}))"),
            FieldKind::LaurentSeries { q } => write!(f, "F_{q}((t))"),
        }
    }
}

impl FromStr for FieldDesc {
    type Err = Error;

    /// Accepts `real`, `complex`, `padic:P` and `quadratic:R`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let num = |a: Option<&str>| -> Result<u64> {
            a.ok_or_else(|| Error::invalid(format!("field `{s}` needs a parameter")))?
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad field parameter in `{s}`")))
        };
        match head.to_ascii_lowercase().as_str() {
            "real" | "r" => Ok(FieldDesc::real()),
            "complex" | "c" => Ok(FieldDesc::complex()),
            "padic" | "qp" => FieldDesc::padic(num(arg)?),
            "quadratic" => FieldDesc::quadratic(num(arg)?),
            "laurent" => FieldDesc::new(FieldKind::LaurentSeries { q: num(arg)? }),
            _ => Err(Error::invalid(format!("unknown field `{s}`"))),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn is_square_free(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % (d * d) == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// p-adic valuation, `+∞` at zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    PlusInfinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::PlusInfinity => None,
        }
    }
}

impl std::ops::Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::PlusInfinity,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::PlusInfinity => write!(f, "+inf"),
        }
    }
}

/// Multiplicity of `p` in a nonzero integer.
pub fn val_p_int(n: &BigInt, p: u64) -> u64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return k;
        }
        n = q;
        k += 1;
    }
}

/// `ω(x) = v_p(num) − v_p(den)`, `None` for zero.
pub fn val_p(x: &BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    Some(val_p_int(x.numer(), p) as i64 - val_p_int(x.denom(), p) as i64)
}

/// A field element: exact rational, exact ℚ(√r) element, or a floating value.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Rational(BigRational),
    Quadratic(QuadNum),
    Real(f64),
    Complex(Complex64),
}

impl Scalar {
    pub fn int(n: i64) -> Self {
        Scalar::Rational(BigRational::from_integer(n.into()))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::Rational(BigRational::new(n.into(), d.into()))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(x) => x.is_zero(),
            Scalar::Quadratic(x) => x.is_zero(),
            Scalar::Real(x) => *x == 0.0,
            Scalar::Complex(z) => z.norm() == 0.0,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Rational(_) | Scalar::Quadratic(_))
    }

    /// Real-embedding value; errors for complex scalars.
    pub fn to_f64(&self) -> Result<f64> {
        match self {
            Scalar::Rational(x) => Ok(rational_to_f64(x)),
            Scalar::Quadratic(x) => Ok(x.to_f64()),
            Scalar::Real(x) => Ok(*x),
            Scalar::Complex(z) if z.im == 0.0 => Ok(z.re),
            Scalar::Complex(_) => Err(Error::invalid("complex scalar has no real value")),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Complex(z) => *z,
            other => Complex64::new(other.to_f64().unwrap_or(f64::NAN), 0.0),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(x) => Some(x),
            _ => None,
        }
    }
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `ω(x)` for an exact rational over ℚ_p.
pub fn valuation(x: &Scalar, f: &FieldDesc) -> Result<Valuation> {
    let p = f
        .prime()
        .ok_or_else(|| Error::unsupported(format!("valuation over {f}")))?;
    let q = match x {
        Scalar::Rational(q) => q,
        Scalar::Quadratic(q) if q.is_rational() => q.a(),
        _ => return Err(Error::invalid("p-adic valuation needs an exact rational")),
    };
    Ok(val_p(q, p).map_or(Valuation::PlusInfinity, Valuation::Finite))
}

/// `|x|` in the normalization of `f`: `q^{-ω(x)}` over ℚ_p, the usual modulus otherwise.
pub fn abs_value(x: &Scalar, f: &FieldDesc) -> Result<f64> {
    if let Some(p) = f.prime() {
        return Ok(match valuation(x, f)? {
            Valuation::PlusInfinity => 0.0,
            Valuation::Finite(v) => (p as f64).powi(-(v as i32)),
        });
    }
    Ok(match x {
        Scalar::Rational(q) => rational_to_f64(q).abs(),
        Scalar::Quadratic(q) => q.abs().to_f64(),
        Scalar::Real(v) => v.abs(),
        Scalar::Complex(z) => z.norm(),
    })
}

/// Real embedding of a quadratic scalar with `√r` truncated to `bits` binary digits.
pub fn quad_embed(x: &Scalar, bits: u32) -> Result<f64> {
    match x {
        Scalar::Quadratic(q) => Ok(quad_embed_bits(q, bits)),
        Scalar::Rational(q) => Ok(rational_to_f64(q)),
        _ => Err(Error::invalid("quad_embed needs an exact scalar")),
    }
}

pub(crate) fn format_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `n`, `n/d` or a finite decimal like `-0.125` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::invalid(format!("not a rational number: `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::invalid(format!("zero denominator in `{s}`")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = ip.trim_start().starts_with('-');
        let ip = if ip.is_empty() || ip == "-" || ip == "+" { "0" } else { ip };
        let whole: BigInt = ip.parse().map_err(|_| bad())?;
        let frac: BigInt = fp.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), fp.len());
        let frac = BigRational::new(frac, scale);
        let whole = BigRational::from_integer(whole.abs());
        let v = whole + frac;
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

fn parse_quadratic(s: &str, r: u64) -> Result<QuadNum> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let marker = "sqrt(";
    let Some(pos) = compact.find(marker) else {
        return Ok(QuadNum::rational(parse_rational(&compact)?).with_radicand(r));
    };
    let close = compact[pos..]
        .find(')')
        .map(|i| pos + i)
        .ok_or_else(|| Error::invalid(format!("unclosed sqrt in `{s}`")))?;
    let rad: u64 = compact[pos + marker.len()..close]
        .parse()
        .map_err(|_| Error::invalid(format!("bad radicand in `{s}`")))?;
    if rad != r {
        return Err(Error::invalid(format!("`{s}` uses sqrt({rad}) in Q(sqrt({r}))")));
    }
    if close + 1 != compact.len() {
        return Err(Error::invalid(format!("trailing text after sqrt in `{s}`")));
    }
    // prefix is "[a](+|-)[b*]" ending right before sqrt(
    let prefix = &compact[..pos];
    let prefix = prefix.strip_suffix('*').unwrap_or(prefix);
    // find the sign that separates a from b: last + or - not at position 0 and not after '/'
    let split = prefix
        .char_indices()
        .filter(|&(i, c)| (c == '+' || c == '-') && i > 0)
        .map(|(i, _)| i)
        .last();
    let (a_str, b_str) = match split {
        Some(i) => (&prefix[..i], &prefix[i..]),
        None => ("", prefix),
    };
    let a = if a_str.is_empty() { BigRational::zero() } else { parse_rational(a_str)? };
    let b = match b_str {
        "" | "+" => BigRational::one(),
        "-" => -BigRational::one(),
        t => parse_rational(t)?,
    };
    Ok(QuadNum::new(a, b, r))
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::invalid(format!("not a complex number: `{s}`"));
    let Some(body) = compact.strip_suffix('i') else {
        return compact.parse::<f64>().map(|x| Complex64::new(x, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not an exponent sign
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => t.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re.parse::<f64>().map_err(|_| bad())?, im))
}

/// Reads a scalar in the serialization of `f`.
///
/// Exact fields (ℚ_p, ℚ(√r)) accept `num/den`, integers and finite decimals;
/// ℚ(√r) also accepts `a+b*sqrt(r)`. Real fields accept exact rationals
/// (kept exact) and floating decimal text. Complex fields accept `x+yi`.
pub fn parse_scalar(s: &str, f: &FieldDesc) -> Result<Scalar> {
    match f.kind() {
        FieldKind::Padic { .. } => Ok(Scalar::Rational(parse_rational(s)?)),
        FieldKind::Quadratic { r } => {
            let q = parse_quadratic(s, r)?;
            Ok(if q.is_rational() { Scalar::Rational(q.a().clone()) } else { Scalar::Quadratic(q) })
        }
        FieldKind::Real => match parse_rational(s) {
            Ok(q) if !s.contains(['e', 'E']) => Ok(Scalar::Rational(q)),
            _ => s
                .trim()
                .parse::<f64>()
                .map(Scalar::Real)
                .map_err(|_| Error::invalid(format!("not a real number: `{s}`"))),
        },
        FieldKind::Complex => match parse_rational(s) {
            Ok(q) => Ok(Scalar::Rational(q)),
            Err(_) => parse_complex(s).map(Scalar::Complex),
        },
        FieldKind::LaurentSeries { .. } => Err(Error::unsupported("Laurent series scalars")),
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(x) => write!(f, "{}", format_rational(x)),
            Scalar::Quadratic(x) => write!(f, "{x}"),
            Scalar::Real(x) => write!(f, "{x:?}"),
            Scalar::Complex(z) => {
                if z.im.is_sign_negative() {
                    write!(f, "{:?}{:?}i", z.re, z.im)
                } else {
                    write!(f, "{:?}+{:?}i", z.re, z.im)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qp(p: u64) -> FieldDesc {
        FieldDesc::padic(p).unwrap()
    }

    #[test]
    fn field_validation() {
        assert!(FieldDesc::padic(3).is_ok());
        assert!(FieldDesc::padic(9).is_err());
        assert!(FieldDesc::padic(1).is_err());
        assert!(FieldDesc::quadratic(2).is_ok());
        assert!(FieldDesc::quadratic(12).is_err());
        assert!(FieldDesc::quadratic(1).is_err());
        assert!(matches!(
            FieldDesc::new(FieldKind::LaurentSeries { q: 4 }),
            Err(Error::Unsupported(_))
        ));
        assert_eq!("padic:5".parse::<FieldDesc>().unwrap(), qp(5));
    }

    #[test]
    fn valuation_examples() {
        let f = qp(3);
        assert_eq!(valuation(&Scalar::int(3), &f).unwrap(), Valuation::Finite(1));
        assert_eq!(valuation(&Scalar::int(1), &f).unwrap(), Valuation::Finite(0));
        assert_eq!(valuation(&Scalar::ratio(1, 9), &f).unwrap(), Valuation::Finite(-2));
        assert_eq!(valuation(&Scalar::int(0), &f).unwrap(), Valuation::PlusInfinity);
        assert!(matches!(
            valuation(&Scalar::int(3), &FieldDesc::real()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn abs_value_examples() {
        assert_eq!(abs_value(&Scalar::ratio(1, 9), &qp(3)).unwrap(), 9.0);
        assert_eq!(abs_value(&Scalar::int(0), &qp(3)).unwrap(), 0.0);
        assert_eq!(abs_value(&Scalar::int(0), &FieldDesc::real()).unwrap(), 0.0);
        let x = Scalar::Quadratic(QuadNum::from_ints(1, 1, 2));
        let v = abs_value(&x, &FieldDesc::quadratic(2).unwrap()).unwrap();
        assert!((v - (1.0 + 2f64.sqrt())).abs() < 1e-15);
        let z = Scalar::Complex(Complex64::new(3.0, -4.0));
        assert_eq!(abs_value(&z, &FieldDesc::complex()).unwrap(), 5.0);
    }

    #[test]
    fn parse_formats() {
        let q2 = FieldDesc::quadratic(2).unwrap();
        assert_eq!(parse_scalar("1/2", &qp(3)).unwrap(), Scalar::ratio(1, 2));
        assert_eq!(parse_scalar("-0.125", &qp(3)).unwrap(), Scalar::ratio(-1, 8));
        assert_eq!(parse_scalar("4/8", &qp(3)).unwrap(), Scalar::ratio(1, 2));
        assert_eq!(
            parse_scalar("3-2*sqrt(2)", &q2).unwrap(),
            Scalar::Quadratic(QuadNum::from_ints(3, -2, 2))
        );
        assert_eq!(
            parse_scalar("-sqrt(2)", &q2).unwrap(),
            Scalar::Quadratic(QuadNum::from_ints(0, -1, 2))
        );
        assert_eq!(
            parse_scalar("1/2+3/4*sqrt(2)", &q2).unwrap().to_string(),
            "1/2+3/4*sqrt(2)"
        );
        assert!(parse_scalar("1+sqrt(3)", &q2).is_err());
        assert_eq!(parse_scalar("1e-3", &FieldDesc::real()).unwrap(), Scalar::Real(1e-3));
        assert_eq!(parse_scalar("2", &FieldDesc::real()).unwrap(), Scalar::int(2));
        assert_eq!(
            parse_scalar("1.5-2i", &FieldDesc::complex()).unwrap(),
            Scalar::Complex(Complex64::new(1.5, -2.0))
        );
        assert_eq!(
            parse_scalar("i", &FieldDesc::complex()).unwrap(),
            Scalar::Complex(Complex64::new(0.0, 1.0))
        );
        assert!(parse_scalar("1/0", &qp(3)).is_err());
    }

    #[test]
    fn display_round_trips() {
        let q2 = FieldDesc::quadratic(2).unwrap();
        for s in ["7/3", "-2", "3-2*sqrt(2)", "5*sqrt(2)"] {
            let x = parse_scalar(s, &q2).unwrap();
            assert_eq!(parse_scalar(&x.to_string(), &q2).unwrap(), x);
        }
        let z = Scalar::Complex(Complex64::new(0.1, -2.5));
        assert_eq!(parse_scalar(&z.to_string(), &FieldDesc::complex()).unwrap(), z);
    }

    #[test]
    fn quad_embed_examples() {
        let z = Scalar::Quadratic(QuadNum::from_ints(0, 0, 2));
        assert_eq!(quad_embed(&z, 53).unwrap(), 0.0);
        let x = Scalar::Quadratic(QuadNum::from_ints(3, -2, 2));
        assert!((quad_embed(&x, 64).unwrap() - 0.171_572_875_253_809_9).abs() < 1e-15);
    }
}
