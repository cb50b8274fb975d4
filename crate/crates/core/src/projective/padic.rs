//! Newton polygons and Hensel lifting for characteristic polynomials over ℚ_p.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::fields::val_p;

/// One edge of the lower convex hull of `{(i, ω(c_i))}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    /// Slope as a reduced fraction; the roots counted by this edge have valuation `−slope`.
    pub slope: BigRational,
}

impl Segment {
    pub fn length(&self) -> usize {
        self.end - self.start
    }
}

/// Lower convex hull of the points `(i, ω(c_i))`, coefficients listed from the constant term.
pub fn newton_polygon(coeffs: &[BigRational], p: u64) -> Vec<Segment> {
    let pts: Vec<(i64, i64)> = coeffs
        .iter()
        .enumerate()
        .filter_map(|(i, c)| val_p(c, p).map(|v| (i as i64, v)))
        .collect();
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b unless it lies strictly below the chord a → pt
            let cross = (b.0 - a.0) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 - a.0);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    hull.windows(2)
        .map(|w| Segment {
            start: w[0].0 as usize,
            end: w[1].0 as usize,
            slope: BigRational::new((w[1].1 - w[0].1).into(), (w[1].0 - w[0].0).into()),
        })
        .collect()
}

/// Multiplicities of root valuations, listed from the smallest valuation
/// (largest absolute value) upward. Roots equal to zero are not counted.
pub fn root_valuations(coeffs: &[BigRational], p: u64) -> Vec<(BigRational, usize)> {
    let mut out: Vec<(BigRational, usize)> =
        newton_polygon(coeffs, p).into_iter().map(|s| (-s.slope.clone(), s.length())).collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn eval(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

fn rational_roots(coeffs: &[BigRational]) -> Vec<BigRational> {
    // clear denominators, then test ± divisor(a₀)/divisor(a_n)
    let lcm = coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let ints: Vec<BigInt> = coeffs.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let mut lead = ints.clone();
    while lead.last().is_some_and(Zero::is_zero) {
        lead.pop();
    }
    let low = ints.iter().position(|c| !c.is_zero());
    let (Some(low), Some(high)) = (low, lead.last()) else {
        return Vec::new();
    };
    let mut roots = Vec::new();
    if low > 0 {
        roots.push(BigRational::zero());
    }
    let (a0, an) = (ints[low].abs(), high.abs());
    let small = |n: &BigInt| n.to_u64().filter(|&v| v <= 1_000_000);
    let (Some(a0), Some(an)) = (small(&a0), small(&an)) else {
        return roots;
    };
    let divisors = |n: u64| (1..=n).filter(move |d| n % d == 0);
    for num in divisors(a0) {
        for den in divisors(an) {
            for sign in [1i64, -1] {
                let x = BigRational::new(BigInt::from(num) * sign, BigInt::from(den));
                if eval(coeffs, &x).is_zero() && !roots.contains(&x) {
                    roots.push(x);
                }
            }
        }
    }
    roots
}

/// Result of extracting a simple root of prescribed valuation.
#[derive(Clone, Debug)]
pub struct RootApprox {
    pub value: BigRational,
    /// `true` when `value` is an exact root; otherwise it is correct modulo `p^(valuation + precision)`.
    pub exact: bool,
    pub precision: u32,
}

/// The unique root of valuation `v` of a polynomial whose Newton polygon has a
/// length-one edge of slope `−v`.
///
/// Rational roots are found exactly. Otherwise the root is Hensel-lifted:
/// substituting `X = p^v·Y` and rescaling gives a ℤ_(p)-integral polynomial
/// whose reduction has the unit root `ȳ` as a simple root.
pub fn simple_root(coeffs: &[BigRational], p: u64, v: i64, precision: u32) -> Option<RootApprox> {
    if let Some(r) = rational_roots(coeffs).into_iter().find(|r| val_p(r, p) == Some(v)) {
        return Some(RootApprox { value: r, exact: true, precision });
    }
    let pq = BigRational::from_integer(p.into());
    let scale = if v >= 0 { num_traits::pow(pq.clone(), v as usize) } else { num_traits::pow(pq.recip(), (-v) as usize) };
    // Q(Y) = P(p^v Y) = Σ c_i p^{iv} Y^i, then divide by the coefficient of least valuation
    let mut q: Vec<BigRational> = Vec::with_capacity(coeffs.len());
    let mut pw = BigRational::one();
    for c in coeffs {
        q.push(c * &pw);
        pw = &pw * &scale;
    }
    let minv = q.iter().filter_map(|c| val_p(c, p)).min()?;
    let norm = if minv >= 0 { num_traits::pow(pq.clone(), minv as usize) } else { num_traits::pow(pq.recip(), (-minv) as usize) };
    let q: Vec<BigRational> = q.into_iter().map(|c| c / &norm).collect();
    let modulus = num_traits::pow(BigInt::from(p), precision as usize);
    let to_mod = |c: &BigRational| -> BigInt {
        let den_inv = mod_inverse(&c.denom().mod_floor(&modulus), &modulus).expect("p-integral");
        (c.numer() * den_inv).mod_floor(&modulus)
    };
    let qi: Vec<BigInt> = q.iter().map(to_mod).collect();
    let dqi: Vec<BigInt> = qi.iter().enumerate().skip(1).map(|(i, c)| (c * BigInt::from(i)).mod_floor(&modulus)).collect();
    let ev = |cs: &[BigInt], y: &BigInt, m: &BigInt| cs.iter().rev().fold(BigInt::zero(), |acc, c| (acc * y + c).mod_floor(m));
    let pb = BigInt::from(p);
    let y0 = (1..p).map(BigInt::from).find(|y| ev(&qi, y, &pb).is_zero())?;
    if ev(&dqi, &y0, &pb).is_zero() {
        return None;
    }
    let mut y = y0;
    for _ in 0..=(precision as usize).ilog2() + 1 {
        let f = ev(&qi, &y, &modulus);
        let df = ev(&dqi, &y, &modulus);
        let inv = mod_inverse(&df, &modulus)?;
        y = (y - f * inv).mod_floor(&modulus);
    }
    // a root with small height is recovered exactly from its residue
    for cand in [Some(BigRational::from_integer(y.clone())), Some(BigRational::from_integer(&y - &modulus)), reconstruct(&y, &modulus)]
        .into_iter()
        .flatten()
    {
        let x = cand * &scale;
        if eval(coeffs, &x).is_zero() {
            return Some(RootApprox { value: x, exact: true, precision });
        }
    }
    Some(RootApprox { value: BigRational::from_integer(y) * scale, exact: false, precision })
}

/// Rational `a/b ≡ y (mod m)` with `|a|, |b| ≤ √(m/2)`, when one exists.
fn reconstruct(y: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), y.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        (r0, r1) = (r1.clone(), &r0 - &q * &r1);
        (t0, t1) = (t1.clone(), &t0 - &q * &t1);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int, rat};

    #[test]
    fn polygon_of_split_valuations() {
        // X² − p⁻¹X + 1 over ℚ₃: roots of valuation −1 and +1
        let c = vec![int(1), rat(-1, 3), int(1)];
        let segs = newton_polygon(&c, 3);
        assert_eq!(segs.len(), 2);
        assert!(segs.iter().all(|s| s.length() == 1));
        let vals = root_valuations(&c, 3);
        assert_eq!(vals, vec![(int(-1), 1), (int(1), 1)]);
    }

    #[test]
    fn polygon_single_edge() {
        // X² − 3X − 3: one edge of length 2, slope −1/2
        let c = vec![int(-3), int(-3), int(1)];
        let segs = newton_polygon(&c, 3);
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].length(), 2);
        assert_eq!(segs[0].slope, rat(-1, 2));
    }

    #[test]
    fn hensel_lift_matches_root() {
        // X² − X/3 + 1: the root of valuation −1 is irrational
        let c = vec![int(1), rat(-1, 3), int(1)];
        let r = simple_root(&c, 3, -1, 30).unwrap();
        assert!(!r.exact);
        let res = eval(&c, &r.value);
        // residual valuation grows with the precision
        assert!(val_p(&res, 3).unwrap() >= 25);
    }

    #[test]
    fn rational_root_found_exactly() {
        // (X − 9)(X − 1/9) = X² − (82/9)X + 1
        let c = vec![int(1), rat(-82, 9), int(1)];
        let r = simple_root(&c, 3, -2, 20).unwrap();
        assert!(r.exact);
        assert_eq!(r.value, rat(1, 9));
    }
}
