//! Canonical dense sequences: dyadic scales `a_k`, boundary points `zeta_p`,
//! the enumeration `p_j` of polynomials over Q + iQ, the subfamily curves
//! `C_{pl}` with their anchors `b_{nlp}`, and the diagonal schedule of index
//! tuples.

use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::curves::{endpoint, CurveFamily, CurveKind, CurveSpec, Endpoint, FamilyClass, SubfamilyMember};
use crate::error::{Error, Result};
use crate::poly::{GaussianRational, RationalPolynomial};

// ---------------------------------------------------------------------------
// Dyadic scales and boundary points

/// `a_k = (2b + 1) / 2^{a+1}` where `k = 2^a + b`, `0 <= b < 2^a`.
pub fn scale(k: u64) -> f64 {
    assert!(k >= 1, "scale index starts at 1");
    let a = 63 - k.leading_zeros();
    let b = k - (1u64 << a);
    (2 * b + 1) as f64 / ((a + 1) as f64).exp2()
}

/// Index of the dyadic rational `num / 2^depth` in (0, 1), i.e. the inverse
/// of [`scale`].
pub fn scale_index(num: u64, depth: u32) -> Option<u64> {
    if depth == 0 || num % 2 == 0 || num >= (1u64 << depth) || depth > 63 {
        return None;
    }
    let a = depth - 1;
    Some((1u64 << a) + (num - 1) / 2)
}

/// Smallest `k` with `scale(k) < bound`. The first element of each dyadic
/// level is its minimum, so the answer is always a power of two.
pub fn smallest_scale_below(bound: f64) -> Option<u64> {
    (0..63u32).map(|a| 1u64 << a).find(|&k| scale(k) < bound)
}

/// `e^{2 pi i f}` for a fraction of a turn, exact on quarter turns.
pub fn unit_from_turns(turns: f64) -> Complex64 {
    let f = turns.rem_euclid(1.0);
    let q = (4.0 * f).floor();
    let r = 4.0 * f - q;
    let base = if r == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        let th = 0.5 * PI * r;
        Complex64::new(th.cos(), th.sin())
    };
    match q as u8 {
        0 => base,
        1 => Complex64::new(-base.im, base.re),
        2 => Complex64::new(-base.re, -base.im),
        _ => Complex64::new(base.im, -base.re),
    }
}

/// `zeta_1 = 1`, `zeta_p = e^{2 pi i a_{p-1}}`.
pub fn boundary_point(p: u64) -> Complex64 {
    assert!(p >= 1, "boundary index starts at 1");
    if p == 1 {
        Complex64::new(1.0, 0.0)
    } else {
        unit_from_turns(scale(p - 1))
    }
}

/// Argument in `[0, 2 pi)`.
pub fn arg_positive(z: Complex64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

// ---------------------------------------------------------------------------
// Calkin-Wilf rationals

/// The `n`-th Calkin-Wilf rational (`n >= 1`) as a reduced pair.
pub fn calkin_wilf(n: &BigUint) -> (BigUint, BigUint) {
    assert!(!n.is_zero(), "Calkin-Wilf index starts at 1");
    let (mut a, mut b) = (BigUint::one(), BigUint::one());
    let bits = n.bits();
    for i in (0..bits - 1).rev() {
        if n.bit(i) {
            a = &a + &b;
        } else {
            b = &a + &b;
        }
    }
    (a, b)
}

/// Position of the positive reduced fraction `a / b` in the Calkin-Wilf
/// sequence. Runs of equal path bits are consumed with one division.
pub fn calkin_wilf_index(a: &BigUint, b: &BigUint) -> BigUint {
    assert!(!a.is_zero() && !b.is_zero(), "positive rationals only");
    let g = a.gcd(b);
    let (mut a, mut b) = (a / &g, b / &g);
    // Path bits from the node up to the root, least significant first.
    let mut index = BigUint::zero();
    let mut shift: u64 = 0;
    while !(a.is_one() && b.is_one()) {
        if a > b {
            // Right children: (a - b) / b, repeated q times.
            let (mut q, r) = a.div_rem(&b);
            let r = if r.is_zero() {
                q -= 1u32;
                b.clone()
            } else {
                r
            };
            let run = q.to_u64().expect("path run fits in u64");
            let ones = (BigUint::one() << run) - 1u32;
            index |= ones << shift;
            shift += run;
            a = r;
        } else {
            let (mut q, r) = b.div_rem(&a);
            let r = if r.is_zero() {
                q -= 1u32;
                a.clone()
            } else {
                r
            };
            shift += q.to_u64().expect("path run fits in u64");
            b = r;
        }
    }
    index | (BigUint::one() << shift)
}

/// `r_1 = 0`, `r_{2n} = c_n`, `r_{2n+1} = -c_n`.
pub fn rational_at(idx: &BigUint) -> BigRational {
    assert!(!idx.is_zero(), "rational index starts at 1");
    if idx.is_one() {
        return BigRational::zero();
    }
    let (n, odd) = idx.div_rem(&BigUint::from(2u32));
    let (a, b) = calkin_wilf(&n);
    let sign = if odd.is_zero() { Sign::Plus } else { Sign::Minus };
    BigRational::new(BigInt::from_biguint(sign, a), BigInt::from_biguint(Sign::Plus, b))
}

pub fn rational_index(q: &BigRational) -> BigUint {
    if q.is_zero() {
        return BigUint::one();
    }
    let a = q.numer().abs().to_biguint().expect("nonnegative");
    let b = q.denom().abs().to_biguint().expect("nonnegative");
    let n = calkin_wilf_index(&a, &b);
    let two_n: BigUint = n << 1;
    if q.is_negative() {
        two_n + 1u32
    } else {
        two_n
    }
}

// ---------------------------------------------------------------------------
// Cantor pairing and the polynomial enumeration

pub fn cantor_pair(x: &BigUint, y: &BigUint) -> BigUint {
    let s = x + y;
    (&s * (&s + 1u32)) / 2u32 + y
}

pub fn cantor_unpair(z: &BigUint) -> (BigUint, BigUint) {
    let w = ((z * 8u32 + 1u32).sqrt() - 1u32) / 2u32;
    let t = (&w * (&w + 1u32)) / 2u32;
    let y = z - t;
    let x = w - &y;
    (x, y)
}

/// 0-based index of a Gaussian rational.
fn gaussian_index(g: &GaussianRational) -> BigUint {
    cantor_pair(&(rational_index(&g.re) - 1u32), &(rational_index(&g.im) - 1u32))
}

fn gaussian_at(idx: &BigUint) -> GaussianRational {
    let (re, im) = cantor_unpair(idx);
    GaussianRational::new(rational_at(&(re + 1u32)), rational_at(&(im + 1u32)))
}

/// Largest degree [`poly`] will decode.
pub const MAX_POLY_DEGREE: usize = 4096;

/// `p_j`: `p_1 = 0`; for `j >= 2`, `j - 2 = pair(degree, rest)` where `rest`
/// nests the coefficient indices by iterated pairing and the leading index
/// is shifted by one so it is never zero.
///
/// Most large indices encode enormous degrees; anything above
/// [`MAX_POLY_DEGREE`] is refused rather than allocated.
pub fn poly(j: &BigUint) -> Result<RationalPolynomial> {
    if j.is_zero() {
        return Err(Error::Domain("polynomial index starts at 1".into()));
    }
    if j.is_one() {
        return Ok(RationalPolynomial::zero());
    }
    let (deg, mut rest) = cantor_unpair(&(j - 2u32));
    let deg = deg
        .to_usize()
        .filter(|&d| d <= MAX_POLY_DEGREE)
        .ok_or_else(|| Error::Domain(format!("polynomial index {j} encodes degree {deg} above {MAX_POLY_DEGREE}")))?;
    let mut coeffs = Vec::with_capacity(deg + 1);
    for _ in 0..deg {
        let (c, r) = cantor_unpair(&rest);
        coeffs.push(gaussian_at(&c));
        rest = r;
    }
    coeffs.push(gaussian_at(&(rest + 1u32)));
    Ok(RationalPolynomial::new(coeffs))
}

pub fn poly_index(q: &RationalPolynomial) -> BigUint {
    if q.is_zero() {
        return BigUint::one();
    }
    let c = q.coeffs();
    let deg = c.len() - 1;
    let mut rest = gaussian_index(&c[deg]) - 1u32;
    for g in c[..deg].iter().rev() {
        rest = cantor_pair(&gaussian_index(g), &rest);
    }
    cantor_pair(&BigUint::from(deg), &rest) + 2u32
}

// ---------------------------------------------------------------------------
// Diagonal schedule of 6-tuples

pub const TUPLE_LEN: usize = 6;

fn binom(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Number of tuples of `len` positive integers summing to `sum`.
fn compositions(len: usize, sum: u64) -> u128 {
    if len == 0 {
        return u128::from(sum == 0);
    }
    if sum < len as u64 {
        return 0;
    }
    binom(sum - 1, len as u64 - 1)
}

/// `i`-th tuple `(m, j, p, s, t, l)`, ordered by coordinate sum then
/// lexicographically.
pub fn tuple_at(i: u64) -> [u64; TUPLE_LEN] {
    assert!(i >= 1, "tuple index starts at 1");
    let mut rank = (i - 1) as u128;
    let mut sum = TUPLE_LEN as u64;
    loop {
        let c = compositions(TUPLE_LEN, sum);
        if rank < c {
            break;
        }
        rank -= c;
        sum += 1;
    }
    let mut out = [0u64; TUPLE_LEN];
    let mut remaining = sum;
    for pos in 0..TUPLE_LEN {
        let left = TUPLE_LEN - pos - 1;
        if left == 0 {
            out[pos] = remaining;
            break;
        }
        let mut v = 1;
        loop {
            let c = compositions(left, remaining - v);
            if rank < c {
                break;
            }
            rank -= c;
            v += 1;
        }
        out[pos] = v;
        remaining -= v;
    }
    out
}

pub fn tuple_index(tuple: &[u64; TUPLE_LEN]) -> u64 {
    assert!(tuple.iter().all(|&x| x >= 1), "tuple entries start at 1");
    let sum: u64 = tuple.iter().sum();
    let mut rank: u128 = (TUPLE_LEN as u64..sum).map(|s| compositions(TUPLE_LEN, s)).sum();
    let mut remaining = sum;
    for (pos, &x) in tuple.iter().enumerate().take(TUPLE_LEN - 1) {
        let left = TUPLE_LEN - pos - 1;
        for v in 1..x {
            rank += compositions(left, remaining - v);
        }
        remaining -= x;
    }
    (rank + 1) as u64
}

// ---------------------------------------------------------------------------
// Subfamily curves and anchors

/// Level at which a dyadic parameter appears in the canonical enumeration:
/// the later of its depth and the first level whose window `|x| <= D + 1`
/// contains it.
fn dyadic_level(num: i64, depth: u32) -> u32 {
    let x = (num as f64 / (depth as f64).exp2()).abs();
    let window = if x <= 1.0 { 0 } else { (x.ceil() as u32) - 1 };
    depth.max(window)
}

/// Canonical enumeration of the countable subfamily: endpoints of `J` that
/// belong to `J`, then dyadic parameters level by level, each level ordered
/// by `(|x|, x)`.
pub fn subfamily_members(family: &CurveFamily, max_depth: u32) -> Vec<SubfamilyMember> {
    let j = family.param_domain;
    let endpoints = j.included_endpoints();
    let mut out: Vec<SubfamilyMember> = endpoints.iter().map(|&value| SubfamilyMember::Endpoint { value }).collect();
    if j.is_point() {
        return out;
    }
    for level in 0..=max_depth {
        let scale = (level as f64).exp2();
        let bound = (level as i64 + 1) << level;
        let mut push = |i: i64| {
            let m = SubfamilyMember::dyadic(i, level);
            let (num, depth) = match m {
                SubfamilyMember::Dyadic { num, depth } => (num, depth),
                SubfamilyMember::Endpoint { .. } => unreachable!(),
            };
            let x = i as f64 / scale;
            if dyadic_level(num, depth) == level && j.contains(x) && !endpoints.contains(&x) {
                out.push(m);
            }
        };
        push(0);
        for i in 1..=bound {
            push(-i);
            push(i);
        }
    }
    out
}

/// Resolved `C_{pl}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubfamilyCurve {
    pub member: SubfamilyMember,
    pub curve: CurveSpec,
    /// `None` for accumulating curves.
    pub endpoint: Option<Complex64>,
    pub accumulating: bool,
}

impl SubfamilyCurve {
    /// `b_{nlp}`: the curve point at fraction `a_n`, or for an accumulating
    /// spiral the `n`-th tail pass at the argument of `zeta`.
    pub fn anchor(&self, zeta: Complex64, n: u64) -> Result<Complex64> {
        if self.accumulating {
            let t = arg_positive(zeta) + 2.0 * PI * n as f64;
            return match self.curve.kind {
                CurveKind::SingleSpiral => self.curve.eval(t),
                _ => Err(Error::Certification("tail passes are defined for the single spiral only".into())),
            };
        }
        self.curve.point_at(scale(n))
    }
}

/// `C_{pl}`: the `l`-th subfamily member whose endpoint lies within `1/l` of
/// `zeta`, falling back to the member with the nearest endpoint.
pub fn subfamily_curve(family: &CurveFamily, zeta: Complex64, l: u64, max_depth: u32) -> Result<SubfamilyCurve> {
    if family.class != FamilyClass::UnitDisc {
        return Err(Error::Usage("subfamily curves need a unit-disc family".into()));
    }
    assert!(l >= 1, "curve index starts at 1");
    let members = subfamily_members(family, max_depth);
    let radius = 1.0 / l as f64;
    let mut count = 0;
    let mut nearest: Option<(f64, SubfamilyMember, Complex64)> = None;
    for m in members {
        let alpha = m.value();
        match endpoint(family, alpha, 1e-12)? {
            Endpoint::Accumulating => {
                return Ok(SubfamilyCurve { member: m, curve: family.member(alpha)?, endpoint: None, accumulating: true });
            }
            Endpoint::Point(e) => {
                let d = (e - zeta).norm();
                if d < radius {
                    count += 1;
                    if count == l {
                        return Ok(SubfamilyCurve {
                            member: m,
                            curve: family.member(alpha)?,
                            endpoint: Some(e),
                            accumulating: false,
                        });
                    }
                }
                if nearest.as_ref().is_none_or(|(best, _, _)| d < *best) {
                    nearest = Some((d, m, e));
                }
            }
        }
    }
    match nearest {
        Some((_, m, e)) => Ok(SubfamilyCurve {
            member: m,
            curve: family.member(m.value())?,
            endpoint: Some(e),
            accumulating: false,
        }),
        None => Err(Error::Certification("empty subfamily".into())),
    }
}

pub fn curve_anchor(family: &CurveFamily, zeta: Complex64, l: u64, n: u64, max_depth: u32) -> Result<Complex64> {
    subfamily_curve(family, zeta, l, max_depth)?.anchor(zeta, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn scale_examples() {
        assert_eq!(scale(1), 0.5);
        assert_eq!(scale(2), 0.25);
        assert_eq!(scale(3), 0.75);
        assert_eq!(scale(15), 15.0 / 16.0);
        assert_eq!(scale(32), 1.0 / 64.0);
        assert_eq!(scale_index(1, 6), Some(32));
        assert_eq!(scale_index(15, 4), Some(15));
        assert_eq!(smallest_scale_below(1.0 / 32.0), Some(32));
        assert_eq!(smallest_scale_below(1.0 / 8.0), Some(8));
    }

    #[test]
    fn boundary_examples() {
        assert_eq!(boundary_point(1), Complex64::new(1.0, 0.0));
        assert_eq!(boundary_point(2), Complex64::new(-1.0, 0.0));
        assert_eq!(boundary_point(3), Complex64::new(0.0, 1.0));
        assert_eq!(boundary_point(4), Complex64::new(0.0, -1.0));
        for p in 1..2000 {
            assert!((boundary_point(p).norm() - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn calkin_wilf_prefix() {
        let expect = [(1, 1), (1, 2), (2, 1), (1, 3), (3, 2), (2, 3), (3, 1), (1, 4)];
        for (i, &(a, b)) in expect.iter().enumerate() {
            let n = big(i as u64 + 1);
            assert_eq!(calkin_wilf(&n), (big(a), big(b)));
            assert_eq!(calkin_wilf_index(&big(a), &big(b)), n);
        }
        assert_eq!(calkin_wilf_index(&big(1000), &big(1)), (BigUint::one() << 1000u32) - 1u32);
    }

    #[test]
    fn rational_bijection_prefix() {
        assert_eq!(rational_at(&big(1)), BigRational::zero());
        assert_eq!(rational_at(&big(2)), q(1, 1));
        assert_eq!(rational_at(&big(3)), q(-1, 1));
        assert_eq!(rational_at(&big(4)), q(1, 2));
        for i in 1..500u64 {
            assert_eq!(rational_index(&rational_at(&big(i))), big(i));
        }
    }

    #[test]
    fn cantor_roundtrip() {
        for z in 0..2000u64 {
            let (x, y) = cantor_unpair(&big(z));
            assert_eq!(cantor_pair(&x, &y), big(z));
        }
        assert_eq!(cantor_pair(&big(13), &big(0)), big(91));
    }

    #[test]
    fn poly_examples() {
        assert!(poly(&big(1)).unwrap().is_zero());
        assert_eq!(poly_index(&RationalPolynomial::zero()), big(1));
        // Constant 1: degree 0, Gaussian index pair(1, 0) = 1, shifted to 0.
        let one = RationalPolynomial::new(vec![GaussianRational::from_ints(1, 0)]);
        assert_eq!(poly_index(&one), big(2));
        assert_eq!(poly(&big(2)).unwrap(), one);
        // (1/2 + i) z + 3, hand-enumerated: 3 -> r_14, 1/2 -> r_4, 1 -> r_2.
        let p = RationalPolynomial::new(vec![
            GaussianRational::new(q(3, 1), q(0, 1)),
            GaussianRational::new(q(1, 2), q(1, 1)),
        ]);
        assert_eq!(poly_index(&p), big(13_330_866));
        assert_eq!(poly(&big(13_330_866)).unwrap(), p);
        assert!(poly(&big(0)).is_err());
        assert!(poly(&BigUint::from(u64::MAX)).is_err());
    }

    #[test]
    fn tuple_examples() {
        assert_eq!(tuple_at(1), [1, 1, 1, 1, 1, 1]);
        assert_eq!(tuple_at(2), [1, 1, 1, 1, 1, 2]);
        assert_eq!(tuple_at(7), [2, 1, 1, 1, 1, 1]);
        assert_eq!(tuple_at(8), [1, 1, 1, 1, 1, 3]);
        for i in 1..=10_000 {
            assert_eq!(tuple_index(&tuple_at(i)), i);
        }
    }

    #[test]
    fn subfamily_enumeration_order() {
        let f = CurveFamily::radii();
        let m = subfamily_members(&f, 2);
        let vals: Vec<f64> = m.iter().map(|m| m.value()).collect();
        assert_eq!(&vals[..5], &[0.0, 1.0, 0.5, 1.5, 2.0]);
        let mut sorted = vals.clone();
        sorted.sort_by(f64::total_cmp);
        sorted.dedup();
        assert_eq!(sorted.len(), vals.len());
    }

    #[test]
    fn subfamily_curve_examples() {
        let f = CurveFamily::radii();
        let c = subfamily_curve(&f, boundary_point(1), 1, 12).unwrap();
        assert_eq!(c.member, SubfamilyMember::Endpoint { value: 0.0 });

        // zeta_3 = i, l = 2: dyadic angles within 1/2 of i, second in order.
        let c = subfamily_curve(&f, boundary_point(3), 2, 12).unwrap();
        let within: Vec<f64> = subfamily_members(&f, 12)
            .iter()
            .map(|m| m.value())
            .filter(|a| (Complex64::from_polar(1.0, *a) - Complex64::i()).norm() < 0.5)
            .take(2)
            .collect();
        assert_eq!(c.member.value(), within[1]);

        let s = subfamily_curve(&CurveFamily::single_spiral(), boundary_point(5), 7, 12).unwrap();
        assert!(s.accumulating);
    }

    #[test]
    fn anchor_examples() {
        let f = CurveFamily::radii();
        let zeta = boundary_point(1);
        assert_eq!(curve_anchor(&f, zeta, 1, 1, 12).unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(curve_anchor(&f, zeta, 1, 15, 12).unwrap(), Complex64::new(15.0 / 16.0, 0.0));
        let b = curve_anchor(&CurveFamily::single_spiral(), zeta, 1, 3, 12).unwrap();
        assert!((b.re - 0.9999999935).abs() < 1e-10);
        assert!(b.im.abs() < 1e-14);
    }
}
