//! Complex polynomials in the monomial basis, exact Gaussian-rational
//! polynomials, and the [`Evaluable`] abstraction shared by everything that
//! can be measured on a disk.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Anything holomorphic that can be sampled at a point.
pub trait Evaluable {
    fn eval(&self, z: Complex64) -> Complex64;

    /// Analytic derivative, when the representation supports it.
    fn derivative(&self, _z: Complex64) -> Option<Complex64> {
        None
    }
}

impl<F: Fn(Complex64) -> Complex64> Evaluable for F {
    fn eval(&self, z: Complex64) -> Complex64 {
        self(z)
    }
}

/// Pointwise sum of two evaluables.
pub struct Sum<'a>(pub &'a dyn Evaluable, pub &'a dyn Evaluable);

impl Evaluable for Sum<'_> {
    fn eval(&self, z: Complex64) -> Complex64 {
        self.0.eval(z) + self.1.eval(z)
    }

    fn derivative(&self, z: Complex64) -> Option<Complex64> {
        Some(self.0.derivative(z)? + self.1.derivative(z)?)
    }
}

/// Complex polynomial stored as monomial coefficients, lowest degree first.
///
/// Trailing zero coefficients are stripped, so the zero polynomial has no
/// coefficients at all.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Polynomial::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn max_coeff_magnitude(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn horner(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::zero(), |acc, c| acc * z + c)
    }

    pub fn horner_derivative(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::zero();
        for (k, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * z + c * k as f64;
        }
        acc
    }
}

impl Evaluable for Polynomial {
    fn eval(&self, z: Complex64) -> Complex64 {
        self.horner(z)
    }

    fn derivative(&self, z: Complex64) -> Option<Complex64> {
        Some(self.horner_derivative(z))
    }
}

/// An element of Q + iQ.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussianRational::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    pub fn zero() -> Self {
        GaussianRational::from_ints(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "({})i", self.im),
            (false, false) => write!(f, "{} + ({})i", self.re, self.im),
        }
    }
}

/// Polynomial with exact Gaussian-rational coefficients, lowest degree first,
/// trailing zeros stripped.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RationalPolynomial {
    coeffs: Vec<GaussianRational>,
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<GaussianRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RationalPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        RationalPolynomial { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn to_complex(&self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(GaussianRational::to_complex).collect())
    }

    /// Recovers exact rational coefficients from doubles. Each component must
    /// equal a fraction with denominator at most `max_den` when rounded back
    /// to `f64`; anything else (e.g. an approximation of pi) is rejected.
    pub fn from_complex(p: &Polynomial, max_den: u64) -> Result<Self> {
        let mut out = Vec::with_capacity(p.coeffs().len());
        for c in p.coeffs() {
            let re = recover_rational(c.re, max_den)?;
            let im = recover_rational(c.im, max_den)?;
            out.push(GaussianRational::new(re, im));
        }
        Ok(RationalPolynomial::new(out))
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "[{c}]z")?,
                _ => write!(f, "[{c}]z^{k}")?,
            }
        }
        Ok(())
    }
}

/// Best rational approximation with bounded denominator (continued
/// fractions); succeeds only if it reproduces `x` exactly in `f64`.
pub fn recover_rational(x: f64, max_den: u64) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::Usage(format!("coefficient {x} is not finite")));
    }
    let sign: i64 = if x < 0.0 { -1 } else { 1 };
    let ax = x.abs();
    let (mut h0, mut h1): (i128, i128) = (0, 1);
    let (mut k0, mut k1): (i128, i128) = (1, 0);
    let mut r = ax;
    for _ in 0..64 {
        let a = r.floor();
        if a > 1e18 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (h1 as f64) / (k1 as f64) == ax {
            let num = BigInt::from(h1) * sign;
            return Ok(BigRational::new(num, BigInt::from(k1)));
        }
        let frac = r - a;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    Err(Error::Usage(format!(
        "coefficient {x} is not a rational with denominator <= {max_den}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner_matches_direct_sum() {
        let p = Polynomial::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0), Complex64::new(-3.0, 0.5)]);
        let z = Complex64::new(0.3, -0.7);
        let direct = p.coeffs()[0] + p.coeffs()[1] * z + p.coeffs()[2] * z * z;
        assert!((p.eval(z) - direct).norm() < 1e-15);
        let d = p.coeffs()[1] + p.coeffs()[2] * z * 2.0;
        assert!((p.horner_derivative(z) - d).norm() < 1e-15);
    }

    #[test]
    fn trailing_zeros_stripped() {
        let p = Polynomial::new(vec![Complex64::new(1.0, 0.0), Complex64::zero()]);
        assert_eq!(p.coeffs().len(), 1);
        assert!(Polynomial::new(vec![Complex64::zero()]).is_zero());
    }

    #[test]
    fn rational_recovery() {
        let half = recover_rational(0.5, 1 << 20).unwrap();
        assert_eq!(half, BigRational::new(1.into(), 2.into()));
        let third = recover_rational(-1.0 / 3.0, 1 << 20).unwrap();
        assert_eq!(third, BigRational::new((-1).into(), 3.into()));
        assert!(recover_rational(std::f64::consts::PI, 1 << 20).is_err());
        assert_eq!(recover_rational(0.0, 10).unwrap(), BigRational::zero());
    }
}
