//! Univariate polynomials over the rationals.
//!
//! Coefficients are stored in ascending degree with a nonzero leading
//! coefficient (the zero polynomial is the empty list). Division, gcd, and
//! the extended Euclidean algorithm are exact; numeric root extraction is the
//! one floating-point door, used to locate common zeros for violation
//! certificates.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num::complex::Complex64;
use num::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::rational::{format_rational, parse_rational, to_f64, Rational};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RationalPolynomial {
    coeffs: Vec<Rational>,
}

impl RationalPolynomial {
    /// Build from ascending coefficients; trailing zeros are trimmed.
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `coeff · x^degree`.
    pub fn monomial(degree: usize, coeff: Rational) -> Self {
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = coeff;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    /// Monic multiple (unchanged zero polynomial).
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lead) => {
                let inv = Rational::one() / lead;
                Self::new(self.coeffs.iter().map(|c| c * &inv).collect())
            }
        }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn eval_rational(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_complex(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + to_f64(c);
        }
        acc
    }

    /// Quotient and remainder with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let d_lead = divisor
            .leading()
            .ok_or_else(|| Error::InvalidInput("division by zero polynomial".into()))?;
        let d_deg = divisor.degree().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() < divisor.coeffs.len() {
            return Ok((Self::zero(), self.clone()));
        }
        let q_len = rem.len() - divisor.coeffs.len() + 1;
        let mut quot = vec![Rational::zero(); q_len];
        for k in (0..q_len).rev() {
            let factor = &rem[k + d_deg] / d_lead;
            if factor.is_zero() {
                continue;
            }
            for (i, dc) in divisor.coeffs.iter().enumerate() {
                let delta = dc * &factor;
                rem[k + i] -= delta;
            }
            quot[k] = factor;
        }
        rem.truncate(d_deg);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// True when `divisor` divides `self` exactly.
    pub fn divisible_by(&self, divisor: &Self) -> bool {
        match self.div_rem(divisor) {
            Ok((_, rem)) => rem.is_zero(),
            Err(_) => false,
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("b is nonzero");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended Euclid: returns `(g, u, v)` with `u·self + v·other = g` and
    /// `g` the monic gcd.
    pub fn extended_gcd(&self, other: &Self) -> (Self, Self, Self) {
        let mut r0 = self.clone();
        let mut r1 = other.clone();
        let mut s0 = Self::one();
        let mut s1 = Self::zero();
        let mut t0 = Self::zero();
        let mut t1 = Self::one();
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1).expect("r1 is nonzero");
            let s = &s0 - &(&q * &s1);
            let t = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.leading() {
            None => (Self::zero(), Self::zero(), Self::zero()),
            Some(lead) => {
                let inv = Rational::one() / lead;
                (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
            }
        }
    }

    /// Numeric roots via the companion matrix of the monic form, polished
    /// with a few Newton steps. Deterministically sorted by
    /// `(|x|, Re x, Im x)`.
    pub fn complex_roots(&self) -> Vec<Complex64> {
        let monic = self.monic();
        let n = match monic.degree() {
            None | Some(0) => return Vec::new(),
            Some(n) => n,
        };
        let mut companion = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            companion[(i, n - 1)] = -to_f64(&monic.coeffs[i]);
        }
        let mut roots: Vec<Complex64> = companion.complex_eigenvalues().iter().copied().collect();
        // Newton polish against the exact coefficients.
        let deriv_coeffs: Vec<Rational> = monic
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * Rational::from_integer(k.into()))
            .collect();
        let deriv = Self::new(deriv_coeffs);
        for root in roots.iter_mut() {
            for _ in 0..3 {
                let f = monic.eval_complex(*root);
                let df = deriv.eval_complex(*root);
                if df.norm() > 1e-300 {
                    *root -= f / df;
                }
            }
        }
        roots.sort_by(|a, b| {
            (a.norm(), a.re, a.im)
                .partial_cmp(&(b.norm(), b.re, b.im))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        roots
    }

    /// Factor out the largest power of `x`: returns `(v, q)` with
    /// `self = x^v · q` and `q(0) ≠ 0`.
    pub fn split_power_of_x(&self) -> (usize, Self) {
        if self.is_zero() {
            return (0, Self::zero());
        }
        let v = self
            .coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(0);
        (v, Self::new(self.coeffs[v..].to_vec()))
    }
}

impl Add for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn add(self, rhs: Self) -> RationalPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) + rhs.coeff(k));
        }
        RationalPolynomial::new(coeffs)
    }
}

impl Sub for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn sub(self, rhs: Self) -> RationalPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) - rhs.coeff(k));
        }
        RationalPolynomial::new(coeffs)
    }
}

impl Mul for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn mul(self, rhs: Self) -> RationalPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return RationalPolynomial::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        RationalPolynomial::new(coeffs)
    }
}

impl Neg for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn neg(self) -> RationalPolynomial {
        RationalPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let mag = c.abs();
            match k {
                0 => write!(f, "{}", format_rational(&mag))?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{} ", format_rational(&mag))?;
                    }
                    if k == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl Serialize for RationalPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs: Vec<String> = self.coeffs.iter().map(|c| format_rational(c)).collect();
        coeffs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalPolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let coeffs = Vec::<String>::deserialize(deserializer)?;
        let coeffs = coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Ok(Self::new(coeffs))
    }
}
