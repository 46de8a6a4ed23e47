//! Exact scalars: Gaussian rationals graded by powers of π.
//!
//! A homogeneous scalar is `(re + i·im)·π^k`, optionally times `√(2π)`.
//! The extra square-root grade is needed for the Fourier normalisation
//! `(2π)^{±1/2}`; all other constants are integral powers of π.
//! Sums of scalars with different grades are kept as formal sums of their
//! homogeneous parts.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rational_int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    // BigRational::to_f64 handles huge numerators/denominators without overflow.
    r.to_f64().unwrap_or(f64::NAN)
}

/// `re + i·im` with rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(Rational::zero(), Rational::zero())
    }

    pub fn one() -> Self {
        Self::real(Rational::one())
    }

    pub fn i() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn real(re: Rational) -> Self {
        Self::new(re, Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self::new(&self.re * r, &self.im * r)
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self::new(&self.re / &n, -&self.im / &n))
    }

    /// `i^k` for any integer k.
    pub fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Self::one(),
            1 => Self::i(),
            2 => Self::real(-Rational::one()),
            _ => Self::new(Rational::zero(), -Rational::one()),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

impl Add<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Mul<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-&self.re, -&self.im)
    }
}

/// Transcendental grade of a homogeneous scalar: `π^pi_power · (2π)^{1/2 if sqrt_two_pi}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Grade {
    pub pi_power: i32,
    pub sqrt_two_pi: bool,
}

impl Grade {
    pub const ONE: Grade = Grade {
        pi_power: 0,
        sqrt_two_pi: false,
    };

    pub fn pi(pi_power: i32) -> Self {
        Grade {
            pi_power,
            sqrt_two_pi: false,
        }
    }

    /// Product of two grades and the rational factor it releases
    /// (`√(2π)·√(2π) = 2·π`).
    fn combine(self, other: Grade) -> (Grade, Rational) {
        let pi_power = self.pi_power + other.pi_power;
        if self.sqrt_two_pi && other.sqrt_two_pi {
            (Grade::pi(pi_power + 1), rational_int(2))
        } else {
            (
                Grade {
                    pi_power,
                    sqrt_two_pi: self.sqrt_two_pi || other.sqrt_two_pi,
                },
                Rational::one(),
            )
        }
    }

    fn inverse(self) -> (Grade, Rational) {
        if self.sqrt_two_pi {
            // 1/√(2π) = √(2π)/(2π)
            (
                Grade {
                    pi_power: -self.pi_power - 1,
                    sqrt_two_pi: true,
                },
                rational(1, 2),
            )
        } else {
            (Grade::pi(-self.pi_power), Rational::one())
        }
    }

    pub fn to_f64(self) -> f64 {
        let base = std::f64::consts::PI.powi(self.pi_power);
        if self.sqrt_two_pi {
            base * (2.0 * std::f64::consts::PI).sqrt()
        } else {
            base
        }
    }
}

/// Exact scalar: a finite formal sum of homogeneous parts `c_g · g`.
///
/// Zero is the empty sum; no part is ever stored with a zero coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ExactScalar {
    parts: BTreeMap<Grade, GaussianRational>,
}

impl ExactScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn i() -> Self {
        Self::graded(GaussianRational::i(), Grade::ONE)
    }

    pub fn pi() -> Self {
        Self::graded(GaussianRational::one(), Grade::pi(1))
    }

    pub fn sqrt_two_pi() -> Self {
        Self::graded(
            GaussianRational::one(),
            Grade {
                pi_power: 0,
                sqrt_two_pi: true,
            },
        )
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(rational_int(v))
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::graded(GaussianRational::real(r), Grade::ONE)
    }

    pub fn from_gaussian(g: GaussianRational) -> Self {
        Self::graded(g, Grade::ONE)
    }

    /// `(re + i·im)·π^pi_power`.
    pub fn homogeneous(re: Rational, im: Rational, pi_power: i32) -> Self {
        Self::graded(GaussianRational::new(re, im), Grade::pi(pi_power))
    }

    pub fn graded(coefficient: GaussianRational, grade: Grade) -> Self {
        let mut parts = BTreeMap::new();
        if !coefficient.is_zero() {
            parts.insert(grade, coefficient);
        }
        Self { parts }
    }

    /// `(2π)^k` as an exact scalar, k any integer.
    pub fn two_pi_pow(k: i32) -> Self {
        let two = rational_int(2);
        let factor = if k >= 0 {
            num_traits::pow(two, k as usize)
        } else {
            Rational::one() / num_traits::pow(two, (-k) as usize)
        };
        Self::homogeneous(factor, Rational::zero(), k)
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self == &Self::one()
    }

    pub fn parts(&self) -> impl Iterator<Item = (&Grade, &GaussianRational)> {
        self.parts.iter()
    }

    /// The single homogeneous part, if this scalar has exactly one.
    pub fn as_homogeneous(&self) -> Option<(Grade, &GaussianRational)> {
        if self.parts.len() == 1 {
            self.parts.iter().next().map(|(g, c)| (*g, c))
        } else {
            None
        }
    }

    /// Rational value, if this is a real scalar free of π.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        match self.as_homogeneous() {
            Some((Grade::ONE, c)) if c.is_real() => Some(c.re.clone()),
            _ => None,
        }
    }

    /// Real part of the homogeneous coefficient (zero for the zero scalar).
    pub fn re(&self) -> Option<Rational> {
        self.homogeneous_field(|c| c.re.clone())
    }

    pub fn im(&self) -> Option<Rational> {
        self.homogeneous_field(|c| c.im.clone())
    }

    pub fn pi_power(&self) -> Option<i32> {
        if self.is_zero() {
            return Some(0);
        }
        self.as_homogeneous().map(|(g, _)| g.pi_power)
    }

    fn homogeneous_field(&self, f: impl Fn(&GaussianRational) -> Rational) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        self.as_homogeneous().map(|(_, c)| f(c))
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        Self {
            parts: self
                .parts
                .iter()
                .map(|(g, c)| (*g, c.scale(r)))
                .collect(),
        }
    }

    pub fn scale_gaussian(&self, z: &GaussianRational) -> Self {
        self * &Self::from_gaussian(z.clone())
    }

    /// Multiplicative inverse; only homogeneous nonzero scalars are units.
    pub fn inv(&self) -> Result<Self> {
        let (grade, coefficient) = self
            .as_homogeneous()
            .ok_or_else(|| Error::NotInvertible(self.to_string()))?;
        let c = coefficient
            .inv()
            .ok_or_else(|| Error::NotInvertible(self.to_string()))?;
        let (g, factor) = grade.inverse();
        Ok(Self::graded(c.scale(&factor), g))
    }

    pub fn div(&self, rhs: &ExactScalar) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_complex(&self) -> Complex64 {
        self.parts
            .iter()
            .map(|(g, c)| c.to_complex() * g.to_f64())
            .sum()
    }

    fn insert_part(parts: &mut BTreeMap<Grade, GaussianRational>, g: Grade, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match parts.get_mut(&g) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    parts.remove(&g);
                } else {
                    *existing = sum;
                }
            }
            None => {
                parts.insert(g, c);
            }
        }
    }
}

impl From<Rational> for ExactScalar {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

impl From<i64> for ExactScalar {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

impl Add<&ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        let mut parts = self.parts.clone();
        for (g, c) in &rhs.parts {
            ExactScalar::insert_part(&mut parts, *g, c.clone());
        }
        ExactScalar { parts }
    }
}

impl Sub<&ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        self + &(-rhs)
    }
}

impl Mul<&ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        let mut parts = BTreeMap::new();
        for (ga, ca) in &self.parts {
            for (gb, cb) in &rhs.parts {
                let (g, factor) = ga.combine(*gb);
                ExactScalar::insert_part(&mut parts, g, (ca * cb).scale(&factor));
            }
        }
        ExactScalar { parts }
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar {
            parts: self.parts.iter().map(|(g, c)| (*g, -c)).collect(),
        }
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

macro_rules! forward_by_value {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr<ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &ExactScalar) -> ExactScalar {
                (&self).$method(rhs)
            }
        }
    )*};
}

forward_by_value!(Add add, Sub sub, Mul mul);

impl AddAssign<&ExactScalar> for ExactScalar {
    fn add_assign(&mut self, rhs: &ExactScalar) {
        for (g, c) in &rhs.parts {
            ExactScalar::insert_part(&mut self.parts, *g, c.clone());
        }
    }
}

impl std::iter::Sum for ExactScalar {
    fn sum<I: Iterator<Item = ExactScalar>>(iter: I) -> Self {
        let mut acc = ExactScalar::zero();
        for x in iter {
            acc += &x;
        }
        acc
    }
}

pub(crate) fn fmt_rational_abs(r: &Rational) -> String {
    let r = r.abs();
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("({}/{})", r.numer(), r.denom())
    }
}

fn fmt_rational_signed_bare(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Renders one homogeneous part as `(negative, body)`.
pub(crate) fn render_part(grade: Grade, c: &GaussianRational) -> (bool, String) {
    let mut factors: Vec<String> = Vec::new();
    match grade.pi_power {
        0 => {}
        1 => factors.push("pi".into()),
        k if k > 0 => factors.push(format!("pi^{k}")),
        k => factors.push(format!("pi^({k})")),
    }
    if grade.sqrt_two_pi {
        factors.push("sqrt(2*pi)".into());
    }

    let (negative, coefficient) = if c.im.is_zero() {
        let mag = c.re.abs();
        let coef = if mag.is_one() && !factors.is_empty() {
            None
        } else {
            Some(fmt_rational_abs(&mag))
        };
        (c.re.is_negative(), coef)
    } else if c.re.is_zero() {
        let mag = c.im.abs();
        let coef = if mag.is_one() {
            "i".to_string()
        } else {
            format!("{}*i", fmt_rational_abs(&mag))
        };
        (c.im.is_negative(), Some(coef))
    } else {
        let sep = if c.im.is_negative() { " - " } else { " + " };
        let mag = c.im.abs();
        let imag = if mag.is_one() {
            "i".to_string()
        } else {
            format!("{}*i", fmt_rational_signed_bare(&mag))
        };
        (
            false,
            Some(format!("({}{}{})", fmt_rational_signed_bare(&c.re), sep, imag)),
        )
    };

    let mut pieces: Vec<String> = coefficient.into_iter().collect();
    pieces.extend(factors);
    (negative, pieces.join("*"))
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (g, c)) in self.parts.iter().enumerate() {
            let (negative, body) = render_part(*g, c);
            match (idx, negative) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for ExactScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let p: crate::algebra::Poly = s.parse()?;
        p.as_constant().ok_or_else(|| Error::Parse {
            position: 0,
            message: format!("expected a constant, found polynomial `{p}`"),
        })
    }
}
