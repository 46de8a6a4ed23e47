use std::fmt;

use num_complex::Complex64;

use super::poly::Poly;
use super::scalar::ExactScalar;
use crate::error::{Error, Result};

/// Quotient of two polynomials in a single variable.
///
/// Common powers of the variable are always cancelled; no further gcd
/// reduction is attempted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFn {
    var: String,
    numerator: Poly,
    denominator: Poly,
}

impl RationalFn {
    pub fn new(var: &str, numerator: Poly, denominator: Poly) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::Internal("rational function with zero denominator".into()));
        }
        for p in [&numerator, &denominator] {
            if p.vars().iter().any(|v| v != var) {
                return Err(Error::Internal(format!(
                    "rational function in {var} built from polynomial `{p}`"
                )));
            }
        }
        let k = numerator
            .lowest_degree_in(var)
            .unwrap_or(u32::MAX)
            .min(denominator.lowest_degree_in(var).unwrap_or(0));
        let (numerator, denominator) = if k > 0 && !numerator.is_zero() {
            (
                numerator.divide_by_var_power(var, k).expect("common factor"),
                denominator.divide_by_var_power(var, k).expect("common factor"),
            )
        } else if numerator.is_zero() {
            (Poly::zero(), Poly::one())
        } else {
            (numerator, denominator)
        };
        Ok(Self {
            var: var.to_string(),
            numerator,
            denominator,
        })
    }

    /// `numerator / (c · var^order)`.
    pub fn over_monomial(var: &str, numerator: Poly, c: ExactScalar, order: u32) -> Result<Self> {
        Self::new(var, numerator, Poly::monomial(c, &[(var, order)]))
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn numerator(&self) -> &Poly {
        &self.numerator
    }

    pub fn denominator(&self) -> &Poly {
        &self.denominator
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// `(c, m)` if the denominator is `c · var^m`.
    pub fn monomial_denominator(&self) -> Option<(ExactScalar, u32)> {
        let terms = self.denominator.terms();
        if terms.len() != 1 {
            return None;
        }
        let (exps, c) = terms[0];
        Some((c.clone(), exps.first().copied().unwrap_or(0)))
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        Self::new(&self.var, self.numerator.scale(c), self.denominator.clone())
            .expect("scaling keeps a valid rational function")
    }

    pub fn mul_poly(&self, p: &Poly) -> Result<Self> {
        Self::new(&self.var, &self.numerator * p, self.denominator.clone())
    }

    pub fn eval(&self, x: Complex64) -> Result<Complex64> {
        let at = [(self.var.as_str(), x)];
        Ok(self.numerator.eval_complex(&at)? / self.denominator.eval_complex(&at)?)
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.numerator, self.denominator)
    }
}
