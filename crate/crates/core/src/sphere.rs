//! Weighted Sasakian spheres `S^{2n+1}` with a circle action.
//!
//! The contact form is `α_w = α_1 / Σ w_j|z_j|²`, the circle acts with integer
//! weights `β`, and the contact moment map is `μ(z) = Σβ_j|z_j|² / Σw_j|z_j|²`.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{
    format_rational, parse_rational, rational_to_f64, ExactScalar, Poly, Rational,
};
use crate::error::{Error, Result};

/// Equivariant parameter of the acting circle.
pub const U: &str = "u";
/// Generator coming from the Reeb direction.
pub const S: &str = "s";
/// Integration variable on the Lie algebra.
pub const PHI: &str = "phi";
/// Dual variable of the Fourier transform.
pub const Y: &str = "y";

/// Tolerance on `Σ|z_j|² = 1` accepted by [`WeightedSphere::moment_map`].
pub const ON_SPHERE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedSphere {
    n: usize,
    w: Vec<Rational>,
    beta: Vec<i64>,
    lambdas: Vec<Rational>,
    distinct: bool,
}

impl WeightedSphere {
    pub fn new(w: Vec<Rational>, beta: Vec<i64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidSphere("need at least one weight".into()));
        }
        if w.len() != beta.len() {
            return Err(Error::InvalidSphere(format!(
                "{} Reeb weights but {} action weights",
                w.len(),
                beta.len()
            )));
        }
        if let Some((j, wj)) = w.iter().enumerate().find(|(_, x)| !x.is_positive()) {
            return Err(Error::InvalidSphere(format!(
                "Reeb weight w_{j} = {} must be positive",
                format_rational(wj)
            )));
        }
        let lambdas: Vec<Rational> = w
            .iter()
            .zip(&beta)
            .map(|(wj, bj)| Rational::from_integer(BigInt::from(*bj)) / wj)
            .collect();
        let distinct = find_coincidence(&lambdas).is_none();
        Ok(Self {
            n: w.len() - 1,
            w,
            beta,
            lambdas,
            distinct,
        })
    }

    /// Convenience constructor from `"p/q"` strings.
    pub fn parse(w: &[&str], beta: &[i64]) -> Result<Self> {
        let w = w.iter().map(|x| parse_rational(x)).collect::<Result<_>>()?;
        Self::new(w, beta.to_vec())
    }

    /// `S³` with Reeb weights `(w, 1)` and action weights `(-1, 1)`.
    pub fn s3_example(w: Rational) -> Result<Self> {
        Self::new(vec![w, Rational::one()], vec![-1, 1])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[Rational] {
        &self.w
    }

    pub fn beta(&self) -> &[i64] {
        &self.beta
    }

    /// `λ_j = β_j / w_j`.
    pub fn lambdas(&self) -> &[Rational] {
        &self.lambdas
    }

    pub fn has_distinct_lambdas(&self) -> bool {
        self.distinct
    }

    pub fn weight_product(&self) -> Rational {
        self.w.iter().fold(Rational::one(), |acc, x| acc * x)
    }

    pub fn lambda_range(&self) -> (Rational, Rational) {
        let min = self.lambdas.iter().min().cloned().expect("nonempty");
        let max = self.lambdas.iter().max().cloned().expect("nonempty");
        (min, max)
    }

    /// Same Reeb weights, different action.
    pub fn with_beta(&self, beta: Vec<i64>) -> Result<Self> {
        Self::new(self.w.clone(), beta)
    }

    fn h(&self, z: &[Complex64]) -> f64 {
        self.w
            .iter()
            .zip(z)
            .map(|(wj, zj)| rational_to_f64(wj) * zj.norm_sqr())
            .sum()
    }

    /// Conformal factor `h(z) = Σ w_j|z_j|²` with `α_w = α_1 / h`.
    pub fn conformal_factor(&self, z: &[Complex64]) -> f64 {
        self.h(z)
    }

    pub fn moment_map(&self, z: &[Complex64]) -> Result<f64> {
        if z.len() != self.n + 1 {
            return Err(Error::InvalidSphere(format!(
                "point has {} coordinates, sphere needs {}",
                z.len(),
                self.n + 1
            )));
        }
        let norm_sq: f64 = z.iter().map(|x| x.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > ON_SPHERE_TOLERANCE {
            return Err(Error::OffSphere { norm_sq });
        }
        Ok(self.moment_map_unchecked(z))
    }

    pub(crate) fn moment_map_unchecked(&self, z: &[Complex64]) -> f64 {
        let num: f64 = self
            .beta
            .iter()
            .zip(z)
            .map(|(b, zj)| *b as f64 * zj.norm_sqr())
            .sum();
        num / self.h(z)
    }

    /// 0 is a regular value iff it lies strictly inside the image `[min λ, max λ]`
    /// and is not a critical level.
    pub fn check_zero_regular(&self) -> bool {
        self.zero_regularity().is_ok()
    }

    /// Like [`Self::check_zero_regular`] but names the offending level.
    pub fn zero_regularity(&self) -> Result<()> {
        if let Some(j) = self.lambdas.iter().position(|l| l.is_zero()) {
            return Err(Error::ZeroNotRegular {
                reason: format!("lambda_{j} = beta_{j}/w_{j} = 0 is a critical level"),
            });
        }
        let (min, max) = self.lambda_range();
        if !min.is_negative() || !max.is_positive() {
            return Err(Error::ZeroNotRegular {
                reason: format!(
                    "0 lies outside the moment image [{}, {}] (lambdas = {})",
                    format_rational(&min),
                    format_rational(&max),
                    self.lambdas
                        .iter()
                        .map(format_rational)
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
            });
        }
        Ok(())
    }

    pub fn require_distinct_lambdas(&self) -> Result<()> {
        match find_coincidence(&self.lambdas) {
            None => Ok(()),
            Some((first, second)) => Err(Error::DegenerateCriticalSet {
                first,
                second,
                lambda: format_rational(&self.lambdas[first]),
            }),
        }
    }

    /// The coordinate circles `C_j` with their localization data.
    pub fn critical_circles(&self) -> Result<Vec<CriticalCircle>> {
        self.require_distinct_lambdas()?;
        let n = self.n as u32;
        let circles = (0..=self.n)
            .map(|j| {
                let lambda_j = &self.lambdas[j];
                let product = (0..=self.n)
                    .filter(|&k| k != j)
                    .map(|k| Rational::from_integer(self.beta[k].into()) - lambda_j * &self.w[k])
                    .fold(Rational::one(), |acc, x| acc * x);
                // (u/2π)^n Π_{k≠j} (β_k - β_j w_k/w_j)
                let euler_coefficient = ExactScalar::two_pi_pow(-(n as i32)).scale(&product);
                CriticalCircle {
                    index: j,
                    mu_value: lambda_j.clone(),
                    euler_class: Poly::monomial(euler_coefficient.clone(), &[(U, n)]),
                    euler_coefficient,
                    restriction_slope: -lambda_j,
                    alpha_integral: ExactScalar::homogeneous(
                        Rational::from_integer(2.into()) / &self.w[j],
                        Rational::zero(),
                        1,
                    ),
                }
            })
            .collect();
        Ok(circles)
    }

    /// Order of the generic isotropy group: `gcd_j |β_j|`.
    pub fn regular_isotropy_order(&self) -> u64 {
        let g = self
            .beta
            .iter()
            .fold(0i64, |acc, b| acc.gcd(&b.abs()));
        g.max(1) as u64
    }

    /// `Π_j (β_j u + w_j s)`, the relation in the equivariant basic cohomology ring.
    pub fn ideal_generator(&self) -> Poly {
        self.w
            .iter()
            .zip(&self.beta)
            .map(|(wj, bj)| {
                &Poly::var(U).scale(&ExactScalar::from_int(*bj))
                    + &Poly::var(S).scale(&ExactScalar::from_rational(wj.clone()))
            })
            .fold(Poly::one(), |acc, f| &acc * &f)
    }

    pub fn to_spec(&self) -> SphereSpec {
        SphereSpec {
            n: self.n,
            w: self.w.iter().map(|x| RationalText::Text(format_rational(x))).collect(),
            beta: self.beta.clone(),
        }
    }
}

impl fmt::Display for WeightedSphere {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.w.iter().map(format_rational).collect();
        let b: Vec<String> = self.beta.iter().map(|x| x.to_string()).collect();
        write!(f, "S^{}(w = [{}], beta = [{}])", 2 * self.n + 1, w.join(", "), b.join(", "))
    }
}

fn find_coincidence(lambdas: &[Rational]) -> Option<(usize, usize)> {
    for a in 0..lambdas.len() {
        for b in a + 1..lambdas.len() {
            if lambdas[a] == lambdas[b] {
                return Some((a, b));
            }
        }
    }
    None
}

/// A rational written either as a JSON string `"p/q"` or a JSON integer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalText {
    Int(i64),
    Text(String),
}

impl RationalText {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            RationalText::Int(v) => Ok(Rational::from_integer((*v).into())),
            RationalText::Text(s) => parse_rational(s),
        }
    }
}

/// JSON form of a sphere: `{"n": 1, "w": ["3/2", "1"], "beta": [-1, 1]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereSpec {
    pub n: usize,
    pub w: Vec<RationalText>,
    pub beta: Vec<i64>,
}

impl SphereSpec {
    pub fn build(&self) -> Result<WeightedSphere> {
        if self.w.len() != self.n + 1 {
            return Err(Error::InvalidSphere(format!(
                "n = {} needs {} Reeb weights, got {}",
                self.n,
                self.n + 1,
                self.w.len()
            )));
        }
        let w = self.w.iter().map(RationalText::to_rational).collect::<Result<_>>()?;
        WeightedSphere::new(w, self.beta.clone())
    }
}

/// Critical circle `C_j = {z : z_k = 0 for k ≠ j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalCircle {
    pub index: usize,
    /// `μ(C_j) = λ_j`.
    pub mu_value: Rational,
    /// Equivariant basic Euler class of the normal bundle, a multiple of `u^n`.
    pub euler_class: Poly,
    /// The scalar `c` with `euler_class = c·u^n`.
    pub euler_coefficient: ExactScalar,
    /// Restriction to `C_j` sends `s` to `restriction_slope · u`.
    pub restriction_slope: Rational,
    /// `∫_{C_j} α_w = 2π / w_j`.
    pub alpha_integral: ExactScalar,
}

impl CriticalCircle {
    /// Restricts a class in `(u, s)` to this circle: a polynomial in `u`.
    pub fn restrict(&self, eta: &EquivariantClass) -> Poly {
        let slope = Poly::var(U).scale(&ExactScalar::from_rational(self.restriction_slope.clone()));
        eta.rep().substitute(S, &slope)
    }

    /// Copy with the Euler class multiplied by `factor` (used for negative controls).
    pub fn with_scaled_euler(&self, factor: &Rational) -> Self {
        let euler_coefficient = self.euler_coefficient.scale(factor);
        Self {
            euler_class: self.euler_class.scale(&ExactScalar::from_rational(factor.clone())),
            euler_coefficient,
            ..self.clone()
        }
    }
}

/// Class in `H_G(M, F) ≅ R[u, s] / ⟨Π(β_j u + w_j s)⟩`, stored by a representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantClass {
    rep: Poly,
}

impl EquivariantClass {
    pub fn new(rep: Poly) -> Result<Self> {
        if let Some(v) = rep.vars().iter().find(|v| *v != U && *v != S) {
            return Err(Error::Config(format!(
                "equivariant classes are polynomials in u and s; found variable `{v}`"
            )));
        }
        Ok(Self { rep })
    }

    pub fn one() -> Self {
        Self { rep: Poly::one() }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(text.parse()?)
    }

    pub fn rep(&self) -> &Poly {
        &self.rep
    }

    /// Canonical representative of s-degree at most n.
    pub fn reduce(&self, sphere: &WeightedSphere) -> Result<Self> {
        let (_, rem) = self.rep.div_rem_in(S, &sphere.ideal_generator())?;
        Ok(Self { rep: rem })
    }

    pub fn equivalent(&self, other: &Self, sphere: &WeightedSphere) -> Result<bool> {
        let diff = Self {
            rep: &self.rep - &other.rep,
        };
        Ok(diff.reduce(sphere)?.rep.is_zero())
    }
}

impl fmt::Display for EquivariantClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

/// Reduces a class modulo the sphere's ideal generator.
pub fn class_reduce(c: &EquivariantClass, sphere: &WeightedSphere) -> Result<EquivariantClass> {
    c.reduce(sphere)
}
