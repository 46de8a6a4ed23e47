//! Rank-one Jeffrey-Kirwan residues and the pairing on the contact quotient.
//!
//! For `s = 1` the residue of `g(φ)e^{iλφ}dφ` with respect to a cone `Λ ⊂ R`
//! is the ordinary residue sum when `λ` points into the cone and zero
//! otherwise. Cones are pluggable strategies looked up by name.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::algebra::{residue_at_zero, ExactScalar, Rational};
use crate::error::{Error, Result};
use crate::localization::{pushforward, LocalizationTerm};
use crate::sphere::{EquivariantClass, WeightedSphere, PHI};

/// A choice of cone `Λ` in the rank-one Lie algebra.
pub trait ResidueCone: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    /// Whether a term `e^{i·exponent·φ}` contributes its residue.
    fn selects(&self, exponent: &Rational) -> bool;

    /// Orientation of `dφ` induced by the cone, `+1` or `-1`.
    fn orientation(&self) -> i64;
}

/// `Λ = {t > 0}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct PositiveCone;

impl ResidueCone for PositiveCone {
    fn name(&self) -> &'static str {
        "positive"
    }

    fn description(&self) -> &'static str {
        "cone {t > 0}: keep terms with positive exponent"
    }

    fn selects(&self, exponent: &Rational) -> bool {
        exponent.is_positive()
    }

    fn orientation(&self) -> i64 {
        1
    }
}

/// `Λ = {t < 0}`, with `dφ` reversed.
#[derive(Debug, Clone, Copy, Default)]
pub struct NegativeCone;

impl ResidueCone for NegativeCone {
    fn name(&self) -> &'static str {
        "negative"
    }

    fn description(&self) -> &'static str {
        "cone {t < 0}: keep terms with negative exponent, reversed orientation"
    }

    fn selects(&self, exponent: &Rational) -> bool {
        exponent.is_negative()
    }

    fn orientation(&self) -> i64 {
        -1
    }
}

/// Cones available by name.
pub struct ConeRegistry {
    cones: BTreeMap<&'static str, Box<dyn ResidueCone>>,
}

impl ConeRegistry {
    pub fn empty() -> Self {
        Self {
            cones: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, cone: Box<dyn ResidueCone>) {
        self.cones.insert(cone.name(), cone);
    }

    pub fn get(&self, name: &str) -> Result<&dyn ResidueCone> {
        self.cones.get(name).map(|c| c.as_ref()).ok_or_else(|| {
            Error::Config(format!(
                "unknown cone `{name}`; available: {}",
                self.names().join(", ")
            ))
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.cones.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn ResidueCone> {
        self.cones.values().map(|c| c.as_ref())
    }
}

impl Default for ConeRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(PositiveCone));
        r.register(Box::new(NegativeCone));
        r
    }
}

impl fmt::Debug for ConeRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

/// `vol(S¹) = 2π` for the metric `g(∂_φ, ∂_φ) = 1`.
pub fn volume_of_circle() -> ExactScalar {
    ExactScalar::two_pi_pow(1)
}

/// Ordinary residue at 0 of one localization term.
pub fn term_residue(term: &LocalizationTerm) -> Result<ExactScalar> {
    let (c, m) = term.pole()?;
    if m == 0 || term.amplitude.is_zero() {
        return Ok(ExactScalar::zero());
    }
    let r = residue_at_zero(term.amplitude.numerator(), PHI, &term.exponent_lambda, m)?;
    let r = r
        .as_constant()
        .ok_or_else(|| Error::Internal("amplitude depends on free parameters".into()))?;
    r.div(&c)
}

/// `jkres^Λ(Σ terms · dφ)`.
pub fn jkres_with(terms: &[LocalizationTerm], cone: &dyn ResidueCone) -> Result<ExactScalar> {
    let mut acc = ExactScalar::zero();
    for (index, t) in terms.iter().enumerate() {
        if t.exponent_lambda.is_zero() {
            return Err(Error::LambdaZero { index });
        }
        if cone.selects(&t.exponent_lambda) {
            acc += &term_residue(t)?;
        }
    }
    Ok(acc.scale(&Rational::from_integer(cone.orientation().into())))
}

/// Residue for the cone `{t > 0}`.
pub fn jkres(terms: &[LocalizationTerm]) -> Result<ExactScalar> {
    jkres_with(terms, &PositiveCone)
}

/// Right-hand side of the residue formula: terms, `vol(G)` and `n₀`.
#[derive(Clone, Debug)]
pub struct ResidueInput {
    pub terms: Vec<LocalizationTerm>,
    pub volume_of_g: ExactScalar,
    pub n0: u64,
}

impl ResidueInput {
    pub fn new(sphere: &WeightedSphere, eta: &EquivariantClass) -> Result<Self> {
        sphere.zero_regularity()?;
        Ok(Self {
            terms: pushforward(sphere, eta)?,
            volume_of_g: volume_of_circle(),
            n0: sphere.regular_isotropy_order(),
        })
    }

    /// `(n₀ / vol G) · jkres^Λ(...)`.
    pub fn evaluate(&self, cone: &dyn ResidueCone) -> Result<ExactScalar> {
        let residue = jkres_with(&self.terms, cone)?;
        let factor = self.volume_of_g.inv()?.scale(&Rational::from_integer(self.n0.into()));
        Ok(&residue * &factor)
    }
}

/// Quotient pairing with the data that produced it.
#[derive(Clone, Debug)]
pub struct QuotientPairing {
    pub value: ExactScalar,
    pub residue: ExactScalar,
    pub input: ResidueInput,
    pub cone: &'static str,
}

/// `∫_{M₀} α₀ ∧ η₀ ∧ e^{i dα₀}`.
pub fn quotient_pairing(sphere: &WeightedSphere, eta: &EquivariantClass) -> Result<ExactScalar> {
    Ok(quotient_pairing_report(sphere, eta, &PositiveCone)?.value)
}

pub fn quotient_pairing_report(
    sphere: &WeightedSphere,
    eta: &EquivariantClass,
    cone: &dyn ResidueCone,
) -> Result<QuotientPairing> {
    let input = ResidueInput::new(sphere, eta)?;
    let residue = jkres_with(&input.terms, cone)?;
    let value = input.evaluate(cone)?;
    Ok(QuotientPairing {
        value,
        residue,
        input,
        cone: cone.name(),
    })
}

/// `2π·c/(1+w)`-style helper: the S³ answer for a class whose restrictions share constant term `c`.
pub fn s3_expected_pairing(w: &Rational, common_constant: &ExactScalar) -> ExactScalar {
    let base = ExactScalar::two_pi_pow(1).scale(&(Rational::one() / (Rational::one() + w)));
    &base * common_constant
}
