//! Fixed-point localization on weighted spheres.
//!
//! Every integral over `M` is replaced by a sum over the critical circles
//! `C_j`: `∫_M α∧η = Σ_j ∫_{C_j} ι_j*(α∧η) / e_j`.

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::algebra::{ExactScalar, Poly, Rational, RationalFn};
use crate::error::{Error, Result};
use crate::sphere::{CriticalCircle, EquivariantClass, WeightedSphere, PHI, S, U};

/// One summand `e^{i·exponent_lambda·φ} · amplitude(φ)` of the pushforward.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalizationTerm {
    pub circle_index: usize,
    /// Coefficient of `iφ` in the exponential, i.e. `-μ(C_j)`.
    pub exponent_lambda: Rational,
    pub amplitude: RationalFn,
}

impl LocalizationTerm {
    pub fn eval(&self, phi: Complex64) -> Result<Complex64> {
        let a = crate::algebra::rational_to_f64(&self.exponent_lambda);
        Ok((Complex64::i() * a * phi).exp() * self.amplitude.eval(phi)?)
    }

    /// Pole order at `φ = 0` and the scalar `c` of the denominator `c·φ^m`.
    pub fn pole(&self) -> Result<(ExactScalar, u32)> {
        self.amplitude.monomial_denominator().ok_or_else(|| {
            Error::Internal(format!(
                "amplitude `{}` does not have a monomial denominator",
                self.amplitude
            ))
        })
    }
}

/// `∫_M α ∧ η` as a polynomial in `u`.
pub fn pair_alpha_eta(sphere: &WeightedSphere, eta: &EquivariantClass) -> Result<Poly> {
    pair_with_circles(&sphere.critical_circles()?, sphere.n(), eta)
}

/// Fixed-point sum for caller-supplied circle data.
pub fn pair_with_circles(circles: &[CriticalCircle], n: usize, eta: &EquivariantClass) -> Result<Poly> {
    let n = n as u32;
    let mut numerator = Poly::zero();
    for c in circles {
        let weight = c.alpha_integral.div(&c.euler_coefficient)?;
        numerator = &numerator + &c.restrict(eta).scale(&weight);
    }
    if let Some(low) = numerator.lowest_degree_in(U) {
        if low < n {
            return Err(Error::NonPolynomialResult {
                degree: low as i64 - n as i64,
            });
        }
    }
    numerator
        .divide_by_var_power(U, n)
        .ok_or_else(|| Error::Internal("pole survived the degree check".into()))
}

/// `Π_*(η ∧ e^{i d_G α})(φ)` as one term per critical circle.
pub fn pushforward(sphere: &WeightedSphere, eta: &EquivariantClass) -> Result<Vec<LocalizationTerm>> {
    pushforward_with_circles(&sphere.critical_circles()?, sphere.n(), eta)
}

pub fn pushforward_with_circles(
    circles: &[CriticalCircle],
    n: usize,
    eta: &EquivariantClass,
) -> Result<Vec<LocalizationTerm>> {
    circles
        .iter()
        .map(|c| {
            // ι_j* d_G α = -λ_j φ on a circle, since ι_j* dα = 0.
            let restricted = c.restrict(eta).rename(U, PHI);
            let numerator = restricted.scale(&c.alpha_integral);
            Ok(LocalizationTerm {
                circle_index: c.index,
                exponent_lambda: -&c.mu_value,
                amplitude: RationalFn::over_monomial(
                    PHI,
                    numerator,
                    c.euler_coefficient.clone(),
                    n as u32,
                )?,
            })
        })
        .collect()
}

/// Numeric value of the pushforward at a nonzero real or complex `φ`.
pub fn eval_pushforward(terms: &[LocalizationTerm], phi: Complex64) -> Result<Complex64> {
    terms.iter().map(|t| t.eval(phi)).sum()
}

/// Value of the (entire) pushforward at `φ = 0`: the sum of the `φ^0` Laurent coefficients.
pub fn pushforward_at_zero(terms: &[LocalizationTerm]) -> Result<ExactScalar> {
    let mut acc = ExactScalar::zero();
    for t in terms {
        let (c, m) = t.pole()?;
        // φ^0 coefficient of q e^{iaφ}/φ^m = z^m Taylor coefficient = residue with order m+1
        let r = crate::algebra::residue_at_zero(t.amplitude.numerator(), PHI, &t.exponent_lambda, m + 1)?;
        let r = r
            .as_constant()
            .ok_or_else(|| Error::Internal("amplitude depends on parameters".into()))?;
        acc += &r.div(&c)?;
    }
    Ok(acc)
}

/// `2π^{n+1} / (n! Π w_j)`.
pub fn contact_volume_closed_form(sphere: &WeightedSphere) -> ExactScalar {
    let n = sphere.n();
    let factorial: Rational = (1..=n as i64).fold(Rational::one(), |acc, k| acc * Rational::from_integer(k.into()));
    let coefficient = Rational::from_integer(2.into()) / (factorial * sphere.weight_product());
    ExactScalar::homogeneous(coefficient, Rational::zero(), n as i32 + 1)
}

/// `(1/(2^n n!)) ∫ α∧(dα)^n` from the fixed points of the sphere's own action.
///
/// On the circles only `d_G α = dα - μu` contributes through `-μu`, and the
/// top-degree part of `α∧(d_Gα)^n` is `α∧(dα)^n`; with `s ≡ dα - μu` this is
/// the pairing of `s^n`.
pub fn contact_volume_by_localization(sphere: &WeightedSphere) -> Result<ExactScalar> {
    contact_volume_from_circles(&sphere.critical_circles()?, sphere.n())
}

pub fn contact_volume_from_circles(circles: &[CriticalCircle], n: usize) -> Result<ExactScalar> {
    let eta = EquivariantClass::new(Poly::var(S).pow(n as u32))?;
    let paired = pair_with_circles(circles, n, &eta)?;
    let top = paired
        .as_constant()
        .ok_or_else(|| Error::Internal(format!("pairing of s^n is not constant: {paired}")))?;
    let norm: Rational = (1..=n as i64).fold(Rational::one(), |acc, k| {
        acc * Rational::from_integer((2 * k).into())
    });
    Ok(top.scale(&(Rational::one() / norm)))
}

/// Action weights with pairwise distinct levels, starting from `start` and
/// bumping entries in index order until no `λ_j` repeats an earlier one.
pub fn auxiliary_beta(weights: &[Rational], start: impl Fn(usize) -> i64) -> Vec<i64> {
    let mut beta: Vec<i64> = (0..weights.len()).map(start).collect();
    if weights.iter().any(|w| !w.is_positive()) {
        // left for sphere validation to reject
        return beta;
    }
    for j in 0..weights.len() {
        loop {
            let lj = Rational::from_integer(beta[j].into()) / &weights[j];
            let clash = (0..j).any(|k| Rational::from_integer(beta[k].into()) / &weights[k] == lj);
            if !clash {
                break;
            }
            beta[j] += 1;
        }
    }
    beta
}

/// Contact volume via localization with two independent auxiliary actions,
/// checked exactly against the closed form.
pub fn contact_volume(sphere: &WeightedSphere) -> Result<ExactScalar> {
    let w = sphere.weights();
    let first = sphere.with_beta(auxiliary_beta(w, |j| j as i64 + 1))?;
    let second = sphere.with_beta(auxiliary_beta(w, |j| {
        let k = 2 * j as i64 + 1;
        if j % 2 == 0 { -k } else { k }
    }))?;
    let a = contact_volume_by_localization(&first)?;
    let b = contact_volume_by_localization(&second)?;
    let closed = contact_volume_closed_form(sphere);
    if a != b {
        return Err(Error::Internal(format!(
            "localization volume depends on the action: {a} vs {b}"
        )));
    }
    if a != closed {
        return Err(Error::Internal(format!(
            "localization volume {a} differs from closed form {closed}"
        )));
    }
    Ok(a)
}

/// `Σ_j β_j^n / Π_{k≠j} (w_k^{-1} β_k w_j - β_j)`, which equals `(-1)^n`.
pub fn localization_identity_sum(sphere: &WeightedSphere) -> Result<Rational> {
    sphere.require_distinct_lambdas()?;
    let n = sphere.n();
    let w = sphere.weights();
    let beta: Vec<Rational> = sphere.beta().iter().map(|b| Rational::from_integer((*b).into())).collect();
    let mut sum = Rational::zero();
    for j in 0..=n {
        let denom = (0..=n)
            .filter(|&k| k != j)
            .map(|k| &beta[k] / &w[k] * &w[j] - &beta[j])
            .fold(Rational::one(), |acc, x| acc * x);
        sum += num_traits::pow(beta[j].clone(), n) / denom;
    }
    Ok(sum)
}

pub fn localization_identity_check(sphere: &WeightedSphere) -> Result<bool> {
    let expected = if sphere.n().is_multiple_of(2) { Rational::one() } else { -Rational::one() };
    Ok(localization_identity_sum(sphere)? == expected)
}
