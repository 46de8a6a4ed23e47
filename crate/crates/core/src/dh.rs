//! Duistermaat-Heckman distribution `Q(y)` and its Gaussian-damped integral.
//!
//! `Q` is the Fourier transform (convention `(2π)^{-1/2}∫f e^{-iyφ}dφ`) of the
//! pushforward `Π_*(η ∧ e^{i d_G α})`. Each summand `c·e^{iaφ}/φ^r` is
//! regularized as `1/(φ - i0)^r` and becomes a truncated power supported on
//! `y < a`; summands with `r ≤ 0` give derivatives of `δ(y - a)`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::algebra::{rational_to_f64, ExactScalar, GaussianRational, Poly, Rational};
use crate::error::{Error, Result};
use crate::jk::{quotient_pairing, volume_of_circle};
use crate::localization::{pushforward, LocalizationTerm};
use crate::quadrature::integrate_complex;
use crate::sphere::{EquivariantClass, WeightedSphere, PHI, Y};

/// `coefficient · δ^{(order)}(y - location)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Impulse {
    pub location: Rational,
    pub order: u32,
    pub coefficient: ExactScalar,
}

/// A compactly supported distribution on `R`: polynomial pieces on the
/// half-open intervals `[b_k, b_{k+1})` plus finitely many impulses.
/// Point values at breakpoints are not meaningful.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePolynomial {
    breakpoints: Vec<Rational>,
    pieces: Vec<Poly>,
    impulses: Vec<Impulse>,
    support: Option<(Rational, Rational)>,
}

impl PiecewisePolynomial {
    /// Builds from breakpoints and one piece per gap; zero outside.
    pub fn new(breakpoints: Vec<Rational>, pieces: Vec<Poly>, impulses: Vec<Impulse>) -> Result<Self> {
        if breakpoints.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::Internal("breakpoints must be strictly increasing".into()));
        }
        if pieces.len() + 1 != breakpoints.len().max(1) {
            return Err(Error::Internal(format!(
                "{} pieces for {} breakpoints",
                pieces.len(),
                breakpoints.len()
            )));
        }
        if let Some(p) = pieces.iter().find(|p| p.vars().iter().any(|v| v != Y)) {
            return Err(Error::Internal(format!("piece `{p}` is not a polynomial in y")));
        }
        let impulses: Vec<Impulse> = impulses.into_iter().filter(|i| !i.coefficient.is_zero()).collect();
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        let mut widen = |a: &Rational, b: &Rational| {
            if lo.as_ref().is_none_or(|l| a < l) {
                lo = Some(a.clone());
            }
            if hi.as_ref().is_none_or(|h| b > h) {
                hi = Some(b.clone());
            }
        };
        for (k, p) in pieces.iter().enumerate() {
            if !p.is_zero() {
                widen(&breakpoints[k], &breakpoints[k + 1]);
            }
        }
        for i in &impulses {
            widen(&i.location, &i.location);
        }
        let support = lo.zip(hi);
        Ok(Self {
            breakpoints,
            pieces,
            impulses,
            support,
        })
    }

    pub fn zero() -> Self {
        Self {
            breakpoints: Vec::new(),
            pieces: Vec::new(),
            impulses: Vec::new(),
            support: None,
        }
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Poly] {
        &self.pieces
    }

    pub fn impulses(&self) -> &[Impulse] {
        &self.impulses
    }

    /// Smallest closed interval containing the support, `None` for `Q ≡ 0`.
    pub fn support(&self) -> Option<&(Rational, Rational)> {
        self.support.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_none()
    }

    /// `(left, right, piece)` for every gap between breakpoints.
    pub fn intervals(&self) -> impl Iterator<Item = (&Rational, &Rational, &Poly)> {
        self.breakpoints
            .windows(2)
            .zip(&self.pieces)
            .map(|(b, p)| (&b[0], &b[1], p))
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.pieces.iter().filter_map(Poly::degree).max()
    }

    /// Piece governing `y` (zero outside the breakpoint range).
    pub fn piece_at(&self, y: &Rational) -> Poly {
        self.intervals()
            .find(|(a, b, _)| *a <= y && y < *b)
            .map(|(_, _, p)| p.clone())
            .unwrap_or_else(Poly::zero)
    }

    /// Exact value of the regular part at `y`.
    pub fn value_at(&self, y: &Rational) -> ExactScalar {
        let p = self.piece_at(y);
        p.eval_exact(&[(Y, ExactScalar::from_rational(y.clone()))])
            .as_constant()
            .unwrap_or_else(ExactScalar::zero)
    }

    /// Numeric value of the regular part at `y`.
    pub fn evaluate(&self, y: f64) -> Complex64 {
        let k = self
            .breakpoints
            .windows(2)
            .position(|b| rational_to_f64(&b[0]) <= y && y < rational_to_f64(&b[1]));
        match k {
            Some(k) => horner(&numeric_coefficients(&self.pieces[k]), y),
            None => Complex64::zero(),
        }
    }

    /// `∫Q dy`, including order-zero impulses.
    pub fn integral(&self) -> ExactScalar {
        let mut acc = ExactScalar::zero();
        for (a, b, p) in self.intervals() {
            let coeffs = p.univariate_coefficients(Y).expect("pieces are univariate in y");
            for (k, c) in coeffs.iter().enumerate() {
                let e = k as i32 + 1;
                let span = b.pow(e) - a.pow(e);
                acc += &c.scale(&(span / Rational::from_integer(e.into())));
            }
        }
        for i in self.impulses.iter().filter(|i| i.order == 0) {
            acc += &i.coefficient;
        }
        acc
    }

    /// `∫Q(y) e^{-y²/2ε} dy` in closed form.
    pub fn gaussian_integral(&self, epsilon: f64) -> Result<Complex64> {
        check_epsilon(epsilon)?;
        let mut acc = Complex64::zero();
        for (a, b, p) in self.intervals() {
            let coeffs = numeric_coefficients(p);
            if coeffs.is_empty() {
                continue;
            }
            let moments = gaussian_moments(rational_to_f64(a), rational_to_f64(b), epsilon, coeffs.len() - 1);
            acc += coeffs.iter().zip(&moments).map(|(c, m)| c * m).sum::<Complex64>();
        }
        for i in &self.impulses {
            // ⟨δ^{(k)}(y-a), g⟩ = (-1)^k g^{(k)}(a)
            let k = i.order;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let derivative = gaussian_derivative(k, rational_to_f64(&i.location), epsilon);
            acc += i.coefficient.to_complex() * sign * derivative;
        }
        Ok(acc)
    }

    /// Same integral by adaptive quadrature over each piece.
    pub fn gaussian_integral_quadrature(&self, epsilon: f64, tol: f64) -> Result<Complex64> {
        check_epsilon(epsilon)?;
        let mut acc = Complex64::zero();
        for (a, b, p) in self.intervals() {
            let coeffs = numeric_coefficients(p);
            if coeffs.is_empty() {
                continue;
            }
            acc += integrate_complex(
                |y| horner(&coeffs, y) * (-y * y / (2.0 * epsilon)).exp(),
                rational_to_f64(a),
                rational_to_f64(b),
                tol,
            );
        }
        for i in &self.impulses {
            let k = i.order;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += i.coefficient.to_complex() * sign * gaussian_derivative(k, rational_to_f64(&i.location), epsilon);
        }
        Ok(acc)
    }

    /// Inverse transform `(2π)^{-1/2} ∫Q(y) e^{iyφ} dy` by quadrature.
    pub fn inverse_transform(&self, phi: f64, tol: f64) -> Complex64 {
        let mut acc = Complex64::zero();
        for (a, b, p) in self.intervals() {
            let coeffs = numeric_coefficients(p);
            if coeffs.is_empty() {
                continue;
            }
            acc += integrate_complex(
                |y| horner(&coeffs, y) * Complex64::from_polar(1.0, y * phi),
                rational_to_f64(a),
                rational_to_f64(b),
                tol,
            );
        }
        for i in &self.impulses {
            // ∫δ^{(k)}(y-a) e^{iyφ} dy = (-iφ)^k e^{iaφ}
            let a = rational_to_f64(&i.location);
            acc += i.coefficient.to_complex()
                * Complex64::new(0.0, -phi).powu(i.order)
                * Complex64::from_polar(1.0, a * phi);
        }
        acc / (2.0 * std::f64::consts::PI).sqrt()
    }

    /// `count` evenly spaced samples over the support, padded by a tenth on each side.
    pub fn samples(&self, count: usize) -> Vec<(f64, Complex64)> {
        let (lo, hi) = match &self.support {
            Some((a, b)) => (rational_to_f64(a), rational_to_f64(b)),
            None => (-1.0, 1.0),
        };
        let pad = if hi > lo { 0.1 * (hi - lo) } else { 0.5 };
        let (lo, hi) = (lo - pad, hi + pad);
        let count = count.max(2);
        (0..count)
            .map(|k| {
                let y = lo + (hi - lo) * k as f64 / (count - 1) as f64;
                (y, self.evaluate(y))
            })
            .collect()
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(epsilon))
    }
}

fn numeric_coefficients(p: &Poly) -> Vec<Complex64> {
    p.univariate_coefficients(Y)
        .expect("pieces are univariate in y")
        .iter()
        .map(ExactScalar::to_complex)
        .collect()
}

fn horner(coeffs: &[Complex64], y: f64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::zero(), |acc, c| acc * y + c)
}

/// `M_k = ∫_a^b y^k e^{-y²/2ε} dy` for `k = 0..=kmax`.
pub fn gaussian_moments(a: f64, b: f64, epsilon: f64, kmax: usize) -> Vec<f64> {
    let x = a.abs().max(b.abs()).powi(2) / (2.0 * epsilon);
    if x < 1.0 {
        // short interval: the recursion cancels, the Taylor series of e^{-y²/2ε} does not
        return (0..=kmax).map(|k| moment_series(a, b, epsilon, k)).collect();
    }
    let scale = (2.0 * epsilon).sqrt();
    let (xa, xb) = (a / scale, b / scale);
    let half = (std::f64::consts::PI * epsilon / 2.0).sqrt();
    let m0 = if xa >= 0.0 {
        half * (libm::erfc(xa) - libm::erfc(xb))
    } else if xb <= 0.0 {
        half * (libm::erfc(-xb) - libm::erfc(-xa))
    } else {
        half * (libm::erf(xb) - libm::erf(xa))
    };
    let ga = (-a * a / (2.0 * epsilon)).exp();
    let gb = (-b * b / (2.0 * epsilon)).exp();
    let mut m = Vec::with_capacity(kmax + 1);
    m.push(m0);
    if kmax >= 1 {
        m.push(epsilon * (ga - gb));
    }
    for k in 2..=kmax {
        let boundary = epsilon * (a.powi(k as i32 - 1) * ga - b.powi(k as i32 - 1) * gb);
        let next = boundary + (k - 1) as f64 * epsilon * m[k - 2];
        m.push(next);
    }
    m
}

fn moment_series(a: f64, b: f64, epsilon: f64, k: usize) -> f64 {
    let mut sum = 0.0;
    let mut coefficient = 1.0;
    for j in 0..60 {
        let p = (k + 2 * j + 1) as i32;
        let term = coefficient * (b.powi(p) - a.powi(p)) / p as f64;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
        coefficient *= -1.0 / (2.0 * epsilon * (j + 1) as f64);
    }
    sum
}

/// `d^k/dy^k e^{-y²/2ε}` via probabilists' Hermite polynomials.
fn gaussian_derivative(k: u32, y: f64, epsilon: f64) -> f64 {
    let root = epsilon.sqrt();
    let x = y / root;
    let (mut h0, mut h1) = (1.0, x);
    let he = match k {
        0 => 1.0,
        _ => {
            for j in 1..k {
                let h2 = x * h1 - j as f64 * h0;
                h0 = h1;
                h1 = h2;
            }
            h1
        }
    };
    (-1.0 / root).powi(k as i32) * he * (-y * y / (2.0 * epsilon)).exp()
}

/// `Q^η(y)` for `sphere` and `eta`.
pub fn dh_distribution(sphere: &WeightedSphere, eta: &EquivariantClass) -> Result<PiecewisePolynomial> {
    if let Some(index) = sphere.lambdas().iter().position(Zero::is_zero) {
        return Err(Error::LambdaZero { index });
    }
    dh_from_terms(&pushforward(sphere, eta)?)
}

/// Term-wise transform of a pushforward.
pub fn dh_from_terms(terms: &[LocalizationTerm]) -> Result<PiecewisePolynomial> {
    let sqrt_two_pi = ExactScalar::sqrt_two_pi();
    let y = Poly::var(Y);
    // Truncated powers active on y < a, keyed by a.
    let mut half_lines: BTreeMap<Rational, Poly> = BTreeMap::new();
    let mut impulses: BTreeMap<(Rational, u32), ExactScalar> = BTreeMap::new();
    for (index, t) in terms.iter().enumerate() {
        let a = &t.exponent_lambda;
        if a.is_zero() {
            return Err(Error::LambdaZero { index });
        }
        let (c, m) = t.pole()?;
        let entry = half_lines.entry(a.clone()).or_insert_with(Poly::zero);
        let coeffs = t.amplitude.numerator().univariate_coefficients(PHI)?;
        let shift = &Poly::constant(ExactScalar::from_rational(a.clone())) - &y;
        for (k, qk) in coeffs.iter().enumerate() {
            if qk.is_zero() {
                continue;
            }
            let scaled = qk.div(&c)?;
            let k = k as u32;
            if k < m {
                let r = m - k;
                // c e^{iaφ}(φ - i0)^{-r}  ↦  (2π)^{1/2} i^r c (a-y)^{r-1}/(r-1)!  on y < a
                let factor = (&sqrt_two_pi * &scaled)
                    .scale_gaussian(&GaussianRational::i_pow(r as i64))
                    .scale(&(Rational::one() / factorial(r - 1)));
                *entry = &*entry + &shift.pow(r - 1).scale(&factor);
            } else {
                let order = k - m;
                // c φ^k e^{iaφ}  ↦  (2π)^{1/2} i^k c δ^{(k)}(y - a)
                let factor = (&sqrt_two_pi * &scaled).scale_gaussian(&GaussianRational::i_pow(order as i64));
                let slot = impulses.entry((a.clone(), order)).or_insert_with(ExactScalar::zero);
                *slot += &factor;
            }
        }
    }
    let breakpoints: Vec<Rational> = half_lines.keys().cloned().collect();
    let leftmost: Poly = half_lines.values().fold(Poly::zero(), |acc, p| &acc + p);
    if !leftmost.is_zero() {
        return Err(Error::Internal(format!(
            "transform is not compactly supported: Q(y) = {leftmost} below every breakpoint"
        )));
    }
    let mut pieces = Vec::with_capacity(breakpoints.len().saturating_sub(1));
    let mut active = leftmost;
    for p in half_lines.values().take(breakpoints.len().saturating_sub(1)) {
        active = &active - p;
        pieces.push(active.clone());
    }
    let impulses = impulses
        .into_iter()
        .map(|((location, order), coefficient)| Impulse {
            location,
            order,
            coefficient,
        })
        .collect();
    PiecewisePolynomial::new(breakpoints, pieces, impulses)
}

fn factorial(k: u32) -> Rational {
    (1..=k as i64).fold(Rational::one(), |acc, j| acc * Rational::from_integer(j.into()))
}

/// `I(ε) = (2πi)^{-1} ε^{-1/2} vol(G)^{-1} ∫Q(y) e^{-y²/2ε} dy`.
pub fn i_epsilon_from(q: &PiecewisePolynomial, epsilon: f64) -> Result<Complex64> {
    let integral = q.gaussian_integral(epsilon)?;
    Ok(integral / i_epsilon_normalization(epsilon))
}

fn i_epsilon_normalization(epsilon: f64) -> Complex64 {
    Complex64::new(0.0, 2.0 * std::f64::consts::PI) * epsilon.sqrt() * volume_of_circle().to_complex()
}

pub fn i_epsilon(sphere: &WeightedSphere, eta: &EquivariantClass, epsilon: f64) -> Result<Complex64> {
    check_epsilon(epsilon)?;
    i_epsilon_from(&dh_distribution(sphere, eta)?, epsilon)
}

/// Quadrature version of [`i_epsilon_from`] for cross-checks.
pub fn i_epsilon_quadrature(q: &PiecewisePolynomial, epsilon: f64, tol: f64) -> Result<Complex64> {
    let integral = q.gaussian_integral_quadrature(epsilon, tol)?;
    Ok(integral / i_epsilon_normalization(epsilon))
}

/// Left and right side of `i^{-1}(2π)^{-1/2}·Q(0)·n₀/vol(G) = ∫_{M₀} α₀∧η₀∧e^{idα₀}`.
pub fn q0_identity(sphere: &WeightedSphere, eta: &EquivariantClass) -> Result<(ExactScalar, ExactScalar)> {
    sphere.zero_regularity()?;
    let q = dh_distribution(sphere, eta)?;
    let n0 = Rational::from_integer(sphere.regular_isotropy_order().into());
    let lhs = (&q.value_at(&Rational::zero()) * &ExactScalar::sqrt_two_pi().inv()?)
        .scale_gaussian(&GaussianRational::i_pow(-1))
        .scale(&n0);
    let lhs = lhs.div(&volume_of_circle())?;
    Ok((lhs, quotient_pairing(sphere, eta)?))
}

/// `ε → 0` behaviour of `I(ε)` on a grid.
#[derive(Clone, Debug)]
pub struct AsymptoticReport {
    pub epsilons: Vec<f64>,
    pub i_values: Vec<Complex64>,
    /// `(1/n₀)∫_{M₀} α₀∧η₀∧e^{idα₀}`.
    pub limit: ExactScalar,
    pub deviations: Vec<f64>,
    /// `c` in `|I(ε) - limit| ≈ A ε^{-1/2} e^{-c/ε}`.
    pub decay_exponent_estimate: Option<f64>,
    pub amplitude_estimate: Option<f64>,
    pub r_squared: Option<f64>,
}

impl AsymptoticReport {
    /// Deviation shrinks as `ε` decreases along the grid (sorted by decreasing `ε`).
    pub fn is_monotone(&self) -> bool {
        let mut pairs: Vec<(f64, f64)> = self.epsilons.iter().copied().zip(self.deviations.iter().copied()).collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        pairs.windows(2).all(|p| p[1].1 < p[0].1)
    }
}

pub fn asymptotic_report(
    sphere: &WeightedSphere,
    eta: &EquivariantClass,
    epsilons: &[f64],
) -> Result<AsymptoticReport> {
    for &e in epsilons {
        check_epsilon(e)?;
    }
    let q = dh_distribution(sphere, eta)?;
    let n0 = Rational::from_integer(sphere.regular_isotropy_order().into());
    let limit = quotient_pairing(sphere, eta)?.scale(&(Rational::one() / n0));
    let target = limit.to_complex();
    let i_values = epsilons
        .iter()
        .map(|&e| i_epsilon_from(&q, e))
        .collect::<Result<Vec<_>>>()?;
    let deviations: Vec<f64> = i_values.iter().map(|v| (v - target).norm()).collect();
    let points: Vec<(f64, f64)> = epsilons
        .iter()
        .zip(&deviations)
        .filter(|(_, d)| **d > 0.0 && d.is_finite())
        .map(|(e, d)| (1.0 / e, d.ln() + 0.5 * e.ln()))
        .collect();
    let fit = linear_fit(&points);
    Ok(AsymptoticReport {
        epsilons: epsilons.to_vec(),
        i_values,
        limit,
        deviations,
        decay_exponent_estimate: fit.map(|f| -f.slope),
        amplitude_estimate: fit.map(|f| f.intercept.exp()),
        r_squared: fit.and_then(|f| f.r_squared),
    })
}

#[derive(Clone, Copy, Debug)]
struct LinearFit {
    slope: f64,
    intercept: f64,
    r_squared: Option<f64>,
}

fn linear_fit(points: &[(f64, f64)]) -> Option<LinearFit> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let ss_res: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = (points.len() > 2 && ss_tot > 0.0).then(|| 1.0 - ss_res / ss_tot);
    Some(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Upper bound `p_n e^{-δ²a/2}` for `∫_δ^∞ x^n e^{-ax²} dx`.
pub fn gaussian_tail_bound(n: u32, delta: f64, a: f64) -> f64 {
    let p0 = (std::f64::consts::PI / (4.0 * a)).sqrt();
    let p1 = 1.0 / (2.0 * a);
    let p = match n {
        0 => p0,
        1 => p1,
        _ => {
            let (mut prev, mut cur) = (p0, p1);
            for k in 2..=n {
                let next = delta.powi(k as i32 - 1) / (2.0 * a) + (k - 1) as f64 / (2.0 * a) * prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    };
    p * (-delta * delta * a / 2.0).exp()
}

/// `∫_δ^∞ x e^{-ax²} dx = e^{-aδ²}/(2a)`.
pub fn gaussian_tail_n1(delta: f64, a: f64) -> f64 {
    (-a * delta * delta).exp() / (2.0 * a)
}

/// `∫_δ^∞ x^n e^{-ax²} dx` by quadrature; the tail beyond `δ + 40/√a` is dropped.
pub fn gaussian_tail_numeric(n: u32, delta: f64, a: f64, tol: f64) -> f64 {
    let upper = delta.max(0.0) + 40.0 / a.sqrt();
    let f = |x: f64| x.powi(n as i32) * (-a * x * x).exp();
    // split at the mode so the rule sees the peak
    let mode = ((n as f64) / (2.0 * a)).sqrt().clamp(delta, upper);
    crate::quadrature::integrate(f, delta, mode, tol) + crate::quadrature::integrate(f, mode, upper, tol)
}

/// Whether the support of `q` lies in `[lo, hi]`.
pub fn support_contained(q: &PiecewisePolynomial, lo: &Rational, hi: &Rational) -> bool {
    q.support().is_none_or(|(a, b)| a >= lo && b <= hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational;
    use crate::localization::{contact_volume_closed_form, eval_pushforward, pushforward_at_zero};
    use crate::random::{random_class, RandomSphere};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s3() -> WeightedSphere {
        WeightedSphere::s3_example(rational(3, 2)).unwrap()
    }

    #[test]
    fn s3_profile_is_flat() {
        let q = dh_distribution(&s3(), &EquivariantClass::one()).unwrap();
        assert_eq!(q.breakpoints(), &[rational(-1, 1), rational(2, 3)]);
        assert_eq!(q.pieces().len(), 1);
        assert_eq!(q.pieces()[0].to_string(), "(8/5)*i*pi^2*sqrt(2*pi)");
        assert!(q.impulses().is_empty());
        assert_eq!(q.support(), Some(&(rational(-1, 1), rational(2, 3))));
    }

    #[test]
    fn s3_family_matches_closed_form() {
        for w in [rational(1, 2), rational(3, 2), rational(5, 1), rational(7, 3)] {
            let sphere = WeightedSphere::s3_example(w.clone()).unwrap();
            let q = dh_distribution(&sphere, &EquivariantClass::one()).unwrap();
            // i(2π)^{5/2}/(1+w)
            let expected = (&ExactScalar::sqrt_two_pi() * &ExactScalar::two_pi_pow(2))
                .scale_gaussian(&GaussianRational::i())
                .scale(&(Rational::one() / (Rational::one() + &w)));
            assert_eq!(q.pieces(), &[Poly::constant(expected)]);
            assert_eq!(q.support(), Some(&(rational(-1, 1), Rational::one() / &w)));
        }
    }

    #[test]
    fn zero_lambda_is_rejected() {
        let sphere = WeightedSphere::parse(&["1", "2"], &[0, 1]).unwrap();
        assert_eq!(
            dh_distribution(&sphere, &EquivariantClass::one()).unwrap_err(),
            Error::LambdaZero { index: 0 }
        );
    }

    #[test]
    fn support_lies_in_moment_image() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 0..50 {
            let n = 1 + k % 3;
            let sphere = RandomSphere::new(n).with_nonzero_lambdas().sample(&mut rng);
            let (min, max) = sphere.lambda_range();
            for eta in ["1", "u", "s"] {
                let q = dh_distribution(&sphere, &EquivariantClass::parse(eta).unwrap()).unwrap();
                assert!(support_contained(&q, &-max.clone(), &-min.clone()), "{sphere} {eta}");
                if eta == "1" {
                    assert!(q.max_degree().unwrap_or(0) < n as u32);
                }
            }
        }
    }

    #[test]
    fn zero_is_not_a_breakpoint_when_regular() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let sphere = RandomSphere::new(2).with_regular_zero().sample(&mut rng);
            let q = dh_distribution(&sphere, &EquivariantClass::one()).unwrap();
            assert!(q.breakpoints().iter().all(|b| !b.is_zero()));
        }
    }

    #[test]
    fn q0_identity_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (lhs, rhs) = q0_identity(&s3(), &EquivariantClass::one()).unwrap();
        assert_eq!(lhs, rhs);
        for _ in 0..20 {
            let sphere = RandomSphere::new(2).with_regular_zero().sample(&mut rng);
            let eta = random_class(&mut rng, 3, 3);
            let (lhs, rhs) = q0_identity(&sphere, &eta).unwrap();
            assert_eq!(lhs, rhs, "{sphere} {eta}");
        }
    }

    #[test]
    fn total_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for k in 0..20 {
            let sphere = RandomSphere::new(1 + k % 3).with_nonzero_lambdas().sample(&mut rng);
            let eta = random_class(&mut rng, 3, 3);
            let terms = pushforward(&sphere, &eta).unwrap();
            let q = dh_from_terms(&terms).unwrap();
            let expected = &ExactScalar::sqrt_two_pi() * &pushforward_at_zero(&terms).unwrap();
            assert_eq!(q.integral(), expected);

            // for η = 1: (2π)^{1/2} i^n 2^n vol
            let q1 = dh_distribution(&sphere, &EquivariantClass::one()).unwrap();
            let n = sphere.n() as u32;
            let vol = contact_volume_closed_form(&sphere);
            let expected = (&ExactScalar::sqrt_two_pi() * &vol)
                .scale_gaussian(&GaussianRational::i_pow(n as i64))
                .scale(&Rational::from_integer((1i64 << n).into()));
            assert_eq!(q1.integral(), expected);
        }
    }

    #[test]
    fn plancherel_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let sphere = RandomSphere {
            max_weight: 5,
            ..RandomSphere::new(2)
        }
        .with_nonzero_lambdas()
        .sample(&mut rng);
        for (sphere, eta) in [(s3(), "1"), (sphere.clone(), "1"), (sphere, "s^3 + u*s - 2")] {
            let eta = EquivariantClass::parse(eta).unwrap();
            let terms = pushforward(&sphere, &eta).unwrap();
            let q = dh_from_terms(&terms).unwrap();
            for k in 0..20 {
                let phi = 0.35 + 0.4 * k as f64;
                let direct = eval_pushforward(&terms, Complex64::new(phi, 0.0)).unwrap();
                let via_q = q.inverse_transform(phi, 1e-13);
                assert!(
                    (direct - via_q).norm() <= 1e-6 * direct.norm().max(1e-12),
                    "φ={phi}: {direct} vs {via_q}"
                );
            }
        }
    }

    #[test]
    fn impulses_appear_for_high_degree_classes() {
        let q = dh_distribution(&s3(), &EquivariantClass::parse("u^2").unwrap()).unwrap();
        assert!(q.impulses().iter().any(|i| i.order == 1));
    }

    #[test]
    fn i_epsilon_limit_on_s3() {
        let v = i_epsilon(&s3(), &EquivariantClass::one(), 0.01).unwrap();
        let target = 4.0 * std::f64::consts::PI / 5.0;
        assert!((v - Complex64::new(target, 0.0)).norm() < 1e-6, "{v}");
    }

    #[test]
    fn i_epsilon_vanishes_for_large_epsilon() {
        let q = dh_distribution(&s3(), &EquivariantClass::one()).unwrap();
        let big = i_epsilon_from(&q, 1e12).unwrap();
        assert!(big.norm() < 1e-5);
        let bigger = i_epsilon_from(&q, 1e16).unwrap();
        assert!(bigger.norm() < big.norm());
    }

    #[test]
    fn invalid_epsilon() {
        let q = dh_distribution(&s3(), &EquivariantClass::one()).unwrap();
        for e in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(i_epsilon_from(&q, e), Err(Error::InvalidEpsilon(_))));
        }
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for k in 0..10 {
            let sphere = RandomSphere {
                max_weight: 6,
                ..RandomSphere::new(1 + k % 3)
            }
            .with_nonzero_lambdas()
            .sample(&mut rng);
            let eta = random_class(&mut rng, 2, 3);
            let q = dh_distribution(&sphere, &eta).unwrap();
            for eps in [0.5, 0.1, 0.02] {
                let closed = i_epsilon_from(&q, eps).unwrap();
                let quad = i_epsilon_quadrature(&q, eps, 1e-15).unwrap();
                assert!((closed - quad).norm() <= 1e-10 * closed.norm().max(1e-300), "{closed} {quad}");
            }
        }
    }

    #[test]
    fn super_polynomial_decay() {
        let grid = [0.2, 0.1, 0.05, 0.025];
        let report = asymptotic_report(&s3(), &EquivariantClass::one(), &grid).unwrap();
        assert_eq!(report.limit.to_string(), "(4/5)*pi");
        // local power-law exponent ln(d_k/d_{k+1}) / ln 2 keeps growing as ε halves
        let exponents: Vec<f64> = report
            .deviations
            .windows(2)
            .map(|d| (d[0] / d[1]).ln() / 2f64.ln())
            .collect();
        assert!(exponents.windows(2).all(|e| e[1] > e[0] + 1.0), "{exponents:?}");
    }

    #[test]
    fn asymptotic_fit() {
        let report = asymptotic_report(&s3(), &EquivariantClass::one(), &[0.2, 0.1, 0.05, 0.025]).unwrap();
        assert!(report.is_monotone());
        assert!(report.decay_exponent_estimate.unwrap() > 0.0);
        assert!(report.r_squared.unwrap() > 0.99, "{:?}", report.r_squared);
    }

    #[test]
    fn generator_gives_zero() {
        let sphere = s3();
        let gen = EquivariantClass::new(sphere.ideal_generator()).unwrap();
        let q = dh_distribution(&sphere, &gen).unwrap();
        assert!(q.is_zero());
        let report = asymptotic_report(&sphere, &gen, &[0.1, 0.05]).unwrap();
        assert!(report.limit.is_zero());
        assert!(report.i_values.iter().all(|v| v.norm() < 1e-12));
        assert!(report.decay_exponent_estimate.is_none());
    }

    #[test]
    fn moments_agree_with_quadrature() {
        for (a, b) in [(-1.0, 0.7), (0.3, 2.0), (-3.0, -0.2), (-0.1, 0.1)] {
            for eps in [0.01, 0.3, 4.0] {
                let m = gaussian_moments(a, b, eps, 6);
                for (k, mk) in m.iter().enumerate() {
                    let g = |y: f64| y.powi(k as i32) * (-y * y / (2.0 * eps)).exp();
                    let q = crate::quadrature::integrate(g, a, b, 1e-16);
                    let scale = crate::quadrature::integrate(|y| g(y).abs(), a, b, 1e-16);
                    assert!((mk - q).abs() <= 1e-11 * scale, "k={k} a={a} b={b} eps={eps}: {mk} {q}");
                }
            }
        }
    }

    #[test]
    fn hermite_derivatives() {
        let (y, eps, h) = (0.4, 0.3, 1e-4);
        let g = |y: f64| (-y * y / (2.0 * eps)).exp();
        let fd1 = (g(y + h) - g(y - h)) / (2.0 * h);
        let fd2 = (g(y + h) - 2.0 * g(y) + g(y - h)) / (h * h);
        assert!((gaussian_derivative(1, y, eps) - fd1).abs() < 1e-7);
        assert!((gaussian_derivative(2, y, eps) - fd2).abs() < 1e-5);
    }

    #[test]
    fn tail_bound_examples() {
        let exact0 = gaussian_tail_numeric(0, 1.0, 1.0, 1e-14);
        assert!((exact0 - 0.139_4).abs() < 1e-4);
        let b0 = gaussian_tail_bound(0, 1.0, 1.0);
        assert!((b0 - 0.537_5).abs() < 1e-4);
        assert!(gaussian_tail_numeric(4, 2.0, 3.0, 1e-16) <= gaussian_tail_bound(4, 2.0, 3.0));
        assert!(gaussian_tail_n1(1.5, 2.0) <= gaussian_tail_bound(1, 1.5, 2.0));
    }

    #[test]
    fn tail_bound_dominates_on_grid() {
        for n in 0..5 {
            for delta in [0.25, 0.5, 1.0, 2.0, 3.0] {
                for a in [0.25, 0.5, 1.0, 3.0, 5.0] {
                    let numeric = gaussian_tail_numeric(n, delta, a, 1e-16);
                    let bound = gaussian_tail_bound(n, delta, a);
                    assert!(numeric <= bound, "n={n} δ={delta} a={a}: {numeric} > {bound}");
                }
            }
        }
    }

    #[test]
    fn n1_tail_exact() {
        for delta in [0.5, 1.0, 2.0] {
            for a in [0.5, 1.0, 3.0] {
                let exact = gaussian_tail_n1(delta, a);
                let numeric = gaussian_tail_numeric(1, delta, a, exact * 1e-13);
                assert!((exact - numeric).abs() <= 1e-10 * exact);
            }
        }
    }
}
