//! Verification checks, registered by name and run as a suite.

use std::fmt;
use std::time::Instant;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{format_rational, rational, rational_to_f64, ExactScalar, Poly, Rational};
use crate::dh::{
    asymptotic_report, dh_distribution, gaussian_tail_bound, gaussian_tail_n1, gaussian_tail_numeric, q0_identity,
};
use crate::error::{Error, Result};
use crate::jk::{quotient_pairing, s3_expected_pairing};
use crate::localization::{
    auxiliary_beta, contact_volume_closed_form, contact_volume_from_circles, localization_identity_check,
    pair_with_circles,
};
use crate::mc::{mc_contact_volume, mc_dh_histogram, McConfig};
use crate::random::{random_class, RandomSphere};
use crate::sphere::{CriticalCircle, EquivariantClass, WeightedSphere, U};

/// Inputs shared by all checks.
#[derive(Clone, Debug)]
pub struct VerifyContext {
    /// Sphere used by the oracle checks that are not tied to the worked example.
    pub sphere: WeightedSphere,
    pub seed: u64,
    pub workers: usize,
    /// Small Monte Carlo runs with 5σ tolerances.
    pub quick: bool,
    /// Multiply the Euler class of circle 0 by `1 + δ` (negative control).
    pub perturb_euler: Option<Rational>,
}

impl VerifyContext {
    pub fn new(sphere: WeightedSphere) -> Self {
        Self {
            sphere,
            seed: McConfig::default().seed,
            workers: 1,
            quick: false,
            perturb_euler: None,
        }
    }

    pub fn with_perturbation(mut self, delta: f64) -> Result<Self> {
        let delta = Rational::from_float(delta)
            .ok_or_else(|| Error::Config(format!("perturbation {delta} is not finite")))?;
        self.perturb_euler = (!delta.is_zero()).then_some(delta);
        Ok(self)
    }

    /// Critical circles, with the Euler perturbation applied when requested.
    pub fn circles(&self, sphere: &WeightedSphere) -> Result<Vec<CriticalCircle>> {
        let mut circles = sphere.critical_circles()?;
        if let Some(delta) = &self.perturb_euler {
            circles[0] = circles[0].with_scaled_euler(&(Rational::one() + delta));
        }
        Ok(circles)
    }

    pub fn samples(&self, full: u64) -> u64 {
        if self.quick {
            10_000
        } else {
            full
        }
    }

    pub fn sigmas(&self) -> f64 {
        if self.quick {
            5.0
        } else {
            3.0
        }
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(salt);
        rng
    }

    fn mc(&self, samples: u64, bins: usize) -> McConfig {
        McConfig {
            seed: self.seed,
            samples: self.samples(samples),
            workers: self.workers,
            histogram_bins: bins,
        }
    }
}

/// Result of one check.
#[derive(Clone, Debug, serde::Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub criterion: &'static str,
    pub passed: bool,
    pub measured: String,
    pub expected: String,
}

pub trait VerificationCheck: Send + Sync {
    fn name(&self) -> &'static str;

    /// Acceptance criterion label, e.g. `"6b"`.
    fn criterion(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn run(&self, ctx: &VerifyContext) -> Result<CheckOutcome>;
}

fn outcome(check: &dyn VerificationCheck, passed: bool, measured: impl Into<String>, expected: impl Into<String>) -> CheckOutcome {
    CheckOutcome {
        name: check.name(),
        criterion: check.criterion(),
        passed,
        measured: measured.into(),
        expected: expected.into(),
    }
}

fn s3() -> WeightedSphere {
    WeightedSphere::s3_example(rational(3, 2)).expect("valid example")
}

struct ContactVolume;

impl VerificationCheck for ContactVolume {
    fn name(&self) -> &'static str {
        "contact-volume"
    }
    fn criterion(&self) -> &'static str {
        "1"
    }
    fn description(&self) -> &'static str {
        "localized volume equals 2π^{n+1}/(n!Πw) exactly on 100 random spheres"
    }
    fn run(&self, ctx: &VerifyContext) -> Result<CheckOutcome> {
        let start = Instant::now();
        let mut rng = ctx.rng(1);
        let mut mismatches = 0;
        let mut first = None;
        for k in 0..100 {
            let sphere = RandomSphere::new(1 + k % 4).sample(&mut rng);
            let closed = contact_volume_closed_form(&sphere);
            let w = sphere.weights();
            let starts: [fn(usize) -> i64; 2] = [|j| j as i64 + 1, |j| {
                let k = 2 * j as i64 + 1;
                if j % 2 == 0 {
                    -k
                } else {
                    k
                }
            }];
            for start in starts {
                let aux = sphere.with_beta(auxiliary_beta(w, start))?;
                let got = contact_volume_from_circles(&ctx.circles(&aux)?, aux.n());
                if got.as_ref() != Ok(&closed) {
                    mismatches += 1;
                    first.get_or_insert_with(|| match got {
                        Ok(v) => format!("{sphere}: {v} vs {closed}"),
                        Err(e) => format!("{sphere}: {e}"),
                    });
                }
            }
        }
        let elapsed = start.elapsed().as_secs_f64();
        let passed = mismatches == 0 && elapsed < 10.0;
        let mut measured = format!("{mismatches} mismatches in 200 localizations, {elapsed:.2} s");
        if let Some(f) = first {
            measured.push_str(&format!("; first: {f}"));
        }
        Ok(outcome(self, passed, measured, "0 mismatches, < 10 s"))
    }
}

struct LocalizationIdentity;

impl VerificationCheck for LocalizationIdentity {
    fn name(&self) -> &'static str {
        "localization-identity"
    }
    fn criterion(&self) -> &'static str {
        "2"
    }
    fn description(&self) -> &'static str {
        "Σ_j β_j^n / Π_{k≠j}(w_k⁻¹β_k w_j − β_j) = (−1)^n on 100 random spheres"
    }
    fn run(&self, ctx: &VerifyContext) -> Result<CheckOutcome> {
        let mut rng = ctx.rng(2);
        let mut failures = 0;
        for k in 0..100 {
            let sphere = RandomSphere::new(1 + k % 4).sample(&mut rng);
            if !localization_identity_check(&sphere)? {
                failures += 1;
            }
        }
        Ok(outcome(self, failures == 0, format!("{failures} failures of 100"), "0 failures"))
    }
}

struct S3Pairing;

impl VerificationCheck for S3Pairing {
    fn name(&self) -> &'static str {
        "s3-pairing"
    }
    fn criterion(&self) -> &'static str {
        "3"
    }
    fn description(&self) -> &'static str {
        "quotient pairing on S³(3/2, 1) is (4/5)π·c for classes with common constant term c"
    }
    fn run(&self, _ctx: &VerifyContext) -> Result<CheckOutcome> {
        let sphere = s3();
        let w = rational(3, 2);
        let mut measured = Vec::new();
        let mut expected = Vec::new();
        let mut passed = true;
        for (eta, c) in [("1", 1), ("3 + s", 3), ("-2 + u - 5*s^2 + u*s", -2)] {
            let got = quotient_pairing(&sphere, &EquivariantClass::parse(eta)?)?;
            let want = s3_expected_pairing(&w, &ExactScalar::from_int(c));
            passed &= got == want;
            measured.push(got.to_string());
            expected.push(want.to_string());
        }
        Ok(outcome(self, passed, measured.join(", "), expected.join(", ")))
    }
}

struct EulerData;

impl VerificationCheck for EulerData {
    fn name(&self) -> &'static str {
        "euler-data"
    }
    fn criterion(&self) -> &'static str {
        "4"
    }
    fn description(&self) -> &'static str {
        "critical circles of S³(3/2, 1): Euler classes, μ-values and restriction slopes"
    }
    fn run(&self, ctx: &VerifyContext) -> Result<CheckOutcome> {
        let w = rational(3, 2);
        let circles = ctx.circles(&s3())?;
        let u_over_2pi = Poly::monomial(ExactScalar::two_pi_pow(-1), &[(U, 1)]);
        let e0 = u_over_2pi.scale(&ExactScalar::from_rational(Rational::one() + Rational::one() / &w));
        let e1 = u_over_2pi.scale(&ExactScalar::from_rational(-(Rational::one() + &w)));
        let expected = [
            (e0, -Rational::one() / &w, Rational::one() / &w),
            (e1, Rational::one(), -Rational::one()),
        ];
        let passed = circles.len() == 2
            && circles
                .iter()
                .zip(&expected)
                .all(|(c, (e, mu, slope))| &c.euler_class == e && &c.mu_value == mu && &c.restriction_slope == slope);
        let show = |e: &Poly, mu: &Rational, s: &Rational| {
            format!("e={e} mu={} slope={}", format_rational(mu), format_rational(s))
        };
        let measured = circles
            .iter()
            .map(|c| show(&c.euler_class, &c.mu_value, &c.restriction_slope))
            .collect::<Vec<_>>()
            .join("; ");
        let expected = expected.iter().map(|(e, m, s)| show(e, m, s)).collect::<Vec<_>>().join("; ");
        Ok(outcome(self, passed, measured, expected))
    }
}

struct Polynomiality;

impl VerificationCheck for Polynomiality {
    fn name(&self) -> &'static str {
        "pushforward-polynomiality"
    }
    fn criterion(&self) -> &'static str {
        "5"
    }
    fn description(&self) -> &'static str {
        "∫α∧η is polynomial and representative-independent on 200 random (sphere, η)"
    }
    fn run(&self, ctx: &VerifyContext) -> Result<CheckOutcome> {
        let mut rng = ctx.rng(5);
        let (mut poles, mut dependent) = (0, 0);
        let mut first = None;
        for k in 0..200 {
            let sphere = RandomSphere::new(1 + k % 4).sample(&mut rng);
            let degree = rng.random_range(0..=5);
            let eta = random_class(&mut rng, degree, 5);
            let multiplier = random_class(&mut rng, 2, 3);
            let shifted = EquivariantClass::new(eta.rep() + &(multiplier.rep() * &sphere.ideal_generator()))?;
            let circles = ctx.circles(&sphere)?;
            match (
                pair_with_circles(&circles, sphere.n(), &eta),
                pair_with_circles(&circles, sphere.n(), &shifted),
            ) {
                (Ok(a), Ok(b)) => {
                    if a != b {
                        dependent += 1;
                        first.get_or_insert_with(|| format!("{sphere}, η = {eta}: {a} vs {b}"));
                    }
                }
                (Err(e), _) | (_, Err(e)) => {
                    if !matches!(e, Error::NonPolynomialResult { .. }) {
                        return Err(e);
                    }
                    poles += 1;
                    first.get_or_insert_with(|| format!("{sphere}, η = {eta}: {e}"));
                }
            }
        }
        let mut measured = format!("{poles} non-polynomial, {dependent} representative-dependent of 200");
        if let Some(f) = first {
            measured.push_str(&format!("; first: {f}"));
        }
        Ok(outcome(self, poles == 0 && dependent == 0, measured, "0 and 0"))
    }
}

struct DhExact;

impl VerificationCheck for DhExact {
    fn name(&self) -> &'static str {
        "dh-exact"
    }
    fn criterion(&self) -> &'static str {
        "6a"
    }
    fn description(&self) -> &'static str {
        "Q on S³(3/2, 1) is the flat piece i(2π)^{5/2}/(1+w) on [-1, 2/3]"
    }
    fn run(&self, _ctx: &VerifyContext) -> Result<CheckOutcome> {
        let q = dh_distribution(&s3(), &EquivariantClass::one())?;
        let value = (&ExactScalar::sqrt_two_pi() * &ExactScalar::two_pi_pow(2))
            .scale_gaussian(&crate::algebra::GaussianRational::i())
            .scale(&rational(2, 5));
        let support = (rational(-1, 1), rational(2, 3));
        let passed = q.pieces() == [Poly::constant(value.clone())]
            && q.impulses().is_empty()
            && q.breakpoints() == [support.0.clone(), support.1.clone()];
        let measured = q
            .intervals()
            .map(|(a, b, p)| format!("{p} on [{}, {})", format_rational(a), format_rational(b)))
            .collect::<Vec<_>>()
            .join("; ");
        Ok(outcome(self, passed, measured, format!("{value} on [-1, 2/3)")))
    }
}

struct DhHistogram;

impl VerificationCheck for DhHistogram {
    fn name(&self) -> &'static str {
        "dh-histogram"
    }
    fn criterion(&self) -> &'static str {
        "6b"
    }
    fn description(&self) -> &'static str {
        "Monte Carlo DH density on S³(3/2, 1) is flat at (2π)²/(1+w), 2% L∞ on interior bins"
    }
    fn run(&self, ctx: &VerifyContext) -> Result<CheckOutcome> {
        let start = Instant::now();
        let cfg = ctx.mc(10_000_000, 20);
        let h = mc_dh_histogram(&s3(), &cfg)?;
        let elapsed = start.elapsed().as_secs_f64();
        let flat = s3_flat_density(&rational(3, 2));
        let expected = format!("{flat:.6} on interior bins");
        if ctx.quick {
            let worst = h
                .rows()
                .skip(1)
                .take(h.bins() - 2)
                .map(|(_, _, d, s)| (d - flat).abs() / s)
                .fold(0.0, f64::max);
            let passed = worst <= ctx.sigmas() && h.outside_mass == 0.0;
            return Ok(outcome(
                self,
                passed,
                format!("max deviation {worst:.2}σ at {} samples", cfg.samples),
                format!("{expected}, within {}σ", ctx.sigmas()),
            ));
        }
        let err = h.interior_max_relative_error(|_| flat);
        let passed = err < 0.02 && h.outside_mass == 0.0 && elapsed < 60.0;
        Ok(outcome(
            self,
            passed,
            format!("max relative error {err:.4} at {} samples, {elapsed:.1} s", cfg.samples),
            format!("{expected}, error < 0.02, < 60 s"),
        ))
    }
}

struct DhAtZero;

impl VerificationCheck for DhAtZero {
    fn name(&self) -> &'static str {
        "dh-q0"
    }
    fn criterion(&self) -> &'static str {
        "6c"
    }
    fn description(&self) -> &'static str {
        "i^{-1}(2π)^{-1/2} Q(0) n₀ / vol(G) equals the quotient pairing"
    }
    fn run(&self, _ctx: &VerifyContext) -> Result<CheckOutcome> {
        let (lhs, rhs) = q0_identity(&s3(), &EquivariantClass::one())?;
        Ok(outcome(self, lhs == rhs, lhs.to_string(), rhs.to_string()))
    }
}

struct Asymptotics;

impl VerificationCheck for Asymptotics {
    fn name(&self) -> &'static str {
        "asymptotics"
    }
    fn criterion(&self) -> &'static str {
        "7"
    }
    fn description(&self) -> &'static str {
        "|I(ε) − 4π/5| decays monotonically like ε^{-1/2}e^{-c/ε} with c > 0, R² > 0.99"
    }
    fn run(&self, _ctx: &VerifyContext) -> Result<CheckOutcome> {
        let grid = [0.2, 0.1, 0.05, 0.025];
        let sphere = s3();
        let report = asymptotic_report(&sphere, &EquivariantClass::one(), &grid)?;
        let q = dh_distribution(&sphere, &EquivariantClass::one())?;
        // closed form against quadrature at 1e-10
        let mut quadrature_gap: f64 = 0.0;
        for (&e, v) in grid.iter().zip(&report.i_values) {
            let quad = crate::dh::i_epsilon_quadrature(&q, e, 1e-14)?;
            quadrature_gap = quadrature_gap.max((v - quad).norm() / v.norm());
        }
        let c = report.decay_exponent_estimate.unwrap_or(f64::NAN);
        let r2 = report.r_squared.unwrap_or(f64::NAN);
        let passed = report.is_monotone()
            && c > 0.0
            && r2 > 0.99
            && quadrature_gap <= 1e-10
            && report.limit.to_string() == "(4/5)*pi";
        let deviations = report
            .deviations
            .iter()
            .map(|d| format!("{d:.3e}"))
            .collect::<Vec<_>>()
            .join(" > ");
        Ok(outcome(
            self,
            passed,
            format!(
                "limit {}, deviations {deviations}, c = {c:.4}, R² = {r2:.5}, quadrature gap {quadrature_gap:.1e}",
                report.limit
            ),
            "limit (4/5)*pi, monotone, c > 0, R² > 0.99, gap ≤ 1e-10",
        ))
    }
}

struct GaussianTail;

impl VerificationCheck for GaussianTail {
    fn name(&self) -> &'static str {
        "gaussian-tail"
    }
    fn criterion(&self) -> &'static str {
        "8"
    }
    fn description(&self) -> &'static str {
        "∫_δ^∞ x^n e^{-ax²} dx is below the tail bound; exact n = 1 value matches quadrature"
    }
    fn run(&self, _ctx: &VerifyContext) -> Result<CheckOutcome> {
        let mut violations = 0;
        let mut worst_n1: f64 = 0.0;
        for n in 0..=4 {
            for delta in [0.5, 1.0, 2.0] {
                for a in [0.5, 1.0, 3.0] {
                    let numeric = gaussian_tail_numeric(n, delta, a, 1e-16);
                    if numeric > gaussian_tail_bound(n, delta, a) {
                        violations += 1;
                    }
                    if n == 1 {
                        let exact = gaussian_tail_n1(delta, a);
                        let numeric = gaussian_tail_numeric(1, delta, a, exact * 1e-13);
                        worst_n1 = worst_n1.max((numeric - exact).abs() / exact);
                    }
                }
            }
        }
        Ok(outcome(
            self,
            violations == 0 && worst_n1 <= 1e-10,
            format!("{violations} violations of 45, n = 1 relative gap {worst_n1:.1e}"),
            "0 violations, gap ≤ 1e-10",
        ))
    }
}

struct Determinism;

impl VerificationCheck for Determinism {
    fn name(&self) -> &'static str {
        "oracle-determinism"
    }
    fn criterion(&self) -> &'static str {
        "9"
    }
    fn description(&self) -> &'static str {
        "Monte Carlo results are bitwise identical for 1 and 4 workers"
    }
    fn run(&self, ctx: &VerifyContext) -> Result<CheckOutcome> {
        let base = McConfig {
            workers: 1,
            ..ctx.mc(200_000, 20)
        };
        let four = McConfig { workers: 4, ..base };
        let h1 = mc_dh_histogram(&ctx.sphere, &base)?;
        let h4 = mc_dh_histogram(&ctx.sphere, &four)?;
        let v1 = mc_contact_volume(&ctx.sphere, &base)?;
        let v4 = mc_contact_volume(&ctx.sphere, &four)?;
        let same = h1 == h4 && v1.volume.value.to_bits() == v4.volume.value.to_bits();
        Ok(outcome(
            self,
            same,
            format!(
                "volume {:.17e} vs {:.17e}, histograms {}",
                v1.volume.value,
                v4.volume.value,
                if h1 == h4 { "identical" } else { "differ" }
            ),
            "identical",
        ))
    }
}

struct OracleVolume;

impl VerificationCheck for OracleVolume {
    fn name(&self) -> &'static str {
        "oracle-volume"
    }
    fn criterion(&self) -> &'static str {
        "oracle"
    }
    fn description(&self) -> &'static str {
        "Monte Carlo contact volume of the configured sphere agrees with the exact value"
    }
    fn run(&self, ctx: &VerifyContext) -> Result<CheckOutcome> {
        let v = mc_contact_volume(&ctx.sphere, &ctx.mc(1_000_000, 20))?;
        let exact = contact_volume_closed_form(&ctx.sphere);
        let x = exact.to_complex().re;
        let sigmas = v.volume.sigmas_from(x);
        Ok(outcome(
            self,
            sigmas <= ctx.sigmas(),
            format!("{:.10} ± {:.2e} ({sigmas:.2}σ)", v.volume.value, v.volume.stderr),
            format!("{exact} = {x:.10}, within {}σ", ctx.sigmas()),
        ))
    }
}

/// All checks, keyed by name.
pub struct CheckRegistry {
    checks: Vec<Box<dyn VerificationCheck>>,
}

impl Default for CheckRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(ContactVolume));
        r.register(Box::new(LocalizationIdentity));
        r.register(Box::new(S3Pairing));
        r.register(Box::new(EulerData));
        r.register(Box::new(Polynomiality));
        r.register(Box::new(DhExact));
        r.register(Box::new(DhHistogram));
        r.register(Box::new(DhAtZero));
        r.register(Box::new(Asymptotics));
        r.register(Box::new(GaussianTail));
        r.register(Box::new(Determinism));
        r.register(Box::new(OracleVolume));
        r
    }
}

impl CheckRegistry {
    pub fn empty() -> Self {
        Self { checks: Vec::new() }
    }

    /// Adds a check, replacing one with the same name.
    pub fn register(&mut self, check: Box<dyn VerificationCheck>) {
        self.checks.retain(|c| c.name() != check.name());
        self.checks.push(check);
    }

    pub fn get(&self, name: &str) -> Result<&dyn VerificationCheck> {
        self.checks
            .iter()
            .find(|c| c.name() == name || c.criterion() == name)
            .map(|c| c.as_ref())
            .ok_or_else(|| Error::Config(format!("unknown check `{name}`; available: {}", self.names().join(", "))))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.checks.iter().map(|c| c.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn VerificationCheck> {
        self.checks.iter().map(|c| c.as_ref())
    }

    /// Runs the selected checks (all when `only` is empty). A check that errors counts as failed.
    pub fn run(&self, ctx: &VerifyContext, only: &[String]) -> Result<VerificationReport> {
        let selected: Vec<&dyn VerificationCheck> = if only.is_empty() {
            self.iter().collect()
        } else {
            only.iter().map(|n| self.get(n)).collect::<Result<_>>()?
        };
        let outcomes = selected
            .into_iter()
            .map(|check| {
                check.run(ctx).unwrap_or_else(|e| CheckOutcome {
                    name: check.name(),
                    criterion: check.criterion(),
                    passed: false,
                    measured: format!("error: {e}"),
                    expected: check.description().to_string(),
                })
            })
            .collect();
        Ok(VerificationReport { outcomes })
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct VerificationReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.outcomes {
            writeln!(
                f,
                "[{}] {:<7} {:<26} measured: {}",
                if o.passed { "PASS" } else { "FAIL" },
                o.criterion,
                o.name,
                o.measured
            )?;
            writeln!(f, "{:>43} expected: {}", "", o.expected)?;
        }
        let failed = self.outcomes.iter().filter(|o| !o.passed).count();
        write!(f, "{} checks, {failed} failed", self.outcomes.len())
    }
}

/// `(2π)²/(1+w)`, the Monte Carlo DH density of `S³(w, 1)`.
pub fn s3_flat_density(w: &Rational) -> f64 {
    (2.0 * std::f64::consts::PI).powi(2) / rational_to_f64(&(Rational::one() + w))
}
