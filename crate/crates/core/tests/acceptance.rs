//! Acceptance suite. Each criterion is checked directly and through the
//! matching entry of the verification registry; one line is printed per
//! criterion and the process fails if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use contactloc_core::algebra::{rational, ExactScalar, GaussianRational, Poly};
use contactloc_core::dh::{
    asymptotic_report, dh_distribution, gaussian_tail_bound, gaussian_tail_n1, gaussian_tail_numeric,
    i_epsilon_quadrature, q0_identity,
};
use contactloc_core::jk::{quotient_pairing, volume_of_circle};
use contactloc_core::localization::{contact_volume, pair_alpha_eta};
use contactloc_core::mc::{mc_contact_volume, mc_dh_histogram, McConfig};
use contactloc_core::random::{random_class, RandomSphere};
use contactloc_core::sphere::U;
use contactloc_core::verify::{s3_flat_density, CheckRegistry, VerifyContext};
use contactloc_core::{EquivariantClass, Error, Rational, WeightedSphere};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn s3() -> WeightedSphere {
    WeightedSphere::s3_example(rational(3, 2)).unwrap()
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(0x00AC_CE97);
    rng.set_stream(stream);
    rng
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

/// (2π)^{n+1} / (2^n n! Π w_j), built without the library's closed form.
fn expected_volume(sphere: &WeightedSphere) -> ExactScalar {
    let n = sphere.n();
    let mut denom = Rational::one();
    for k in 1..=n as i64 {
        denom *= rational(2 * k, 1);
    }
    for w in sphere.weights() {
        denom *= w;
    }
    ExactScalar::two_pi_pow(n as i32 + 1).scale(&(Rational::one() / denom))
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let mut rng = rng(1);
    for k in 0..100 {
        let sphere = RandomSphere::new(1 + k % 4).sample(&mut rng);
        let got = contact_volume(&sphere).map_err(err)?;
        let want = expected_volume(&sphere);
        ensure(got == want, || format!("{sphere}: {got} vs {want}"))?;
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 10.0, || format!("took {elapsed:.2} s"))?;
    Ok(format!("100 random spheres exact, {elapsed:.2} s"))
}

fn criterion_2() -> Check {
    let mut rng = rng(2);
    for k in 0..100 {
        let sphere = RandomSphere::new(1 + k % 4).sample(&mut rng);
        let (w, beta, n) = (sphere.weights(), sphere.beta(), sphere.n());
        let mut sum = Rational::zero();
        for j in 0..=n {
            let mut denom = Rational::one();
            for k in (0..=n).filter(|&k| k != j) {
                denom *= rational(beta[k], 1) / &w[k] * &w[j] - rational(beta[j], 1);
            }
            sum += rational(beta[j], 1).pow(n as i32) / denom;
        }
        let want = if n % 2 == 0 { Rational::one() } else { -Rational::one() };
        ensure(sum == want, || format!("{sphere}: sum {sum}"))?;
    }
    Ok("100 random (w, β) exact".into())
}

fn criterion_3() -> Check {
    let sphere = s3();
    let got = quotient_pairing(&sphere, &EquivariantClass::one()).map_err(err)?;
    let four_fifths_pi = ExactScalar::pi().scale(&rational(4, 5));
    ensure(got == four_fifths_pi, || format!("η = 1 gives {got}"))?;
    let mut rng = rng(3);
    for _ in 0..50 {
        let degree = rng.random_range(0..=4);
        let eta = random_class(&mut rng, degree, 7);
        let c = eta.rep().constant_term();
        let got = quotient_pairing(&sphere, &eta).map_err(err)?;
        let want = &four_fifths_pi * &c;
        ensure(got == want, || format!("η = {eta}: {got} vs {want}"))?;
    }
    Ok(format!("η = 1 gives {got}; 50 random classes give (4/5)*pi*c"))
}

fn criterion_4() -> Check {
    let w = rational(3, 2);
    let circles = s3().critical_circles().map_err(err)?;
    let u_over_2pi = Poly::monomial(ExactScalar::two_pi_pow(-1), &[(U, 1)]);
    let one = Rational::one();
    let expected = [
        (ExactScalar::from_rational(&one + &one / &w), -&one / &w, &one / &w),
        (ExactScalar::from_rational(-(&one + &w)), one.clone(), -one.clone()),
    ];
    ensure(circles.len() == 2, || format!("{} circles", circles.len()))?;
    for (c, (e, mu, slope)) in circles.iter().zip(&expected) {
        let e = u_over_2pi.scale(e);
        ensure(c.euler_class == e, || format!("circle {}: e = {} vs {e}", c.index, c.euler_class))?;
        ensure(&c.mu_value == mu, || format!("circle {}: μ = {} vs {mu}", c.index, c.mu_value))?;
        ensure(&c.restriction_slope == slope, || {
            format!("circle {}: slope {} vs {slope}", c.index, c.restriction_slope)
        })?;
    }
    Ok(format!("e0 = {}, e1 = {}", circles[0].euler_class, circles[1].euler_class))
}

fn criterion_5() -> Check {
    let mut rng = rng(5);
    for k in 0..200 {
        let sphere = RandomSphere::new(1 + k % 4).sample(&mut rng);
        let degree = rng.random_range(0..=6);
        let eta = random_class(&mut rng, degree, 9);
        let m = random_class(&mut rng, 3, 4);
        let shifted = EquivariantClass::new(eta.rep() + &(m.rep() * &sphere.ideal_generator())).map_err(err)?;
        let a = pair_alpha_eta(&sphere, &eta).map_err(|e| format!("{sphere}, η = {eta}: {e}"))?;
        let b = pair_alpha_eta(&sphere, &shifted).map_err(|e| format!("{sphere}, η = {shifted}: {e}"))?;
        ensure(a == b, || format!("{sphere}, η = {eta}: {a} vs {b}"))?;
    }
    Ok("200 random (sphere, η) polynomial and representative-independent".into())
}

fn criterion_6a() -> Check {
    let q = dh_distribution(&s3(), &EquivariantClass::one()).map_err(err)?;
    // i (2π)^{5/2} / (1 + 3/2)
    let flat = (&ExactScalar::sqrt_two_pi() * &ExactScalar::two_pi_pow(2))
        .scale_gaussian(&GaussianRational::i())
        .scale(&rational(2, 5));
    ensure(q.breakpoints() == [rational(-1, 1), rational(2, 3)], || {
        format!("breakpoints {:?}", q.breakpoints())
    })?;
    ensure(q.pieces() == [Poly::constant(flat.clone())], || format!("pieces {:?}", q.pieces()))?;
    ensure(q.impulses().is_empty(), || "unexpected impulses".into())?;
    Ok(format!("Q = {flat} on [-1, 2/3]"))
}

fn criterion_6b() -> Check {
    let cfg = McConfig {
        seed: McConfig::default().seed,
        samples: 10_000_000,
        workers: 4,
        histogram_bins: 20,
    };
    let start = Instant::now();
    let h = mc_dh_histogram(&s3(), &cfg).map_err(err)?;
    let elapsed = start.elapsed().as_secs_f64();
    let flat = s3_flat_density(&rational(3, 2));
    let expected = (2.0 * std::f64::consts::PI).powi(2) / 2.5;
    ensure((flat - expected).abs() < 1e-12, || format!("flat density {flat} vs {expected}"))?;
    let error = h.interior_max_relative_error(|_| expected);
    ensure(error < 0.02, || format!("L∞ relative error {error:.4}"))?;
    ensure(h.outside_mass == 0.0, || format!("mass outside the range: {}", h.outside_mass))?;
    ensure(elapsed < 60.0, || format!("took {elapsed:.1} s"))?;
    Ok(format!("10^7 samples, 4 workers: L∞ relative error {error:.4}, {elapsed:.1} s"))
}

fn criterion_6c() -> Check {
    let sphere = s3();
    let eta = EquivariantClass::one();
    let q = dh_distribution(&sphere, &eta).map_err(err)?;
    // i^{-1} (2π)^{-1/2} Q(0) n₀ / vol G
    let lhs = q
        .value_at(&Rational::zero())
        .scale_gaussian(&GaussianRational::i_pow(-1))
        .div(&ExactScalar::sqrt_two_pi())
        .and_then(|x| x.div(&volume_of_circle()))
        .map_err(err)?
        .scale(&rational(sphere.regular_isotropy_order() as i64, 1));
    let rhs = quotient_pairing(&sphere, &eta).map_err(err)?;
    ensure(lhs == rhs, || format!("{lhs} vs {rhs}"))?;
    let (a, b) = q0_identity(&sphere, &eta).map_err(err)?;
    ensure(a == b, || format!("library identity: {a} vs {b}"))?;
    Ok(format!("{lhs} = {rhs}"))
}

fn criterion_7() -> Check {
    let grid = [0.2, 0.1, 0.05, 0.025];
    let sphere = s3();
    let eta = EquivariantClass::one();
    let report = asymptotic_report(&sphere, &eta, &grid).map_err(err)?;
    let limit = 0.8 * std::f64::consts::PI;
    ensure((report.limit.to_complex().re - limit).abs() < 1e-15, || format!("limit {}", report.limit))?;
    let q = dh_distribution(&sphere, &eta).map_err(err)?;
    let mut deviations = Vec::new();
    for (&eps, closed) in grid.iter().zip(&report.i_values) {
        let quad = i_epsilon_quadrature(&q, eps, 1e-14).map_err(err)?;
        let gap = (closed - quad).norm() / quad.norm();
        ensure(gap <= 1e-10, || format!("ε = {eps}: closed form and quadrature differ by {gap:.1e}"))?;
        deviations.push((quad - limit).norm());
    }
    ensure(deviations.windows(2).all(|d| d[1] < d[0]), || format!("not monotone: {deviations:?}"))?;
    // ln|I − L| + ½ ln ε = ln A − c/ε
    let xs: Vec<f64> = grid.iter().map(|e| 1.0 / e).collect();
    let ys: Vec<f64> = grid.iter().zip(&deviations).map(|(e, d)| d.ln() + 0.5 * e.ln()).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mx, my) = (mean(&xs), mean(&ys));
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let (c, r2) = (-slope, 1.0 - ss_res / ss_tot);
    ensure(c > 0.0, || format!("c = {c}"))?;
    ensure(r2 > 0.99, || format!("R² = {r2}"))?;
    let lib_c = report.decay_exponent_estimate.unwrap_or(f64::NAN);
    ensure((lib_c - c).abs() < 1e-9, || format!("library fit c = {lib_c} vs {c}"))?;
    Ok(format!("monotone, c = {c:.4}, R² = {r2:.5}"))
}

fn criterion_8() -> Check {
    let mut worst: f64 = 0.0;
    for n in 0..=4 {
        for delta in [0.5, 1.0, 2.0] {
            for a in [0.5, 1.0, 3.0] {
                let numeric = gaussian_tail_numeric(n, delta, a, 1e-16);
                let bound = gaussian_tail_bound(n, delta, a);
                ensure(numeric <= bound, || format!("n={n} δ={delta} a={a}: {numeric} > {bound}"))?;
                if n == 1 {
                    let exact = (-a * delta * delta).exp() / (2.0 * a);
                    ensure((gaussian_tail_n1(delta, a) - exact).abs() <= 1e-15 * exact, || {
                        format!("n=1 closed form at δ={delta} a={a}")
                    })?;
                    let gap = (numeric - exact).abs();
                    worst = worst.max(gap);
                    ensure(gap <= 1e-10, || format!("n=1 δ={delta} a={a}: gap {gap:.1e}"))?;
                }
            }
        }
    }
    Ok(format!("45 grid points bounded, n = 1 gap {worst:.1e}"))
}

fn criterion_9() -> Check {
    let mut rng = rng(9);
    let spheres = [s3(), RandomSphere::new(2).with_regular_zero().sample(&mut rng)];
    for sphere in &spheres {
        let one = McConfig {
            seed: 17,
            samples: 300_000,
            workers: 1,
            histogram_bins: 20,
        };
        let four = McConfig { workers: 4, ..one };
        let v1 = mc_contact_volume(sphere, &one).map_err(err)?;
        let v4 = mc_contact_volume(sphere, &four).map_err(err)?;
        ensure(v1.volume.value.to_bits() == v4.volume.value.to_bits(), || {
            format!("{sphere}: volume {:e} vs {:e}", v1.volume.value, v4.volume.value)
        })?;
        ensure(v1.volume.stderr.to_bits() == v4.volume.stderr.to_bits(), || format!("{sphere}: stderr differs"))?;
        let h1 = mc_dh_histogram(sphere, &one).map_err(err)?;
        let h4 = mc_dh_histogram(sphere, &four).map_err(err)?;
        ensure(h1 == h4, || format!("{sphere}: histograms differ"))?;
    }
    Ok("volume and histogram bitwise identical for workers 1 and 4".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("1", criterion_1),
        ("2", criterion_2),
        ("3", criterion_3),
        ("4", criterion_4),
        ("5", criterion_5),
        ("6a", criterion_6a),
        ("6b", criterion_6b),
        ("6c", criterion_6c),
        ("7", criterion_7),
        ("8", criterion_8),
        ("9", criterion_9),
    ];
    let ctx = VerifyContext {
        workers: 4,
        ..VerifyContext::new(s3())
    };
    let registry = CheckRegistry::default();
    let mut failed = 0;
    for (label, direct) in criteria {
        let mut result = direct();
        if result.is_ok() {
            let checks: Vec<_> = registry.iter().filter(|c| c.criterion() == label).collect();
            for check in checks {
                match check.run(&ctx) {
                    Ok(o) if o.passed => {}
                    Ok(o) => result = Err(format!("{}: {} (expected {})", o.name, o.measured, o.expected)),
                    Err(e) => result = Err(format!("{}: {e}", check.name())),
                }
            }
        }
        match result {
            Ok(msg) => println!("[PASS] criterion {label}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("[FAIL] criterion {label}: {msg}");
            }
        }
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
