use contactloc_core::algebra::{format_rational, GaussianRational};
use contactloc_core::dh::{asymptotic_report, dh_distribution, PiecewisePolynomial};
use contactloc_core::jk::{quotient_pairing_report, volume_of_circle, ConeRegistry};
use contactloc_core::localization::{
    contact_volume, eval_pushforward, pair_alpha_eta, pushforward, pushforward_at_zero, LocalizationTerm,
};
use contactloc_core::mc::{mc_contact_volume, mc_dh_histogram, Histogram};
use contactloc_core::verify::{CheckRegistry, VerifyContext};
use contactloc_core::{Complex64, ExactScalar, Rational, Result, WeightedSphere};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::{complex, emit, num, write_csv};
use crate::{Command, GlobalArgs, EXIT_VERIFY_FAILED};

const DEFAULT_EPSILONS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

/// Runs `command` and returns the process exit code.
pub fn run(command: &Command, cfg: &RunConfig, global: &GlobalArgs) -> Result<u8> {
    let out = global.output.as_deref();
    let value = match command {
        Command::Volume { mc } => volume(cfg, *mc)?,
        Command::Localize => localize(cfg)?,
        Command::Pushforward { phi } => pushforward_cmd(cfg, phi)?,
        Command::Residue { cone } => residue(cfg, cone.as_deref())?,
        Command::DhProfile {
            csv,
            points,
            mc,
            histogram_csv,
        } => dh_profile(cfg, csv.as_deref(), *points, *mc || histogram_csv.is_some(), histogram_csv.as_deref())?,
        Command::Asymptotics { epsilons, csv } => asymptotics(cfg, epsilons.as_deref(), csv.as_deref())?,
        Command::Verify {
            only,
            list,
            quick,
            perturb_euler,
            json,
        } => return verify(cfg, only, *list, *quick, *perturb_euler, *json, out),
    };
    emit(&value, out)?;
    Ok(0)
}

fn exact(x: &ExactScalar) -> Value {
    json!({ "exact": x.to_string(), "float": complex(x.to_complex()) })
}

fn sphere_json(sphere: &WeightedSphere) -> Value {
    json!({
        "n": sphere.n(),
        "w": sphere.weights().iter().map(format_rational).collect::<Vec<_>>(),
        "beta": sphere.beta(),
    })
}

fn volume(cfg: &RunConfig, with_mc: bool) -> Result<Value> {
    let sphere = cfg.sphere_for_volume()?;
    let mc_cfg = if with_mc { Some(cfg.mc()?) } else { None };
    let v = contact_volume(&sphere)?;
    let float = v.to_complex().re;
    let mut out = json!({
        "weights": sphere.weights().iter().map(format_rational).collect::<Vec<_>>(),
        "n": sphere.n(),
        "exact": v.to_string(),
        "float": num(float),
    });
    if let Some(mc_cfg) = mc_cfg {
        let est = mc_contact_volume(&sphere, &mc_cfg)?;
        out["mc"] = json!({
            "value": num(est.volume.value),
            "stderr": num(est.volume.stderr),
            "sigmas_from_exact": num(est.volume.sigmas_from(float)),
            "samples": mc_cfg.samples,
            "seed": mc_cfg.seed,
            "workers": mc_cfg.workers,
        });
    }
    Ok(out)
}

fn localize(cfg: &RunConfig) -> Result<Value> {
    let sphere = cfg.sphere()?;
    let eta = cfg.eta()?;
    let circles = sphere.critical_circles()?;
    let pairing = pair_alpha_eta(&sphere, &eta)?;
    Ok(json!({
        "sphere": sphere_json(&sphere),
        "eta": eta.to_string(),
        "reduced_eta": eta.reduce(&sphere)?.to_string(),
        "circles": circles.iter().map(|c| json!({
            "index": c.index,
            "mu": format_rational(&c.mu_value),
            "euler_class": c.euler_class.to_string(),
            "restriction_slope": format_rational(&c.restriction_slope),
            "alpha_integral": c.alpha_integral.to_string(),
            "restricted_eta": c.restrict(&eta).to_string(),
        })).collect::<Vec<_>>(),
        "pairing": pairing.to_string(),
    }))
}

fn terms_json(terms: &[LocalizationTerm]) -> Value {
    terms
        .iter()
        .map(|t| {
            json!({
                "circle": t.circle_index,
                "exponent": format_rational(&t.exponent_lambda),
                "amplitude": t.amplitude.to_string(),
            })
        })
        .collect()
}

fn pushforward_cmd(cfg: &RunConfig, phis: &[f64]) -> Result<Value> {
    let sphere = cfg.sphere()?;
    let eta = cfg.eta()?;
    let terms = pushforward(&sphere, &eta)?;
    let values = phis
        .iter()
        .map(|&phi| {
            let v = eval_pushforward(&terms, Complex64::new(phi, 0.0))?;
            Ok(json!({ "phi": num(phi), "value": complex(v) }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({
        "sphere": sphere_json(&sphere),
        "eta": eta.to_string(),
        "terms": terms_json(&terms),
        "at_zero": exact(&pushforward_at_zero(&terms)?),
        "values": values,
    }))
}

fn residue(cfg: &RunConfig, cone: Option<&str>) -> Result<Value> {
    let sphere = cfg.sphere()?;
    let eta = cfg.eta()?;
    let registry = ConeRegistry::default();
    let cone = registry.get(cone.or(cfg.cone.as_deref()).unwrap_or("positive"))?;
    let report = quotient_pairing_report(&sphere, &eta, cone)?;
    Ok(json!({
        "sphere": sphere_json(&sphere),
        "eta": eta.to_string(),
        "exact": report.value.to_string(),
        "float": complex(report.value.to_complex()),
        "cone": report.cone,
        "jkres": report.residue.to_string(),
        "n0": report.input.n0,
        "vol_g": report.input.volume_of_g.to_string(),
        "terms": terms_json(&report.input.terms),
    }))
}

fn distribution_json(q: &PiecewisePolynomial) -> Value {
    json!({
        "breakpoints": q.breakpoints().iter().map(format_rational).collect::<Vec<_>>(),
        "pieces": q.intervals().map(|(a, b, p)| json!({
            "from": format_rational(a),
            "to": format_rational(b),
            "q": p.to_string(),
        })).collect::<Vec<_>>(),
        "impulses": q.impulses().iter().map(|i| json!({
            "location": format_rational(&i.location),
            "order": i.order,
            "coefficient": i.coefficient.to_string(),
        })).collect::<Vec<_>>(),
        "support": q.support().map(|(a, b)| vec![format_rational(a), format_rational(b)]),
        "integral": q.integral().to_string(),
    })
}

fn histogram_json(h: &Histogram, q: &PiecewisePolynomial, n: usize) -> Value {
    // Q = (2π)^{1/2} i^n × (density of -μ under α∧(dα)^n/n!)
    let scale = ExactScalar::sqrt_two_pi()
        .scale_gaussian(&GaussianRational::i_pow(n as i64))
        .to_complex();
    let expected = |y: f64| (q.evaluate(y) / scale).re;
    json!({
        "bins": h.rows().map(|(l, r, d, s)| json!({
            "left": num(l), "right": num(r), "density": num(d), "stderr": num(s),
            "expected": num(expected(0.5 * (l + r))),
        })).collect::<Vec<_>>(),
        "total_mass": num(h.total_mass.value),
        "total_mass_stderr": num(h.total_mass.stderr),
        "outside_mass": num(h.outside_mass),
        "max_interior_relative_error": num(h.interior_max_relative_error(expected)),
    })
}

fn dh_profile(
    cfg: &RunConfig,
    csv: Option<&std::path::Path>,
    points: usize,
    with_mc: bool,
    histogram_csv: Option<&std::path::Path>,
) -> Result<Value> {
    let sphere = cfg.sphere()?;
    let eta = cfg.eta()?;
    let mc_cfg = if with_mc { Some(cfg.mc()?) } else { None };
    let q = dh_distribution(&sphere, &eta)?;
    let mut out = json!({
        "sphere": sphere_json(&sphere),
        "eta": eta.to_string(),
        "distribution": distribution_json(&q),
    });
    if sphere.check_zero_regular() {
        out["value_at_zero"] = exact(&q.value_at(&Rational::from_integer(0.into())));
    }
    if let Some(path) = csv {
        let rows = q.samples(points).into_iter().map(|(y, v)| vec![y, v.re, v.im]);
        write_csv(path, &["y", "re_q", "im_q"], rows)?;
        out["csv"] = json!(path.display().to_string());
    }
    if let Some(mc_cfg) = mc_cfg {
        let h = mc_dh_histogram(&sphere, &mc_cfg)?;
        if let Some(path) = histogram_csv {
            let rows = h.rows().map(|(l, r, d, s)| vec![l, r, d, s]);
            write_csv(path, &["bin_left", "bin_right", "density", "stderr"], rows)?;
        }
        out["histogram"] = histogram_json(&h, &q, sphere.n());
    }
    Ok(out)
}

fn asymptotics(cfg: &RunConfig, epsilons: Option<&[f64]>, csv: Option<&std::path::Path>) -> Result<Value> {
    let sphere = cfg.sphere()?;
    let eta = cfg.eta()?;
    let grid = epsilons
        .map(<[f64]>::to_vec)
        .or_else(|| cfg.epsilons.clone())
        .unwrap_or_else(|| DEFAULT_EPSILONS.to_vec());
    let report = asymptotic_report(&sphere, &eta, &grid)?;
    if let Some(path) = csv {
        let rows = report.epsilons.iter().zip(&report.i_values).map(|(e, v)| vec![*e, v.re, v.im]);
        write_csv(path, &["epsilon", "re_i", "im_i"], rows)?;
    }
    Ok(json!({
        "sphere": sphere_json(&sphere),
        "eta": eta.to_string(),
        "limit": exact(&report.limit),
        "vol_g": volume_of_circle().to_string(),
        "points": report.epsilons.iter().zip(&report.i_values).zip(&report.deviations).map(|((e, v), d)| json!({
            "epsilon": num(*e),
            "value": complex(*v),
            "deviation": num(*d),
        })).collect::<Vec<_>>(),
        "monotone": report.is_monotone(),
        "decay_exponent_estimate": report.decay_exponent_estimate.map(num),
        "amplitude_estimate": report.amplitude_estimate.map(num),
        "r_squared": report.r_squared.map(num),
    }))
}

fn verify(
    cfg: &RunConfig,
    only: &[String],
    list: bool,
    quick: bool,
    perturb: Option<f64>,
    as_json: bool,
    out: Option<&std::path::Path>,
) -> Result<u8> {
    let registry = CheckRegistry::default();
    if list {
        for check in registry.iter() {
            println!("{:<7} {:<26} {}", check.criterion(), check.name(), check.description());
        }
        return Ok(0);
    }
    let sphere = if cfg.sphere.is_some() {
        cfg.sphere()?
    } else {
        WeightedSphere::s3_example(Rational::new(3.into(), 2.into()))?
    };
    let mc = cfg.mc()?;
    let mut ctx = VerifyContext {
        seed: mc.seed,
        workers: mc.workers,
        quick,
        ..VerifyContext::new(sphere)
    };
    if let Some(delta) = perturb {
        ctx = ctx.with_perturbation(delta)?;
    }
    let report = registry.run(&ctx, only)?;
    if as_json {
        let value = json!({ "passed": report.passed(), "checks": report.outcomes });
        emit(&value, out)?;
    } else {
        println!("{report}");
    }
    Ok(if report.passed() { 0 } else { EXIT_VERIFY_FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;
    use contactloc_core::algebra::rational_to_f64;

    #[test]
    fn flat_density_expectation() {
        let sphere = WeightedSphere::s3_example(Rational::new(3.into(), 2.into())).unwrap();
        let q = dh_distribution(&sphere, &contactloc_core::EquivariantClass::one()).unwrap();
        let scale = ExactScalar::sqrt_two_pi()
            .scale_gaussian(&GaussianRational::i_pow(1))
            .to_complex();
        let d = (q.evaluate(0.0) / scale).re;
        let flat = (2.0 * std::f64::consts::PI).powi(2) / rational_to_f64(&Rational::new(5.into(), 2.into()));
        assert!((d - flat).abs() < 1e-12);
    }
}
