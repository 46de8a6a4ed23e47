//! Monte Carlo oracle on `S^{2n+1}`.
//!
//! Points are uniform on the round sphere. Contact integrals are reweighted
//! through `α_w ∧ (dα_w)^n = h^{-(n+1)} α_1 ∧ (dα_1)^n`, `h = Σ w_j|z_j|²`,
//! which follows from `α_w = α_1/h`.
//!
//! Samples are split into fixed chunks of [`CHUNK_SIZE`]; chunk `c` draws
//! from ChaCha8 stream `c` of the seed. Chunks are reduced in index order,
//! so results do not depend on the number of worker threads.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::algebra::rational_to_f64;
use crate::error::{Error, Result};
use crate::sphere::WeightedSphere;

pub const CHUNK_SIZE: u64 = 16_384;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub seed: u64,
    pub samples: u64,
    pub workers: usize,
    pub histogram_bins: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            seed: 20_240_917,
            samples: 1_000_000,
            workers: 1,
            histogram_bins: 20,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("samples must be positive".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be positive".into()));
        }
        if self.histogram_bins == 0 {
            return Err(Error::Config("histogram_bins must be positive".into()));
        }
        Ok(())
    }
}

/// Uniform point on `S^{2n+1} ⊂ C^{n+1}` from normalized complex Gaussians.
pub fn sample_sphere<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    loop {
        let z: Vec<Complex64> = (0..=n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = z.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            return z.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Runs `f(rng, count)` on every chunk and returns the results in chunk order.
fn run_chunks<T, F>(cfg: &McConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    cfg.validate()?;
    let chunks = cfg.samples.div_ceil(CHUNK_SIZE);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    Ok(pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let count = CHUNK_SIZE.min(cfg.samples - c * CHUNK_SIZE);
                f(&mut chunk_rng(cfg.seed, c), count)
            })
            .collect()
    }))
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl Estimate {
    fn from_sums(sum: f64, sum_sq: f64, samples: u64) -> Self {
        let n = samples as f64;
        let mean = sum / n;
        let var = if samples > 1 {
            ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        Self {
            value: mean,
            stderr: (var / n).sqrt(),
            samples,
        }
    }

    fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            stderr: self.stderr * factor.abs(),
            samples: self.samples,
        }
    }

    /// `|value - exact|` in units of the standard error.
    pub fn sigmas_from(&self, exact: f64) -> f64 {
        let d = (self.value - exact).abs();
        if self.stderr == 0.0 {
            if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            d / self.stderr
        }
    }
}

fn estimate_mean<F>(n: usize, cfg: &McConfig, f: F) -> Result<Estimate>
where
    F: Fn(&[Complex64]) -> f64 + Sync,
{
    let parts = run_chunks(cfg, |rng, count| {
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..count {
            let v = f(&sample_sphere(n, rng));
            s += v;
            s2 += v * v;
        }
        (s, s2)
    })?;
    let (sum, sum_sq) = parts.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    Ok(Estimate::from_sums(sum, sum_sq, cfg.samples))
}

/// `E[|z_0|²]` under the uniform measure, `1/(n+1)`.
pub fn mc_mean_first_coordinate(n: usize, cfg: &McConfig) -> Result<Estimate> {
    estimate_mean(n, cfg, |z| z[0].norm_sqr())
}

/// `(2π)^{n+1}/n!`, the mass of `α_1 ∧ (dα_1)^n / n!`.
fn round_mass(n: usize) -> f64 {
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    (2.0 * std::f64::consts::PI).powi(n as i32 + 1) / factorial
}

/// Contact volume estimate together with the raw `E[h^{-(n+1)}]`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct McVolume {
    pub volume: Estimate,
    pub mean_weight: Estimate,
}

/// `∫ α∧(dα)^n / (2^n n!) = (2π^{n+1}/n!) E[h^{-(n+1)}]`.
pub fn mc_contact_volume(sphere: &WeightedSphere, cfg: &McConfig) -> Result<McVolume> {
    let n = sphere.n();
    let mean_weight = estimate_mean(n, cfg, |z| sphere.conformal_factor(z).powi(-(n as i32 + 1)))?;
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    let factor = 2.0 * std::f64::consts::PI.powi(n as i32 + 1) / factorial;
    Ok(McVolume {
        volume: mean_weight.scaled(factor),
        mean_weight,
    })
}

/// Weighted histogram of `y = -μ(z)` against `α∧(dα)^n/n!`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    /// Mass per unit length in each bin.
    pub density: Vec<f64>,
    pub stderr: Vec<f64>,
    pub total_mass: Estimate,
    /// Weight that fell outside the edges (beyond float jitter).
    pub outside_mass: f64,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.density.len()
    }

    /// `(left, right, density, stderr)` per bin.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        self.edges
            .windows(2)
            .zip(self.density.iter().zip(&self.stderr))
            .map(|(e, (d, s))| (e[0], e[1], *d, *s))
    }

    /// Largest relative deviation from `expected` over bins other than the first and last.
    pub fn interior_max_relative_error(&self, expected: impl Fn(f64) -> f64) -> f64 {
        let rows: Vec<_> = self.rows().collect();
        rows.iter()
            .skip(1)
            .take(rows.len().saturating_sub(2))
            .map(|(l, r, d, _)| {
                let e = expected(0.5 * (l + r));
                (d - e).abs() / e.abs()
            })
            .fold(0.0, f64::max)
    }
}

struct BinSums {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    total: f64,
    total_sq: f64,
    outside: f64,
}

pub fn mc_dh_histogram(sphere: &WeightedSphere, cfg: &McConfig) -> Result<Histogram> {
    let n = sphere.n();
    let bins = cfg.histogram_bins;
    let (min, max) = sphere.lambda_range();
    let (mut lo, mut hi) = (-rational_to_f64(&max), -rational_to_f64(&min));
    if hi <= lo {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / bins as f64;
    let jitter = 1e-9 * (hi - lo);
    let mass = round_mass(n);
    let exponent = -(n as i32 + 1);
    let parts = run_chunks(cfg, |rng, count| {
        let mut acc = BinSums {
            sum: vec![0.0; bins],
            sum_sq: vec![0.0; bins],
            total: 0.0,
            total_sq: 0.0,
            outside: 0.0,
        };
        for _ in 0..count {
            let z = sample_sphere(n, rng);
            let weight = mass * sphere.conformal_factor(&z).powi(exponent);
            acc.total += weight;
            acc.total_sq += weight * weight;
            let y = -sphere.moment_map_unchecked(&z);
            if y < lo - jitter || y > hi + jitter {
                acc.outside += weight;
                continue;
            }
            let k = (((y - lo) / width).floor().max(0.0) as usize).min(bins - 1);
            let v = weight / width;
            acc.sum[k] += v;
            acc.sum_sq[k] += v * v;
        }
        acc
    })?;
    let mut sum = vec![0.0; bins];
    let mut sum_sq = vec![0.0; bins];
    let (mut total, mut total_sq, mut outside) = (0.0, 0.0, 0.0);
    for p in &parts {
        for k in 0..bins {
            sum[k] += p.sum[k];
            sum_sq[k] += p.sum_sq[k];
        }
        total += p.total;
        total_sq += p.total_sq;
        outside += p.outside;
    }
    let per_bin: Vec<Estimate> = (0..bins)
        .map(|k| Estimate::from_sums(sum[k], sum_sq[k], cfg.samples))
        .collect();
    Ok(Histogram {
        edges: (0..=bins).map(|k| lo + width * k as f64).collect(),
        density: per_bin.iter().map(|e| e.value).collect(),
        stderr: per_bin.iter().map(|e| e.stderr).collect(),
        total_mass: Estimate::from_sums(total, total_sq, cfg.samples),
        outside_mass: outside / cfg.samples as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational;
    use crate::localization::contact_volume_closed_form;
    use crate::quadrature::integrate;
    use crate::random::RandomSphere;

    fn cfg(samples: u64, workers: usize) -> McConfig {
        McConfig {
            seed: 7,
            samples,
            workers,
            histogram_bins: 20,
        }
    }

    #[test]
    fn points_lie_on_the_sphere() {
        let mut rng = chunk_rng(1, 0);
        for n in 0..4 {
            let z = sample_sphere(n, &mut rng);
            assert_eq!(z.len(), n + 1);
            let norm: f64 = z.iter().map(|x| x.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn first_coordinate_mean() {
        for n in [1, 2] {
            let e = mc_mean_first_coordinate(n, &cfg(1_000_000, 4)).unwrap();
            assert!(e.sigmas_from(1.0 / (n as f64 + 1.0)) < 3.0, "{e:?}");
        }
    }

    #[test]
    fn config_is_validated() {
        assert!(mc_mean_first_coordinate(1, &cfg(0, 1)).is_err());
        assert!(mc_mean_first_coordinate(1, &cfg(10, 0)).is_err());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let sphere = WeightedSphere::parse(&["2", "3", "5"], &[-1, 2, 3]).unwrap();
        let a = mc_dh_histogram(&sphere, &cfg(100_000, 1)).unwrap();
        let b = mc_dh_histogram(&sphere, &cfg(100_000, 4)).unwrap();
        assert_eq!(a, b);
        let a = mc_contact_volume(&sphere, &cfg(70_001, 1)).unwrap();
        let b = mc_contact_volume(&sphere, &cfg(70_001, 3)).unwrap();
        assert_eq!(a.volume.value.to_bits(), b.volume.value.to_bits());
        assert_eq!(a.volume.stderr.to_bits(), b.volume.stderr.to_bits());
    }

    #[test]
    fn stderr_scales_with_sample_count() {
        let sphere = WeightedSphere::parse(&["2", "1"], &[-1, 1]).unwrap();
        let a = mc_contact_volume(&sphere, &cfg(100_000, 4)).unwrap().volume.stderr;
        let b = mc_contact_volume(&sphere, &cfg(200_000, 4)).unwrap().volume.stderr;
        let ratio = a / b;
        assert!((ratio / 2f64.sqrt() - 1.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn volume_examples() {
        let round = WeightedSphere::parse(&["1", "1"], &[-1, 1]).unwrap();
        let v = mc_contact_volume(&round, &cfg(1000, 1)).unwrap();
        assert!((v.volume.value - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-9);
        for (w, expected) in [(&["2", "1"][..], 0.5), (&["2", "3", "5"][..], 1.0 / 30.0)] {
            let sphere = WeightedSphere::parse(w, &vec![1; w.len()]).unwrap();
            let v = mc_contact_volume(&sphere, &cfg(1_000_000, 4)).unwrap();
            assert!(v.mean_weight.sigmas_from(expected) < 3.0, "{w:?}: {:?}", v.mean_weight);
        }
    }

    #[test]
    fn volume_on_random_spheres() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for k in 0..20 {
            let sphere = RandomSphere {
                max_weight: 5,
                ..RandomSphere::new(1 + k % 2)
            }
            .sample(&mut rng);
            let v = mc_contact_volume(&sphere, &cfg(200_000, 4)).unwrap();
            let exact = contact_volume_closed_form(&sphere).to_complex().re;
            assert!(v.volume.sigmas_from(exact) < 3.0, "{sphere}: {:?} vs {exact}", v.volume);
        }
    }

    #[test]
    fn s3_histogram_is_flat() {
        let sphere = WeightedSphere::s3_example(rational(3, 2)).unwrap();
        let h = mc_dh_histogram(&sphere, &cfg(400_000, 4)).unwrap();
        assert_eq!(h.outside_mass, 0.0);
        let flat = (2.0 * std::f64::consts::PI).powi(2) / 2.5;
        assert!(h.interior_max_relative_error(|_| flat) < 0.05);
        assert!((h.edges[0] + 1.0).abs() < 1e-15 && (h.edges[20] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_image_concentrates_in_one_bin() {
        let sphere = WeightedSphere::parse(&["1", "1"], &[1, 1]).unwrap();
        let h = mc_dh_histogram(&sphere, &cfg(10_000, 2)).unwrap();
        let nonzero: Vec<_> = h.rows().filter(|r| r.2 > 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        assert!(nonzero[0].0 <= -1.0 && -1.0 < nonzero[0].1);
    }

    /// `α_1(v) = Σ Im(z̄_j v_j)` on `R^{2n+2}`, extended off the sphere.
    fn alpha(w: &[f64], z: &[Complex64], v: &[Complex64]) -> f64 {
        let a: f64 = z.iter().zip(v).map(|(z, v)| (z.conj() * v).im).sum();
        let h: f64 = w.iter().zip(z).map(|(w, z)| w * z.norm_sqr()).sum();
        a / h
    }

    fn d_alpha(w: &[f64], z: &[Complex64], x: &[Complex64], y: &[Complex64]) -> f64 {
        let step = 1e-5;
        let shift = |s: f64, v: &[Complex64]| -> Vec<Complex64> { z.iter().zip(v).map(|(z, v)| z + v * s).collect() };
        let dx = (alpha(w, &shift(step, x), y) - alpha(w, &shift(-step, x), y)) / (2.0 * step);
        let dy = (alpha(w, &shift(step, y), x) - alpha(w, &shift(-step, y), x)) / (2.0 * step);
        dx - dy
    }

    fn three_form(w: &[f64], z: &[Complex64], v: &[Vec<Complex64>; 3]) -> f64 {
        alpha(w, z, &v[0]) * d_alpha(w, z, &v[1], &v[2]) - alpha(w, z, &v[1]) * d_alpha(w, z, &v[0], &v[2])
            + alpha(w, z, &v[2]) * d_alpha(w, z, &v[0], &v[1])
    }

    #[test]
    fn density_identity_by_finite_differences() {
        let w = [2.5, 0.7];
        let mut rng = chunk_rng(3, 0);
        for _ in 0..10 {
            let z = sample_sphere(1, &mut rng);
            // orthonormal tangent frame at z by Gram-Schmidt in R^4
            let mut frame: Vec<Vec<Complex64>> = vec![z.clone()];
            for e in 0..4 {
                let mut v = vec![Complex64::new(0.0, 0.0); 2];
                v[e / 2] = if e % 2 == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 1.0) };
                for f in &frame {
                    let dot: f64 = f.iter().zip(&v).map(|(a, b)| (a.conj() * b).re).sum();
                    v = v.iter().zip(f).map(|(a, b)| a - b * dot).collect();
                }
                let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                if norm > 1e-6 && frame.len() < 4 {
                    frame.push(v.iter().map(|x| x / norm).collect());
                }
            }
            let tangent = [frame[1].clone(), frame[2].clone(), frame[3].clone()];
            let h: f64 = w.iter().zip(&z).map(|(w, z)| w * z.norm_sqr()).sum();
            let weighted = three_form(&w, &z, &tangent);
            let round = three_form(&[1.0, 1.0], &z, &tangent);
            assert!((weighted - round / (h * h)).abs() < 1e-7 * round.abs(), "{weighted} {round} {h}");
            assert!((round.abs() - 2.0).abs() < 1e-7);
        }
    }

    #[test]
    fn density_identity_by_quadrature() {
        // |z_0|² is uniform on [0, 1] for n = 1; (|z_0|², |z_1|²) uniform on the simplex for n = 2
        for (w0, w1) in [(2.0, 1.0), (0.3, 7.0)] {
            let e = integrate(|t| (w0 * t + w1 * (1.0 - t)).powi(-2), 0.0, 1.0, 1e-14);
            assert!((e - 1.0 / (w0 * w1)).abs() < 1e-12);
        }
        let w = [2.0, 3.0, 5.0];
        let e = 2.0
            * integrate(
                |s| {
                    integrate(
                        |t| (w[0] * s + w[1] * t + w[2] * (1.0 - s - t)).powi(-3),
                        0.0,
                        1.0 - s,
                        1e-14,
                    )
                },
                0.0,
                1.0,
                1e-13,
            );
        assert!((e - 1.0 / 30.0).abs() < 1e-11);
    }
}
