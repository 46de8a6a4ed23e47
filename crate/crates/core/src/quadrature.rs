//! Adaptive Gauss-Legendre quadrature used by the numeric cross-checks.

use std::sync::OnceLock;

use num_complex::Complex64;

const ORDER: usize = 20;
const MAX_DEPTH: u32 = 40;
const MAX_INTERVALS: usize = 20_000;

/// Nodes and weights of the `ORDER`-point Gauss-Legendre rule on `[-1, 1]`.
fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(ORDER))
}

/// Gauss-Legendre nodes and weights by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pn_1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn_1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn fixed<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Complex64 {
    let (nodes, weights) = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    nodes
        .iter()
        .zip(weights)
        .map(|(x, w)| f(mid + half * x) * *w)
        .sum::<Complex64>()
        * half
}

fn adaptive<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, whole: Complex64, tol: f64) -> Complex64 {
    // An explicit stack caps the work when the tolerance is below rounding level.
    let mut stack = vec![(a, b, whole, tol, 0u32)];
    let mut total = Complex64::new(0.0, 0.0);
    let mut budget = MAX_INTERVALS;
    while let Some((a, b, whole, tol, depth)) = stack.pop() {
        let mid = 0.5 * (a + b);
        let left = fixed(f, a, mid);
        let right = fixed(f, mid, b);
        let refined = left + right;
        let floor = 1e-15 * refined.norm();
        if depth >= MAX_DEPTH || budget == 0 || (refined - whole).norm() <= tol.max(floor) {
            total += refined;
            continue;
        }
        budget -= 1;
        stack.push((mid, b, right, 0.5 * tol, depth + 1));
        stack.push((a, mid, left, 0.5 * tol, depth + 1));
    }
    total
}

/// `∫_a^b f` to absolute tolerance `tol` (best effort beyond the depth limit).
pub fn integrate_complex<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: f64) -> Complex64 {
    if a == b {
        return Complex64::new(0.0, 0.0);
    }
    let whole = fixed(&f, a, b);
    adaptive(&f, a, b, whole, tol)
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    integrate_complex(|x| Complex64::new(f(x), 0.0), a, b, tol).re
}

/// `∫_a^∞ f` through the map `x = a + t/(1-t)`; `f` must decay.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> f64 {
    integrate(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let one_minus = 1.0 - t;
            let x = a + t / one_minus;
            let v = f(x) / (one_minus * one_minus);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(ORDER);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // degree 2n-1 is exact
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(38)).sum();
        assert!((v - 2.0 / 39.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_integral() {
        let v = integrate(|x| (-x * x).exp(), -10.0, 10.0, 1e-14);
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-13);
        let half = integrate_to_infinity(|x| (-x * x).exp(), 0.0, 1e-14);
        assert!((half - 0.5 * std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_integrand() {
        let v = integrate_complex(|x| (Complex64::i() * 7.0 * x).exp(), 0.0, 3.0, 1e-13);
        let exact = ((Complex64::i() * 21.0).exp() - 1.0) / (Complex64::i() * 7.0);
        assert!((v - exact).norm() < 1e-12);
    }
}
