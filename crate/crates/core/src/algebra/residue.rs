//! Residues at the origin of `q(z)·e^{iλz}/z^m`.

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::poly::Poly;
use super::scalar::{ExactScalar, GaussianRational, Rational};
use crate::error::{Error, Result};

/// `Res_{z=0} q(z) e^{iλz} / z^m`, i.e. the `z^{m-1}` Taylor coefficient of `q(z) e^{iλz}`:
///
/// `Σ_{k<m} q_k (iλ)^{m-1-k} / (m-1-k)!`
///
/// `q` may carry further variables; the result is a polynomial in those.
pub fn residue_at_zero(q: &Poly, var: &str, lambda: &Rational, m: u32) -> Result<Poly> {
    if m == 0 {
        return Err(Error::Internal("residue needs a pole order m >= 1".into()));
    }
    let coeffs = q.coefficients_in(var);
    let i_lambda = GaussianRational::new(Rational::zero(), lambda.clone());

    // exp_series[j] = (iλ)^j / j!
    let mut exp_series = Vec::with_capacity(m as usize);
    let mut current = GaussianRational::one();
    for j in 0..m as usize {
        if j > 0 {
            current = (&current * &i_lambda).scale(&(Rational::one() / Rational::from_integer(j.into())));
        }
        exp_series.push(current.clone());
    }

    let top = m as usize - 1;
    let mut out = Poly::zero();
    for (k, qk) in coeffs.iter().enumerate().take(top + 1) {
        let factor = ExactScalar::from_gaussian(exp_series[top - k].clone());
        out = &out + &qk.scale(&factor);
    }
    Ok(out)
}

/// Floating-point twin of [`residue_at_zero`] for real, possibly irrational λ.
/// `q[k]` is the coefficient of `z^k`.
pub fn residue_at_zero_f64(q: &[Complex64], lambda: f64, m: u32) -> Complex64 {
    if m == 0 {
        return Complex64::zero();
    }
    let top = m as usize - 1;
    let i_lambda = Complex64::new(0.0, lambda);
    let mut term = Complex64::one();
    let mut exp_series = Vec::with_capacity(top + 1);
    for j in 0..=top {
        if j > 0 {
            term = term * i_lambda / j as f64;
        }
        exp_series.push(term);
    }
    q.iter()
        .take(top + 1)
        .enumerate()
        .map(|(k, qk)| qk * exp_series[top - k])
        .sum()
}
