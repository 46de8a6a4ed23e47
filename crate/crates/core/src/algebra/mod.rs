//! Exact arithmetic: graded Gaussian rationals, polynomials, rational functions, residues.

mod poly;
mod rational_fn;
mod residue;
mod scalar;
mod text;

pub use poly::{Poly, RESERVED_NAMES, VARIABLE_REGISTRY};
pub use rational_fn::RationalFn;
pub use residue::{residue_at_zero, residue_at_zero_f64};
pub use scalar::{
    rational, rational_int, rational_to_f64, ExactScalar, GaussianRational, Grade, Rational,
};

/// Parses `"p/q"` or `"p"` into a rational.
pub fn parse_rational(text: &str) -> crate::Result<Rational> {
    let trimmed = text.trim();
    trimmed.parse::<Rational>().map_err(|e| crate::Error::Parse {
        position: 0,
        message: format!("`{trimmed}` is not a rational number: {e}"),
    })
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
