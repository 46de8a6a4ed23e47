//! Random admissible spheres and classes for property checks.

use num_traits::Zero;
use rand::Rng;

use crate::algebra::{rational, ExactScalar, Poly};
use crate::sphere::{EquivariantClass, WeightedSphere, S, U};

/// Constraints for [`RandomSphere::sample`].
#[derive(Clone, Debug)]
pub struct RandomSphere {
    pub n: usize,
    /// Bound on numerators and denominators of the weights.
    pub max_weight: i64,
    pub max_beta: i64,
    pub nonzero_lambdas: bool,
    pub regular_zero: bool,
}

impl RandomSphere {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            max_weight: 50,
            max_beta: 6,
            nonzero_lambdas: false,
            regular_zero: false,
        }
    }

    pub fn with_nonzero_lambdas(mut self) -> Self {
        self.nonzero_lambdas = true;
        self
    }

    pub fn with_regular_zero(mut self) -> Self {
        self.nonzero_lambdas = true;
        self.regular_zero = true;
        self
    }

    /// Rejection-samples until the constraints hold.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> WeightedSphere {
        loop {
            let w = (0..=self.n)
                .map(|_| {
                    rational(
                        rng.random_range(1..=self.max_weight),
                        rng.random_range(1..=self.max_weight),
                    )
                })
                .collect();
            let beta = (0..=self.n)
                .map(|_| rng.random_range(-self.max_beta..=self.max_beta))
                .collect();
            let Ok(sphere) = WeightedSphere::new(w, beta) else {
                continue;
            };
            if !sphere.has_distinct_lambdas() {
                continue;
            }
            if self.nonzero_lambdas && sphere.lambdas().iter().any(Zero::is_zero) {
                continue;
            }
            if self.regular_zero && !sphere.check_zero_regular() {
                continue;
            }
            return sphere;
        }
    }
}

/// A class in `Q[u, s]` with small integer coefficients and total degree at most `degree`.
pub fn random_class<R: Rng + ?Sized>(rng: &mut R, degree: u32, max_coefficient: i64) -> EquivariantClass {
    let mut rep = Poly::zero();
    for total in 0..=degree {
        for a in 0..=total {
            let c = rng.random_range(-max_coefficient..=max_coefficient);
            if c != 0 {
                let m = Poly::monomial(ExactScalar::from_int(c), &[(U, a), (S, total - a)]);
                rep = &rep + &m;
            }
        }
    }
    EquivariantClass::new(rep).expect("only u and s appear")
}
