//! Exact equivariant localization, Jeffrey-Kirwan residues and
//! Duistermaat-Heckman asymptotics for circle actions on weighted Sasakian
//! spheres, with a Monte Carlo oracle for cross-checks.
//!
//! ```
//! use contactloc_core::{jk::quotient_pairing, localization::contact_volume};
//! use contactloc_core::{algebra::rational, EquivariantClass, WeightedSphere};
//!
//! let sphere = WeightedSphere::new(vec![rational(3, 2), rational(1, 1)], vec![-1, 1])?;
//! assert_eq!(contact_volume(&sphere)?.to_string(), "(4/3)*pi^2");
//!
//! let eta = EquivariantClass::parse("s + 3")?;
//! assert_eq!(quotient_pairing(&sphere, &eta)?.to_string(), "(12/5)*pi");
//! # Ok::<(), contactloc_core::Error>(())
//! ```

pub mod algebra;
pub mod dh;
pub mod error;
pub mod jk;
pub mod localization;
pub mod mc;
pub mod quadrature;
pub mod random;
pub mod sphere;
pub mod verify;

pub use num_complex::Complex64;

pub use algebra::{ExactScalar, Poly, Rational, RationalFn};
pub use error::{Error, Result};
pub use sphere::{CriticalCircle, EquivariantClass, WeightedSphere};
