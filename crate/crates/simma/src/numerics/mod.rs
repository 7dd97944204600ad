//! Shared numerical machinery: adaptive quadrature, divergence detection,
//! dyadic grids and variation sums, deterministic seed derivation.

mod divergence;
mod dyadic;
mod quad;
mod seed;
mod special;

pub use divergence::{detect_divergence, Convergence, DivergesAt};
pub use dyadic::{dyadic_variation, variation_levels, DyadicGrid};
pub use quad::{integrate, Domain, QuadError, QuadResult, QuadratureSpec};
pub use seed::{SeedSpec, Stream};
pub use special::{gamma, ln_gamma, lower_incomplete_gamma, upper_incomplete_gamma};
