//! Numerical building blocks: special functions, quadrature, root finding,
//! random streams and sample statistics.

pub mod interp;
pub mod quad;
pub mod rng;
pub mod roots;
pub mod special;
pub mod stats;

pub use interp::MonotoneCubic;
pub use quad::{adaptive_quad, adaptive_quad_with, Bracket, QuadOptions, QuadratureResult, DEFAULT_QUAD_TOL};
pub use rng::{RngStream, RNG_ALGORITHM};
pub use roots::{invert_monotone, DEFAULT_ROOT_TOL};
pub use special::{bessel_k, bessel_k_scaled, ln_gamma, reg_inc_beta, reg_inc_gamma_lower, reg_inc_gamma_upper};

/// Random stream from a seed; see [`RngStream`].
pub fn rng_stream(seed: u64) -> RngStream {
    RngStream::new(seed)
}
